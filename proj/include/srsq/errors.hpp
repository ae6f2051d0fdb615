// Copyright 2026 The srsq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and limitations under the License.

#ifndef SRSQ_ERRORS_HPP
#define SRSQ_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace srsq {

// Population loading / standardization.

class DuplicateId : public std::runtime_error {
public:
    explicit DuplicateId(const std::string& school_id)
        : std::runtime_error("duplicate school_id: " + school_id) {}
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t row, const std::string& message)
        : std::runtime_error("row " + std::to_string(row) + ": " + message), row_(row) {}
    std::size_t row() const { return row_; }

private:
    std::size_t row_;
};

class EmptyPopulation : public std::runtime_error {
public:
    EmptyPopulation() : std::runtime_error("population has no records") {}
};

// Raised when a variable has zero variance within a population, so it
// cannot be standardized (the constant-expenditure single-district case).
class DegenerateVariable : public std::runtime_error {
public:
    explicit DegenerateVariable(const std::string& variable)
        : std::runtime_error("variable " + variable + " has zero variance"),
          variable_(variable) {}
    const std::string& variable() const { return variable_; }

private:
    std::string variable_;
};

class InvalidCorrelation : public std::runtime_error {
public:
    explicit InvalidCorrelation(const std::string& message)
        : std::runtime_error("invalid correlation matrix: " + message) {}
};

// Design construction.

class InvalidBinCount : public std::runtime_error {
public:
    InvalidBinCount(int k, std::size_t n)
        : std::runtime_error("bin count " + std::to_string(k) + " invalid for " +
                             std::to_string(n) + " values") {}
};

class InvalidTarget : public std::runtime_error {
public:
    explicit InvalidTarget(int n_target)
        : std::runtime_error("sample size target must be positive, got " +
                             std::to_string(n_target)) {}
};

class UnknownSchool : public std::runtime_error {
public:
    explicit UnknownSchool(const std::string& school_id)
        : std::runtime_error("unknown school_id: " + school_id) {}
};

// Metrics aggregation.

class NoReplications : public std::runtime_error {
public:
    NoReplications() : std::runtime_error("no replication outcomes to summarize") {}
};

class IncomparableSummaries : public std::runtime_error {
public:
    explicit IncomparableSummaries(const std::string& message)
        : std::runtime_error("incomparable summaries: " + message) {}
};

class PermutationSetError : public std::runtime_error {
public:
    explicit PermutationSetError(const std::string& message)
        : std::runtime_error("bad permutation set: " + message) {}
};

} // namespace srsq

#endif // SRSQ_ERRORS_HPP
