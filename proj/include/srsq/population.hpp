// Copyright 2026 The srsq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and limitations under the License.

#ifndef SRSQ_POPULATION_HPP
#define SRSQ_POPULATION_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace srsq {

// The three analysis variables carried by every school record.
enum class Var { A = 0, B = 1, C = 2 };

inline constexpr std::size_t kNumVars = 3;

constexpr std::size_t var_index(Var v) { return static_cast<std::size_t>(v); }

constexpr char var_tag(Var v) {
    switch (v) {
        case Var::A: return 'a';
        case Var::B: return 'b';
        case Var::C: return 'c';
    }
    return '?';
}

constexpr std::string_view var_name(Var v) {
    switch (v) {
        case Var::A: return "var_a";
        case Var::B: return "var_b";
        case Var::C: return "var_c";
    }
    return "var_?";
}

struct SchoolRecord {
    std::string school_id;
    std::string group_id;
    std::array<double, kNumVars> value{};  // raw units
    std::array<double, kNumVars> z{};      // sd units, valid iff the frame is standardized
};

struct VariableMoments {
    double mean = 0.0;
    double sd = 0.0;  // population (divide-by-N)
};

// A finite population of schools. Records are ordered as loaded; ids are
// unique. A frame is either raw or standardized; standardize() produces a
// new frame rather than mutating in place.
class PopulationFrame {
public:
    PopulationFrame(std::string name, std::vector<SchoolRecord> records,
                    bool standardized = false,
                    std::array<VariableMoments, kNumVars> moments = {});

    const std::string& name() const { return name_; }
    const std::vector<SchoolRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    bool standardized() const { return standardized_; }
    const std::array<VariableMoments, kNumVars>& moments() const { return moments_; }

    // Position of a school in records(). Throws UnknownSchool.
    std::size_t index_of(const std::string& school_id) const;

private:
    std::string name_;
    std::vector<SchoolRecord> records_;
    bool standardized_;
    std::array<VariableMoments, kNumVars> moments_;
    std::unordered_map<std::string, std::size_t> index_;
};

// Parses a header-bearing CSV (school_id,group_id,var_a,var_b,var_c) into an
// unstandardized frame. Quoted fields are accepted. Throws ParseError with
// the offending line number, DuplicateId, or EmptyPopulation.
PopulationFrame load_population(std::istream& csv_source, std::string name);

// Populates z-fields as (x - mean)/sd with population (divide-by-N) sd.
// Raw fields are copied unchanged and the moments recorded. Throws
// DegenerateVariable when a variable's sd vanishes (relative to its scale)
// and std::invalid_argument when the frame is already standardized.
PopulationFrame standardize(const PopulationFrame& frame);

struct SkippedGroup {
    std::string group;     // group_id, or the frame name for the full frame
    std::string variable;  // variable that failed standardization
    std::string reason;
};

struct PartitionResult {
    // Full frame first (standardized), then one frame per group_id in
    // lexicographic order. Groups with a degenerate variable are absent
    // from frames and listed in skipped instead.
    std::vector<PopulationFrame> frames;
    std::vector<SkippedGroup> skipped;
};

// Splits a raw frame by group_id and standardizes every piece independently,
// including the full frame itself.
PartitionResult partition_by_group(const PopulationFrame& frame);

enum class Marginal { Normal, Lognormal, BoundedPercent };

struct SyntheticSpec {
    std::size_t n_schools = 0;
    // Latent correlation; must be symmetric with unit diagonal and
    // eigenvalues >= -1e-10.
    std::array<std::array<double, kNumVars>, kNumVars> correlation{
        {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};
    std::array<Marginal, kNumVars> marginals{Marginal::Normal, Marginal::Normal,
                                             Marginal::Normal};
    std::uint64_t seed = 0;
    std::string name = "synthetic";
    std::string group_id = "SYN";
};

// Correlated trivariate latent normals pushed through monotone marginal
// transforms (normal = identity, lognormal = exp, bounded-percent =
// standard-normal CDF x 100). Deterministic given the seed. Throws
// InvalidCorrelation. The result is unstandardized.
PopulationFrame generate_synthetic(const SyntheticSpec& spec);

} // namespace srsq

#endif // SRSQ_POPULATION_HPP
