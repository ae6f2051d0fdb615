// Copyright 2026 The srsq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and limitations under the License.

#ifndef SRSQ_DESIGN_HPP
#define SRSQ_DESIGN_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "srsq/population.hpp"

namespace srsq {

// Assignment of the three analysis variables to the three design roles.
struct RoleAssignment {
    Var stratifier;
    Var auxiliary;
    Var unobserved;

    // Stable key, e.g. "strat_c_aux_a" (the unobserved role is implied).
    std::string label() const;

    friend bool operator==(const RoleAssignment&, const RoleAssignment&) = default;
};

// The six role permutations, stratifier-major then auxiliary-minor:
// (c,a,b), (c,b,a), (a,c,b), (a,b,c), (b,c,a), (b,a,c).
std::array<RoleAssignment, 6> enumerate_role_permutations();

// Value-based quantile bins. Bins are indexed 0..k-1; a value's bin is the
// number of cut points <= it (half-open intervals, top bin closed above).
// Duplicate cut points leave the intervening bins empty.
struct BinRule {
    std::vector<double> cut_points;       // k-1 entries, ascending, dups allowed
    std::vector<std::int64_t> population_counts;  // k entries, sums to N

    std::size_t num_bins() const { return population_counts.size(); }
    std::size_t bin_of(double value) const;
};

// Cut points are the order statistics at ranks ceil(N*j/k), j = 1..k-1.
// Throws InvalidBinCount when k < 1 or k > values.size().
BinRule quantile_bins(std::span<const double> values, int k);

// Largest-remainder apportionment of n_target across cells proportional to
// counts; remainder ties go to the lower index. Exact integer arithmetic.
// Throws InvalidTarget when n_target <= 0.
std::vector<int> proportional_targets(std::span<const std::int64_t> counts, int n_target);

struct DesignParams {
    int n_target = 100;
    int k_strata = 5;
    int k_bins = 5;
    double p_low = 0.5;    // agreement probability, bottom half on the auxiliary
    double p_high = 0.25;  // agreement probability, top half
};

// Immutable per-(population, permutation) sampling plan. Holds a pointer to
// the frame it was built from; the frame must outlive the design. Safe to
// share across replication workers.
class SamplingDesign {
public:
    const PopulationFrame& frame() const { return *frame_; }
    const RoleAssignment& roles() const { return roles_; }
    const DesignParams& params() const { return params_; }
    int n_target() const { return params_.n_target; }

    std::size_t num_strata() const { return stratum_members_.size(); }
    std::size_t num_bins() const { return quota_rule_.num_bins(); }

    int stratum_of(std::size_t record_index) const { return stratum_of_[record_index]; }
    int bin_of(std::size_t record_index) const { return bin_of_[record_index]; }
    bool in_bottom_half(std::size_t record_index) const {
        return bottom_half_[record_index] != 0;
    }
    double agreement_probability(std::size_t record_index) const {
        return in_bottom_half(record_index) ? params_.p_low : params_.p_high;
    }

    const std::vector<int>& stratum_targets() const { return stratum_targets_; }
    const std::vector<int>& quota_caps() const { return quota_caps_; }
    const BinRule& quota_rule() const { return quota_rule_; }
    // Record indices per stratum, in frame order.
    const std::vector<std::vector<std::uint32_t>>& stratum_members() const {
        return stratum_members_;
    }

private:
    friend SamplingDesign build_design(const PopulationFrame&, const RoleAssignment&,
                                       const DesignParams&);

    const PopulationFrame* frame_ = nullptr;
    RoleAssignment roles_{};
    DesignParams params_{};
    std::vector<int> stratum_of_;
    std::vector<int> bin_of_;
    std::vector<std::uint8_t> bottom_half_;
    std::vector<std::vector<std::uint32_t>> stratum_members_;
    std::vector<int> stratum_targets_;
    std::vector<int> quota_caps_;
    BinRule quota_rule_;
};

// Strata are quantile bins on the stratifier z-values with proportional
// targets; quota caps are proportional over quantile bins of the auxiliary
// z-values; the bottom-half set holds the floor(N/2) schools with the lowest
// auxiliary values (ties broken by school_id). Requires a standardized frame.
SamplingDesign build_design(const PopulationFrame& frame, const RoleAssignment& roles,
                            const DesignParams& params);

// Lookup by school id. Throws UnknownSchool.
double agreement_probability(const std::string& school_id, const SamplingDesign& design);

} // namespace srsq

#endif // SRSQ_DESIGN_HPP
