// Copyright 2026 The srsq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and limitations under the License.

#ifndef SRSQ_METRICS_HPP
#define SRSQ_METRICS_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "srsq/design.hpp"
#include "srsq/recruitment.hpp"

namespace srsq {

// Design roles a variable can fill; summaries are indexed by role, not by
// variable, so results from different permutations can be averaged.
enum class Role { Auxiliary = 0, Stratifier = 1, Unobserved = 2 };

inline constexpr std::array<Role, 3> kRoles = {Role::Auxiliary, Role::Stratifier,
                                               Role::Unobserved};

constexpr std::size_t role_index(Role r) { return static_cast<std::size_t>(r); }

constexpr std::string_view role_name(Role r) {
    switch (r) {
        case Role::Auxiliary: return "auxiliary";
        case Role::Stratifier: return "stratifier";
        case Role::Unobserved: return "unobserved";
    }
    return "role_?";
}

constexpr Var role_variable(const RoleAssignment& roles, Role r) {
    switch (r) {
        case Role::Auxiliary: return roles.auxiliary;
        case Role::Stratifier: return roles.stratifier;
        case Role::Unobserved: return roles.unobserved;
    }
    return Var::A;
}

// Moments of the per-replication sample means for one role's variable, in
// sd units. All quantities use divide-by-R, which makes
// mse = mean_signed^2 + variance hold exactly.
struct RoleStats {
    double mean_signed = 0.0;  // external validity bias, signed
    double bias_abs = 0.0;
    double variance = 0.0;
    double mse = 0.0;          // mean of squared sample means
};

// Mean stage counts per replication (schools).
struct CountStats {
    double contacted = 0.0;
    double excluded_by_quota = 0.0;
    double invited = 0.0;
    double declined = 0.0;
    double agreed = 0.0;
    double achieved = 0.0;
};

struct MethodSummary {
    Method method = Method::Srs;
    // Absent after permutation averaging, where roles no longer map to
    // fixed variables.
    std::optional<RoleAssignment> roles;
    std::int64_t replications = 0;  // total outcomes summarized
    // Replications with achieved size 0; excluded from the role moments,
    // included in the count averages. A count, but held as double so that
    // permutation averaging is lossless.
    double zero_size = 0.0;
    std::array<RoleStats, 3> role_stats{};  // indexed by role_index()
    CountStats counts;
};

// Field-wise SRSQ - SRS differences (literal subtraction; in particular the
// bias_abs delta is the difference of absolute biases, not |difference|).
struct SummaryDelta {
    std::array<RoleStats, 3> role_stats{};
    CountStats counts;
};

struct ComparisonReport {
    MethodSummary srs;
    MethodSummary srsq;
    SummaryDelta diff;
};

// Two comparison runs of the same design at different replication counts
// (or seeds), with the field-wise gap between their SRSQ - SRS differences
// (gap = run_b.diff - run_a.diff).
struct StabilityReport {
    ComparisonReport run_a;
    ComparisonReport run_b;
    SummaryDelta gap;
};

// Aggregates outcomes of one method. Moments are taken over replications
// with achieved > 0; zero-size replications are counted separately. Role
// stats are NaN when every replication came up empty. Throws NoReplications
// on an empty list and std::invalid_argument on mixed method tags.
MethodSummary summarize(std::span<const ReplicationOutcome> outcomes,
                        const RoleAssignment& roles);

// Field-wise SRSQ - SRS. Throws IncomparableSummaries unless the two
// summaries carry the expected methods, equal roles, and equal replication
// counts.
ComparisonReport compare(const MethodSummary& srs, const MethodSummary& srsq);

// Unweighted mean over the six role permutations, aligned by role. Requires
// each permutation exactly once (PermutationSetError) and equal replication
// counts (IncomparableSummaries). The result carries no RoleAssignment.
ComparisonReport average_over_permutations(std::span<const ComparisonReport> reports);

// Gap between two runs' SRSQ - SRS differences. Throws IncomparableSummaries
// when the runs' roles disagree.
StabilityReport stability_check(const ComparisonReport& run_a, const ComparisonReport& run_b);

} // namespace srsq

#endif // SRSQ_METRICS_HPP
