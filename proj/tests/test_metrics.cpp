// Copyright 2026 The srsq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "srsq/errors.hpp"
#include "srsq/metrics.hpp"

using namespace srsq;

namespace {

const RoleAssignment kRolesCA{Var::C, Var::A, Var::B};  // strat c, aux a

ReplicationOutcome make_outcome(Method m, double mean_a, int achieved = 100,
                                StageCounts counts = {120, 5, 115, 15, 100}) {
    ReplicationOutcome o;
    o.method = m;
    o.counts = counts;
    o.achieved = achieved;
    if (achieved > 0) {
        o.sample_mean_z = {mean_a, mean_a * 0.5, mean_a * -0.25};
    } else {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        o.sample_mean_z = {nan, nan, nan};
    }
    return o;
}

// A summary with the auxiliary role pinned to the given stats and the other
// two roles left at zero; counts as provided.
MethodSummary make_summary(Method m, const RoleAssignment& roles, std::int64_t reps,
                           RoleStats aux, CountStats counts) {
    MethodSummary s;
    s.method = m;
    s.roles = roles;
    s.replications = reps;
    s.role_stats[role_index(Role::Auxiliary)] = aux;
    s.counts = counts;
    return s;
}

bool near(double a, double b, double tol = 1e-12) { return std::fabs(a - b) <= tol; }

} // namespace

TEST_CASE("summarize reproduces hand-computed moments") {
    // Sample means 0.1, 0.2, 0.3: mean 0.2, divide-by-3 variance 0.02/3,
    // mse (0.01+0.04+0.09)/3. The decomposition mse = mean^2 + variance is
    // exact with these estimators.
    std::vector<ReplicationOutcome> outs = {
        make_outcome(Method::Srs, 0.1, 100, {267, 0, 267, 167, 100}),
        make_outcome(Method::Srs, 0.2, 100, {268, 0, 268, 168, 100}),
        make_outcome(Method::Srs, 0.3, 100, {266, 0, 266, 166, 100}),
    };
    const auto s = summarize(outs, kRolesCA);
    CHECK(s.method == Method::Srs);
    CHECK(s.replications == 3);
    CHECK(s.zero_size == 0.0);

    const auto& aux = s.role_stats[role_index(Role::Auxiliary)];
    CHECK(aux.mean_signed == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(aux.bias_abs == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(aux.variance == doctest::Approx(0.006666666666666667).epsilon(1e-12));
    CHECK(aux.mse == doctest::Approx(0.04666666666666667).epsilon(1e-12));
    CHECK(near(aux.mse, aux.mean_signed * aux.mean_signed + aux.variance));

    // Roles pick out their assigned variable: stratifier is var_c here, and
    // make_outcome stores mean_c = -0.25 * mean_a.
    const auto& strat = s.role_stats[role_index(Role::Stratifier)];
    CHECK(strat.mean_signed == doctest::Approx(-0.05).epsilon(1e-12));
    CHECK(strat.bias_abs == doctest::Approx(0.05).epsilon(1e-12));

    CHECK(s.counts.contacted == doctest::Approx(267.0).epsilon(1e-12));
    CHECK(s.counts.invited == doctest::Approx(267.0).epsilon(1e-12));
    CHECK(s.counts.declined == doctest::Approx(167.0).epsilon(1e-12));
    CHECK(s.counts.agreed == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(s.counts.achieved == doctest::Approx(100.0).epsilon(1e-12));
}

TEST_CASE("identical sample means give zero variance") {
    std::vector<ReplicationOutcome> outs(5, make_outcome(Method::Srsq, -0.3));
    const auto s = summarize(outs, kRolesCA);
    const auto& aux = s.role_stats[role_index(Role::Auxiliary)];
    CHECK(aux.mean_signed == doctest::Approx(-0.3).epsilon(1e-12));
    CHECK(aux.bias_abs == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(aux.variance == doctest::Approx(0.0));
    CHECK(near(aux.mse, 0.09, 1e-12));
}

TEST_CASE("zero-size replications enter counts but not moments") {
    std::vector<ReplicationOutcome> outs = {
        make_outcome(Method::Srs, 0.1, 100, {200, 0, 200, 100, 100}),
        make_outcome(Method::Srs, 0.3, 100, {200, 0, 200, 100, 100}),
        make_outcome(Method::Srs, 0.0, 0, {40, 0, 40, 40, 0}),
        make_outcome(Method::Srs, 0.2, 100, {200, 0, 200, 100, 100}),
    };
    const auto s = summarize(outs, kRolesCA);
    CHECK(s.replications == 4);
    CHECK(s.zero_size == 1.0);
    // Moments over the three non-empty replications only.
    const auto& aux = s.role_stats[role_index(Role::Auxiliary)];
    CHECK(aux.mean_signed == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(aux.variance == doctest::Approx(0.02 / 3.0).epsilon(1e-12));
    // Counts over all four, shortfall included.
    CHECK(s.counts.contacted == doctest::Approx(160.0).epsilon(1e-12));
    CHECK(s.counts.achieved == doctest::Approx(75.0).epsilon(1e-12));
}

TEST_CASE("all-empty replications yield NaN moments and full zero_size") {
    std::vector<ReplicationOutcome> outs(3, make_outcome(Method::Srs, 0.0, 0, {10, 0, 10, 10, 0}));
    const auto s = summarize(outs, kRolesCA);
    CHECK(s.zero_size == 3.0);
    for (Role r : kRoles) {
        const auto& st = s.role_stats[role_index(r)];
        CHECK(std::isnan(st.mean_signed));
        CHECK(std::isnan(st.bias_abs));
        CHECK(std::isnan(st.variance));
        CHECK(std::isnan(st.mse));
    }
    CHECK(s.counts.contacted == doctest::Approx(10.0));
    CHECK(s.counts.achieved == doctest::Approx(0.0));
}

TEST_CASE("summarize rejects empty and mixed inputs") {
    CHECK_THROWS_AS(summarize({}, kRolesCA), NoReplications);
    std::vector<ReplicationOutcome> mixed = {make_outcome(Method::Srs, 0.1),
                                             make_outcome(Method::Srsq, 0.2)};
    CHECK_THROWS_AS(summarize(mixed, kRolesCA), std::invalid_argument);
}

TEST_CASE("summarize is order independent up to rounding") {
    std::vector<ReplicationOutcome> outs;
    for (int i = 0; i < 50; ++i)
        outs.push_back(make_outcome(Method::Srs, 0.01 * i - 0.2, i % 7 == 0 ? 0 : 90 + i));
    auto reversed = outs;
    std::reverse(reversed.begin(), reversed.end());
    const auto a = summarize(outs, kRolesCA);
    const auto b = summarize(reversed, kRolesCA);
    CHECK(a.zero_size == b.zero_size);
    for (Role r : kRoles) {
        const auto& x = a.role_stats[role_index(r)];
        const auto& y = b.role_stats[role_index(r)];
        CHECK(near(x.mean_signed, y.mean_signed));
        CHECK(near(x.variance, y.variance));
        CHECK(near(x.mse, y.mse));
    }
    CHECK(near(a.counts.contacted, b.counts.contacted));
}

TEST_CASE("compare subtracts fields literally, SRSQ minus SRS") {
    const auto srs = make_summary(Method::Srs, kRolesCA, 1000,
                                  RoleStats{-0.2386, 0.2386, 0.0083, 0.0652},
                                  CountStats{267.1, 0.0, 267.1, 167.1, 100.0, 100.0});
    const auto srsq = make_summary(Method::Srsq, kRolesCA, 1000,
                                   RoleStats{-0.0064, 0.0064, 0.0105, 0.0105},
                                   CountStats{454.9, 160.8, 294.1, 194.1, 100.0, 100.0});
    const auto rep = compare(srs, srsq);
    const auto& d = rep.diff.role_stats[role_index(Role::Auxiliary)];
    CHECK(d.bias_abs == doctest::Approx(-0.2322).epsilon(1e-9));
    CHECK(d.mean_signed == doctest::Approx(0.2322).epsilon(1e-9));
    CHECK(rep.diff.counts.contacted == doctest::Approx(187.8).epsilon(1e-9));
    CHECK(rep.diff.counts.excluded_by_quota == doctest::Approx(160.8).epsilon(1e-9));
    CHECK(rep.diff.counts.agreed == doctest::Approx(0.0));

    // Identical stats difference out to zero.
    auto srsq_same = srs;
    srsq_same.method = Method::Srsq;
    const auto rep0 = compare(srs, srsq_same);
    CHECK(rep0.diff.role_stats[0].bias_abs == doctest::Approx(0.0));
    CHECK(rep0.diff.counts.contacted == doctest::Approx(0.0));
}

TEST_CASE("compare rejects mismatched summaries") {
    const auto srs = make_summary(Method::Srs, kRolesCA, 100, RoleStats{}, CountStats{});
    auto srsq = make_summary(Method::Srsq, kRolesCA, 100, RoleStats{}, CountStats{});
    CHECK_THROWS_AS(compare(srs, srs), IncomparableSummaries);
    CHECK_THROWS_AS(compare(srsq, srsq), IncomparableSummaries);

    auto other_roles = srsq;
    other_roles.roles = RoleAssignment{Var::A, Var::B, Var::C};
    CHECK_THROWS_AS(compare(srs, other_roles), IncomparableSummaries);

    auto other_reps = srsq;
    other_reps.replications = 99;
    CHECK_THROWS_AS(compare(srs, other_reps), IncomparableSummaries);
}

TEST_CASE("permutation averaging reproduces a hand-computed mean") {
    const auto perms = enumerate_role_permutations();
    // SRSQ - SRS differences in abs auxiliary bias across the six
    // permutations; their mean is -1.39/6.
    const std::array<double, 6> diffs = {-0.20, -0.22, -0.24, -0.26, -0.22, -0.25};
    std::vector<ComparisonReport> reports;
    for (std::size_t i = 0; i < perms.size(); ++i) {
        const auto srs = make_summary(Method::Srs, perms[i], 1000,
                                      RoleStats{-0.25, 0.25, 0.008, 0.0705},
                                      CountStats{260.0 + static_cast<double>(i), 0, 260, 160, 100, 100});
        const auto srsq = make_summary(Method::Srsq, perms[i], 1000,
                                       RoleStats{-0.25 - diffs[i], 0.25 + diffs[i], 0.010, 0.010},
                                       CountStats{450.0, 150, 300, 200, 100, 100});
        reports.push_back(compare(srs, srsq));
    }
    const auto avg = average_over_permutations(reports);
    CHECK_FALSE(avg.srs.roles.has_value());
    CHECK_FALSE(avg.srsq.roles.has_value());
    CHECK(avg.srs.replications == 1000);
    const auto& d = avg.diff.role_stats[role_index(Role::Auxiliary)];
    CHECK(d.bias_abs == doctest::Approx(-1.39 / 6.0).epsilon(1e-9));
    CHECK(avg.srs.counts.contacted == doctest::Approx(262.5).epsilon(1e-12));
    CHECK(avg.diff.counts.contacted == doctest::Approx(450.0 - 262.5).epsilon(1e-9));

    // Six identical reports average to themselves.
    std::vector<ComparisonReport> same(6, reports.front());
    for (std::size_t i = 0; i < 6; ++i) {
        same[i].srs.roles = perms[i];
        same[i].srsq.roles = perms[i];
    }
    const auto id = average_over_permutations(same);
    CHECK(near(id.diff.role_stats[0].bias_abs, same.front().diff.role_stats[0].bias_abs));
    CHECK(near(id.srs.counts.contacted, same.front().srs.counts.contacted));
}

TEST_CASE("permutation averaging validates the permutation set") {
    const auto perms = enumerate_role_permutations();
    auto make_report = [&](const RoleAssignment& roles, std::int64_t reps) {
        return compare(make_summary(Method::Srs, roles, reps, RoleStats{}, CountStats{}),
                       make_summary(Method::Srsq, roles, reps, RoleStats{}, CountStats{}));
    };

    std::vector<ComparisonReport> five;
    for (std::size_t i = 0; i < 5; ++i) five.push_back(make_report(perms[i], 100));
    CHECK_THROWS_AS(average_over_permutations(five), PermutationSetError);

    auto dup = five;
    dup.push_back(make_report(perms[0], 100));
    CHECK_THROWS_AS(average_over_permutations(dup), PermutationSetError);

    auto bogus = five;
    bogus.push_back(make_report(RoleAssignment{Var::A, Var::A, Var::A}, 100));
    CHECK_THROWS_AS(average_over_permutations(bogus), PermutationSetError);

    std::vector<ComparisonReport> uneven;
    for (std::size_t i = 0; i < 6; ++i) uneven.push_back(make_report(perms[i], i == 3 ? 99 : 100));
    CHECK_THROWS_AS(average_over_permutations(uneven), IncomparableSummaries);

    auto unlabeled = five;
    unlabeled.push_back(make_report(perms[5], 100));
    unlabeled.back().srs.roles = std::nullopt;
    CHECK_THROWS_AS(average_over_permutations(unlabeled), PermutationSetError);
}

TEST_CASE("averaging commutes with comparison") {
    const auto perms = enumerate_role_permutations();
    std::uint64_t state = 12345;
    auto next = [&state]() {
        state = state * 6364136223846793005ull + 1442695040888963407ull;
        return static_cast<double>(state >> 40) / static_cast<double>(1ull << 24);
    };
    std::vector<ComparisonReport> reports;
    for (const auto& roles : perms) {
        MethodSummary srs = make_summary(Method::Srs, roles, 500, RoleStats{}, CountStats{});
        MethodSummary srsq = make_summary(Method::Srsq, roles, 500, RoleStats{}, CountStats{});
        for (std::size_t r = 0; r < 3; ++r) {
            srs.role_stats[r] = RoleStats{next() - 0.5, next(), next() * 0.01, next() * 0.1};
            srsq.role_stats[r] = RoleStats{next() - 0.5, next(), next() * 0.01, next() * 0.1};
        }
        srs.counts = CountStats{next() * 300, 0, next() * 300, next() * 200, 100, 100};
        srsq.counts = CountStats{next() * 500, next() * 200, next() * 300, next() * 200, 100, 100};
        reports.push_back(compare(srs, srsq));
    }
    const auto avg = average_over_permutations(reports);
    // Mean of the per-permutation diffs equals the diff of the means.
    for (std::size_t r = 0; r < 3; ++r) {
        double mean_diff = 0.0;
        for (const auto& rep : reports) mean_diff += rep.diff.role_stats[r].bias_abs / 6.0;
        CHECK(near(avg.diff.role_stats[r].bias_abs, mean_diff));
        CHECK(near(avg.diff.role_stats[r].bias_abs,
                   avg.srsq.role_stats[r].bias_abs - avg.srs.role_stats[r].bias_abs));
    }
    double mean_contacted = 0.0;
    for (const auto& rep : reports) mean_contacted += rep.diff.counts.contacted / 6.0;
    CHECK(near(avg.diff.counts.contacted, mean_contacted, 1e-10));
}

TEST_CASE("stability gap is the difference of differences") {
    // Run A: abs-bias diff -0.2311. Run B at another replication count:
    // -0.2322. Gap -0.0011.
    const auto run_a = compare(
        make_summary(Method::Srs, kRolesCA, 500, RoleStats{-0.2390, 0.2390, 0.008, 0.0651},
                     CountStats{266.0, 0, 266, 166, 100, 100}),
        make_summary(Method::Srsq, kRolesCA, 500, RoleStats{-0.0079, 0.0079, 0.010, 0.0101},
                     CountStats{454.0, 160, 294, 194, 100, 100}));
    const auto run_b = compare(
        make_summary(Method::Srs, kRolesCA, 1000, RoleStats{-0.2386, 0.2386, 0.008, 0.0649},
                     CountStats{267.1, 0, 267.1, 167.1, 100, 100}),
        make_summary(Method::Srsq, kRolesCA, 1000, RoleStats{-0.0064, 0.0064, 0.010, 0.0100},
                     CountStats{454.9, 160.8, 294.1, 194.1, 100, 100}));
    const auto stab = stability_check(run_a, run_b);
    const auto& gap = stab.gap.role_stats[role_index(Role::Auxiliary)];
    CHECK(run_a.diff.role_stats[0].bias_abs == doctest::Approx(-0.2311).epsilon(1e-9));
    CHECK(run_b.diff.role_stats[0].bias_abs == doctest::Approx(-0.2322).epsilon(1e-9));
    CHECK(gap.bias_abs == doctest::Approx(-0.0011).epsilon(1e-6));
    // Contacted diffs: 187.8 in run B, 188.0 in run A.
    CHECK(stab.gap.counts.contacted == doctest::Approx(-0.2).epsilon(1e-6));

    const auto zero = stability_check(run_a, run_a);
    CHECK(zero.gap.role_stats[0].bias_abs == doctest::Approx(0.0));
    CHECK(zero.gap.counts.contacted == doctest::Approx(0.0));

    auto other = run_b;
    other.srs.roles = RoleAssignment{Var::A, Var::B, Var::C};
    other.srsq.roles = other.srs.roles;
    CHECK_THROWS_AS(stability_check(run_a, other), IncomparableSummaries);
}
