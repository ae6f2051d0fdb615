// Copyright 2026 The srsq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and limitations under the License.

#include "srsq/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "srsq/errors.hpp"

namespace srsq {
namespace {

RoleStats sub(const RoleStats& x, const RoleStats& y) {
    return RoleStats{x.mean_signed - y.mean_signed, x.bias_abs - y.bias_abs,
                     x.variance - y.variance, x.mse - y.mse};
}

CountStats sub(const CountStats& x, const CountStats& y) {
    return CountStats{x.contacted - y.contacted,
                      x.excluded_by_quota - y.excluded_by_quota,
                      x.invited - y.invited,
                      x.declined - y.declined,
                      x.agreed - y.agreed,
                      x.achieved - y.achieved};
}

SummaryDelta delta(const MethodSummary& srsq, const MethodSummary& srs) {
    SummaryDelta d;
    for (std::size_t r = 0; r < 3; ++r) d.role_stats[r] = sub(srsq.role_stats[r], srs.role_stats[r]);
    d.counts = sub(srsq.counts, srs.counts);
    return d;
}

} // namespace

MethodSummary summarize(std::span<const ReplicationOutcome> outcomes,
                        const RoleAssignment& roles) {
    if (outcomes.empty()) throw NoReplications();
    const Method method = outcomes.front().method;

    MethodSummary s;
    s.method = method;
    s.roles = roles;
    s.replications = static_cast<std::int64_t>(outcomes.size());

    std::int64_t nonzero = 0;
    for (const auto& o : outcomes) {
        if (o.method != method) throw std::invalid_argument("mixed method tags in summarize");
        s.counts.contacted += static_cast<double>(o.counts.contacted);
        s.counts.excluded_by_quota += static_cast<double>(o.counts.excluded_by_quota);
        s.counts.invited += static_cast<double>(o.counts.invited);
        s.counts.declined += static_cast<double>(o.counts.declined);
        s.counts.agreed += static_cast<double>(o.counts.agreed);
        s.counts.achieved += static_cast<double>(o.achieved);
        if (o.achieved > 0) ++nonzero;
    }
    const double r_total = static_cast<double>(outcomes.size());
    s.counts.contacted /= r_total;
    s.counts.excluded_by_quota /= r_total;
    s.counts.invited /= r_total;
    s.counts.declined /= r_total;
    s.counts.agreed /= r_total;
    s.counts.achieved /= r_total;
    s.zero_size = static_cast<double>(s.replications - nonzero);

    for (Role role : kRoles) {
        RoleStats& st = s.role_stats[role_index(role)];
        if (nonzero == 0) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            st = RoleStats{nan, nan, nan, nan};
            continue;
        }
        const std::size_t k = var_index(role_variable(roles, role));
        double sum = 0.0;
        for (const auto& o : outcomes)
            if (o.achieved > 0) sum += o.sample_mean_z[k];
        const double mean = sum / static_cast<double>(nonzero);
        double ssd = 0.0, sq = 0.0;
        for (const auto& o : outcomes) {
            if (o.achieved == 0) continue;
            const double x = o.sample_mean_z[k];
            ssd += (x - mean) * (x - mean);
            sq += x * x;
        }
        st.mean_signed = mean;
        st.bias_abs = std::fabs(mean);
        st.variance = ssd / static_cast<double>(nonzero);
        st.mse = sq / static_cast<double>(nonzero);
        if (std::fabs(st.mse - (mean * mean + st.variance)) > 1e-12)
            throw std::logic_error("mse decomposition violated");
    }
    return s;
}

ComparisonReport compare(const MethodSummary& srs, const MethodSummary& srsq) {
    if (srs.method != Method::Srs || srsq.method != Method::Srsq)
        throw IncomparableSummaries("summaries carry the wrong method tags");
    if (srs.roles != srsq.roles)
        throw IncomparableSummaries("role assignments differ");
    if (srs.replications != srsq.replications)
        throw IncomparableSummaries("replication counts differ");
    return ComparisonReport{srs, srsq, delta(srsq, srs)};
}

ComparisonReport average_over_permutations(std::span<const ComparisonReport> reports) {
    const auto expected = enumerate_role_permutations();
    if (reports.size() != expected.size())
        throw PermutationSetError("expected 6 reports, got " + std::to_string(reports.size()));

    std::array<bool, 6> seen{};
    for (const auto& rep : reports) {
        if (!rep.srs.roles)
            throw PermutationSetError("report lacks a role assignment");
        bool matched = false;
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (*rep.srs.roles == expected[i]) {
                if (seen[i])
                    throw PermutationSetError("duplicate permutation " + expected[i].label());
                seen[i] = true;
                matched = true;
                break;
            }
        }
        if (!matched) throw PermutationSetError("unrecognized role assignment");
        if (rep.srs.replications != reports.front().srs.replications)
            throw IncomparableSummaries("replication counts differ across permutations");
    }

    auto average_side = [&](Method method) {
        MethodSummary avg;
        avg.method = method;
        avg.roles = std::nullopt;
        avg.replications = reports.front().srs.replications;
        const double n = static_cast<double>(reports.size());
        for (const auto& rep : reports) {
            const MethodSummary& s = method == Method::Srs ? rep.srs : rep.srsq;
            avg.zero_size += s.zero_size / n;
            for (std::size_t r = 0; r < 3; ++r) {
                avg.role_stats[r].mean_signed += s.role_stats[r].mean_signed / n;
                avg.role_stats[r].bias_abs += s.role_stats[r].bias_abs / n;
                avg.role_stats[r].variance += s.role_stats[r].variance / n;
                avg.role_stats[r].mse += s.role_stats[r].mse / n;
            }
            avg.counts.contacted += s.counts.contacted / n;
            avg.counts.excluded_by_quota += s.counts.excluded_by_quota / n;
            avg.counts.invited += s.counts.invited / n;
            avg.counts.declined += s.counts.declined / n;
            avg.counts.agreed += s.counts.agreed / n;
            avg.counts.achieved += s.counts.achieved / n;
        }
        return avg;
    };

    const MethodSummary srs = average_side(Method::Srs);
    const MethodSummary srsq = average_side(Method::Srsq);
    return ComparisonReport{srs, srsq, delta(srsq, srs)};
}

StabilityReport stability_check(const ComparisonReport& run_a, const ComparisonReport& run_b) {
    if (run_a.srs.roles != run_b.srs.roles)
        throw IncomparableSummaries("stability check across different role assignments");
    StabilityReport rep{run_a, run_b, SummaryDelta{}};
    for (std::size_t r = 0; r < 3; ++r)
        rep.gap.role_stats[r] = sub(run_b.diff.role_stats[r], run_a.diff.role_stats[r]);
    rep.gap.counts = sub(run_b.diff.counts, run_a.diff.counts);
    return rep;
}

} // namespace srsq
