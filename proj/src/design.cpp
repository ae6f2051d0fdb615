// Copyright 2026 The srsq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and limitations under the License.

#include "srsq/design.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "srsq/errors.hpp"

namespace srsq {

std::string RoleAssignment::label() const {
    std::string out = "strat_";
    out.push_back(var_tag(stratifier));
    out += "_aux_";
    out.push_back(var_tag(auxiliary));
    return out;
}

std::array<RoleAssignment, 6> enumerate_role_permutations() {
    return {{
        {Var::C, Var::A, Var::B},
        {Var::C, Var::B, Var::A},
        {Var::A, Var::C, Var::B},
        {Var::A, Var::B, Var::C},
        {Var::B, Var::C, Var::A},
        {Var::B, Var::A, Var::C},
    }};
}

std::size_t BinRule::bin_of(double value) const {
    // Number of cut points <= value; duplicates skip the collapsed bins.
    const auto it = std::upper_bound(cut_points.begin(), cut_points.end(), value);
    return static_cast<std::size_t>(it - cut_points.begin());
}

BinRule quantile_bins(std::span<const double> values, int k) {
    const std::size_t n = values.size();
    if (n == 0) throw InvalidBinCount(k, 0);
    if (k < 1 || static_cast<std::size_t>(k) > n) throw InvalidBinCount(k, n);

    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    BinRule rule;
    rule.cut_points.reserve(static_cast<std::size_t>(k) - 1);
    for (int j = 1; j < k; ++j) {
        // 1-based rank ceil(N*j/k).
        const std::size_t rank = (n * static_cast<std::size_t>(j) +
                                  static_cast<std::size_t>(k) - 1) /
                                 static_cast<std::size_t>(k);
        rule.cut_points.push_back(sorted[rank - 1]);
    }
    rule.population_counts.assign(static_cast<std::size_t>(k), 0);
    for (double v : values) ++rule.population_counts[rule.bin_of(v)];
    return rule;
}

std::vector<int> proportional_targets(std::span<const std::int64_t> counts, int n_target) {
    if (n_target <= 0) throw InvalidTarget(n_target);
    std::int64_t total = 0;
    for (std::int64_t c : counts) {
        if (c < 0) throw std::invalid_argument("negative cell count");
        total += c;
    }
    if (total <= 0) throw std::invalid_argument("cell counts sum to zero");

    std::vector<int> out(counts.size(), 0);
    std::vector<std::pair<std::int64_t, std::size_t>> remainders;  // (-rem, index)
    int assigned = 0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const std::int64_t num = static_cast<std::int64_t>(n_target) * counts[i];
        out[i] = static_cast<int>(num / total);
        assigned += out[i];
        remainders.emplace_back(-(num % total), i);
    }
    std::sort(remainders.begin(), remainders.end());
    for (int left = n_target - assigned, i = 0; left > 0; --left, ++i)
        ++out[remainders[static_cast<std::size_t>(i)].second];
    return out;
}

SamplingDesign build_design(const PopulationFrame& frame, const RoleAssignment& roles,
                            const DesignParams& params) {
    if (!frame.standardized())
        throw std::invalid_argument("build_design requires a standardized frame");
    if (params.p_low < 0.0 || params.p_low > 1.0 || params.p_high < 0.0 ||
        params.p_high > 1.0)
        throw std::invalid_argument("agreement probabilities must lie in [0,1]");

    const std::size_t n = frame.size();
    const std::size_t strat = var_index(roles.stratifier);
    const std::size_t aux = var_index(roles.auxiliary);

    std::vector<double> strat_values(n), aux_values(n);
    for (std::size_t i = 0; i < n; ++i) {
        strat_values[i] = frame.records()[i].z[strat];
        aux_values[i] = frame.records()[i].z[aux];
    }

    SamplingDesign d;
    d.frame_ = &frame;
    d.roles_ = roles;
    d.params_ = params;

    const BinRule strata_rule = quantile_bins(strat_values, params.k_strata);
    d.stratum_of_.resize(n);
    d.stratum_members_.resize(strata_rule.num_bins());
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t s = strata_rule.bin_of(strat_values[i]);
        d.stratum_of_[i] = static_cast<int>(s);
        d.stratum_members_[s].push_back(static_cast<std::uint32_t>(i));
    }
    d.stratum_targets_ = proportional_targets(strata_rule.population_counts, params.n_target);

    d.quota_rule_ = quantile_bins(aux_values, params.k_bins);
    d.bin_of_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        d.bin_of_[i] = static_cast<int>(d.quota_rule_.bin_of(aux_values[i]));
    d.quota_caps_ = proportional_targets(d.quota_rule_.population_counts, params.n_target);

    // Bottom half on the auxiliary variable: exactly floor(N/2) schools,
    // ranked by value with school_id as the tie-break.
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t lhs, std::uint32_t rhs) {
        if (aux_values[lhs] != aux_values[rhs]) return aux_values[lhs] < aux_values[rhs];
        return frame.records()[lhs].school_id < frame.records()[rhs].school_id;
    });
    d.bottom_half_.assign(n, 0);
    for (std::size_t i = 0; i < n / 2; ++i) d.bottom_half_[order[i]] = 1;

    return d;
}

double agreement_probability(const std::string& school_id, const SamplingDesign& design) {
    return design.agreement_probability(design.frame().index_of(school_id));
}

} // namespace srsq
