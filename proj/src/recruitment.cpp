// Copyright 2026 The srsq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and limitations under the License.

#include "srsq/recruitment.hpp"

#include <limits>
#include <span>
#include <stdexcept>

namespace srsq {
namespace {

ReplicationOutcome run_walk(const OrderedRoster& roster, const SamplingDesign& design,
                            bool enforce_quotas) {
    const std::size_t num_strata = design.num_strata();
    const std::size_t num_bins = design.num_bins();
    const auto& targets = design.stratum_targets();
    const auto& caps = design.quota_caps();

    ReplicationOutcome out;
    out.method = enforce_quotas ? Method::Srsq : Method::Srs;
    out.stratum_fill.assign(num_strata, 0);
    out.stratum_contacted.assign(num_strata, 0);
    out.bin_fill.assign(num_bins, 0);

    std::size_t full_strata = 0;
    for (int t : targets)
        if (t == 0) ++full_strata;

    for (const RosterEntry& entry : roster.entries) {
        if (full_strata == num_strata) break;
        const auto s = static_cast<std::size_t>(entry.stratum);
        if (out.stratum_fill[s] == targets[s]) continue;  // passed over, not contacted

        ++out.counts.contacted;
        ++out.stratum_contacted[s];

        const auto b = static_cast<std::size_t>(design.bin_of(entry.record));
        if (enforce_quotas && out.bin_fill[b] == caps[b]) {
            ++out.counts.excluded_by_quota;  // draw stays unused
            continue;
        }
        ++out.counts.invited;
        if (entry.draw < design.agreement_probability(entry.record)) {
            ++out.counts.agreed;
            out.accepted.push_back(entry.record);
            ++out.stratum_fill[s];
            ++out.bin_fill[b];
            if (out.stratum_fill[s] > targets[s])
                throw std::logic_error("stratum fill exceeded its target");
            if (enforce_quotas && out.bin_fill[b] > caps[b])
                throw std::logic_error("bin fill exceeded its cap");
            if (out.stratum_fill[s] == targets[s]) ++full_strata;
        } else {
            ++out.counts.declined;
        }
    }

    out.achieved = static_cast<int>(out.accepted.size());
    if (out.achieved == 0) {
        out.sample_mean_z.fill(std::numeric_limits<double>::quiet_NaN());
    } else {
        std::array<double, kNumVars> sums{};
        for (std::uint32_t rec : out.accepted)
            for (std::size_t k = 0; k < kNumVars; ++k)
                sums[k] += design.frame().records()[rec].z[k];
        for (std::size_t k = 0; k < kNumVars; ++k)
            out.sample_mean_z[k] = sums[k] / out.achieved;
    }
    return out;
}

} // namespace

OrderedRoster recruitment_order(const SamplingDesign& design, RngStream& rng) {
    const auto& members = design.stratum_members();
    const std::size_t num_strata = members.size();

    // Random permutation within each stratum, strata in index order.
    std::vector<std::vector<std::uint32_t>> shuffled(num_strata);
    std::size_t max_size = 0;
    for (std::size_t s = 0; s < num_strata; ++s) {
        shuffled[s] = members[s];
        shuffle(std::span<std::uint32_t>(shuffled[s]), rng);
        max_size = std::max(max_size, shuffled[s].size());
    }

    OrderedRoster roster;
    roster.entries.reserve(design.frame().size());

    // Pool by rank; the strata present at each rank appear in random order.
    std::vector<std::uint32_t> present;
    present.reserve(num_strata);
    for (std::size_t rank = 1; rank <= max_size; ++rank) {
        present.clear();
        for (std::size_t s = 0; s < num_strata; ++s)
            if (shuffled[s].size() >= rank) present.push_back(static_cast<std::uint32_t>(s));
        shuffle(std::span<std::uint32_t>(present), rng);
        for (std::uint32_t s : present) {
            roster.entries.push_back(RosterEntry{shuffled[s][rank - 1],
                                                 static_cast<std::int32_t>(s),
                                                 static_cast<std::int32_t>(rank), 0.0});
        }
    }

    for (auto& entry : roster.entries) entry.draw = rng.next_double();
    return roster;
}

ReplicationOutcome run_srs(const OrderedRoster& roster, const SamplingDesign& design) {
    return run_walk(roster, design, /*enforce_quotas=*/false);
}

ReplicationOutcome run_srsq(const OrderedRoster& roster, const SamplingDesign& design) {
    return run_walk(roster, design, /*enforce_quotas=*/true);
}

PairedOutcome run_replication(const SamplingDesign& design, std::uint64_t replication_index,
                              std::uint64_t master_seed) {
    StreamKey key(master_seed);
    key.absorb(design.frame().name());
    key.absorb(design.roles().label());
    key.absorb(replication_index);
    RngStream rng(key);

    const OrderedRoster roster = recruitment_order(design, rng);
    return PairedOutcome{run_srs(roster, design), run_srsq(roster, design)};
}

} // namespace srsq
