// Copyright 2026 The srsq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and limitations under the License.

#ifndef SRSQ_RECRUITMENT_HPP
#define SRSQ_RECRUITMENT_HPP

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "srsq/design.hpp"
#include "srsq/population.hpp"
#include "srsq/rng.hpp"

namespace srsq {

enum class Method { Srs, Srsq };

constexpr std::string_view method_name(Method m) {
    return m == Method::Srs ? "SRS" : "SRSQ";
}

// contacted = excluded_by_quota + invited; invited = declined + agreed.
struct StageCounts {
    std::int64_t contacted = 0;
    std::int64_t excluded_by_quota = 0;
    std::int64_t invited = 0;
    std::int64_t declined = 0;
    std::int64_t agreed = 0;
};

struct RosterEntry {
    std::uint32_t record;  // index into frame.records()
    std::int32_t stratum;
    std::int32_t rank;     // 1-based within-stratum rank
    double draw;           // agreement draw u in [0,1)
};

// Entries sorted by rank; among equal ranks, strata appear in random order.
// The same roster (ordering + draws) serves both methods of a replication.
struct OrderedRoster {
    std::vector<RosterEntry> entries;
};

struct ReplicationOutcome {
    Method method = Method::Srs;
    std::vector<std::uint32_t> accepted;  // record indices, acceptance order
    std::vector<int> stratum_fill;
    std::vector<int> stratum_contacted;
    std::vector<int> bin_fill;
    StageCounts counts;
    int achieved = 0;
    // Mean z per variable over accepted schools; NaN when achieved == 0.
    std::array<double, kNumVars> sample_mean_z{};
};

struct PairedOutcome {
    ReplicationOutcome srs;
    ReplicationOutcome srsq;
};

// Randomly permutes each stratum, pools by rank with equal-rank strata in
// random order, and attaches one agreement draw per school. Fully
// deterministic given the stream state.
OrderedRoster recruitment_order(const SamplingDesign& design, RngStream& rng);

// Walks the roster in order. Schools in already-full strata are passed over
// without being contacted; everyone else is contacted and invited, and
// agrees iff draw < agreement probability. Stops when every stratum is full
// or the roster is exhausted. Shortfall is a valid outcome.
ReplicationOutcome run_srs(const OrderedRoster& roster, const SamplingDesign& design);

// Same walk, except that after contact the school's quota bin is checked:
// when the bin is at its cap the school is excluded (contacted, never
// invited, draw unused). Acceptance fills both the stratum and the bin.
ReplicationOutcome run_srsq(const OrderedRoster& roster, const SamplingDesign& design);

// Builds one roster from a stream keyed on (master_seed, population name,
// permutation label, replication_index) and runs both methods on it.
PairedOutcome run_replication(const SamplingDesign& design, std::uint64_t replication_index,
                              std::uint64_t master_seed);

} // namespace srsq

#endif // SRSQ_RECRUITMENT_HPP
