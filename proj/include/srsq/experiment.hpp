// Copyright 2026 The srsq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and limitations under the License.

#ifndef SRSQ_EXPERIMENT_HPP
#define SRSQ_EXPERIMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "srsq/design.hpp"
#include "srsq/metrics.hpp"
#include "srsq/population.hpp"

namespace srsq {

struct PopulationFilter {
    std::vector<std::string> groups;  // keep only these population names; empty keeps all
    std::int64_t min_size = 0;
};

// Exactly one of csv_path / synthetic is set.
struct PopulationSource {
    std::string csv_path;
    std::optional<SyntheticSpec> synthetic;
    std::string name = "all";  // frame name for CSV loads
};

struct ExperimentConfig {
    PopulationSource source;
    DesignParams design;
    std::int64_t replications = 1000;
    std::uint64_t master_seed = 12345;
    PopulationFilter filter;
    std::vector<int> permutations;  // 1-based indices into the fixed order; empty = all six
    std::string output_dir = "out";
    bool trace = false;
    int jobs = 0;  // replication worker threads; 0 = hardware concurrency
};

// Parses the config JSON (strict: unknown keys are rejected). Relative
// paths are resolved against base_dir, normally the config file's directory.
ExperimentConfig config_from_json(const std::string& json_text, const std::string& base_dir);

SyntheticSpec synthetic_spec_from_json(const std::string& json_text);

// Writes the frame's raw values in the loadable CSV format; doubles are
// emitted with enough digits to round-trip exactly.
void write_population_csv(const PopulationFrame& frame, std::ostream& out);

// Runs the full experiment: partition, filter, per population x permutation
// paired replications, report/averaged JSON plus metrics.csv and
// skipped.csv under output_dir. Output bytes depend only on config content
// (jobs excluded). Progress goes to log. Throws on fatal errors.
void run_experiment(const ExperimentConfig& config, std::ostream& log);

struct SimulateOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::int64_t> replications;
    std::optional<int> jobs;
};

// CLI entry points; diagnostics to err, exit-status return.
int cmd_gen_pop(const std::string& spec_path, const std::string& out_path, std::ostream& out,
                std::ostream& err);
int cmd_simulate(const std::string& config_path, const SimulateOverrides& overrides,
                 std::ostream& out, std::ostream& err);
int cmd_report(const std::string& results_dir, const std::string& figure, std::ostream& out,
               std::ostream& err);

} // namespace srsq

#endif // SRSQ_EXPERIMENT_HPP
