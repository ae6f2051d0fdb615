// Copyright 2026 The srsq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and limitations under the License.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "srsq/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Stratified random sampling with quotas: recruitment simulation engine"};
    app.require_subcommand(1);

    std::string spec_path, csv_path;
    CLI::App* gen = app.add_subcommand("gen-pop", "Generate a synthetic population CSV");
    gen->add_option("spec", spec_path, "Synthetic population spec (JSON)")->required();
    gen->add_option("out", csv_path, "Output CSV path")->required();

    std::string config_path;
    srsq::SimulateOverrides overrides;
    CLI::App* sim = app.add_subcommand("simulate", "Run the paired SRS/SRSQ experiment");
    sim->add_option("config", config_path, "Experiment config (JSON)")->required();
    sim->add_option("--seed", overrides.seed, "Override the master seed");
    sim->add_option("--replications", overrides.replications, "Override the replication count");
    sim->add_option("--jobs", overrides.jobs, "Replication worker threads (0 = auto)");

    std::string results_dir, figure;
    CLI::App* rep = app.add_subcommand("report", "Emit plot data from simulation results");
    rep->add_option("results_dir", results_dir, "Directory written by simulate")->required();
    rep->add_option("--figure", figure,
                    "One of aux_bias, aux_var, strat_bias, strat_var, unobs_bias, "
                    "unobs_var, achieved_n")
        ->required();

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed()) return srsq::cmd_gen_pop(spec_path, csv_path, std::cout, std::cerr);
    if (sim->parsed()) return srsq::cmd_simulate(config_path, overrides, std::cout, std::cerr);
    if (rep->parsed()) return srsq::cmd_report(results_dir, figure, std::cout, std::cerr);
    return 1;
}
