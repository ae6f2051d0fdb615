// Copyright 2026 The srsq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and limitations under the License.

#include "srsq/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "srsq/errors.hpp"
#include "srsq/recruitment.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace srsq {
namespace {

// Shortest representation that round-trips; used for every emitted double
// so artifacts are byte-stable.
std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out.push_back('"');
    return out;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Strict config parsing: misspelled keys fail loudly instead of silently
// falling back to defaults.
void require_keys(const json& j, std::initializer_list<const char*> allowed,
                  const std::string& where) {
    if (!j.is_object()) throw std::runtime_error(where + ": expected a JSON object");
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* key : allowed)
            if (item.key() == key) { ok = true; break; }
        if (!ok) throw std::runtime_error(where + ": unknown key '" + item.key() + "'");
    }
}

std::int64_t get_int(const json& j, const std::string& where, std::int64_t lo,
                     std::int64_t hi) {
    if (!j.is_number_integer())
        throw std::runtime_error(where + ": expected an integer");
    const std::int64_t v = j.get<std::int64_t>();
    if (v < lo || v > hi)
        throw std::runtime_error(where + ": value " + std::to_string(v) + " out of range");
    return v;
}

std::uint64_t get_seed(const json& j, const std::string& where) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer()) {
        const std::int64_t v = j.get<std::int64_t>();
        if (v < 0) throw std::runtime_error(where + ": seed must be non-negative");
        return static_cast<std::uint64_t>(v);
    }
    throw std::runtime_error(where + ": expected an integer seed");
}

double get_number(const json& j, const std::string& where) {
    if (!j.is_number()) throw std::runtime_error(where + ": expected a number");
    return j.get<double>();
}

Marginal marginal_from_string(const std::string& s, const std::string& where) {
    if (s == "normal") return Marginal::Normal;
    if (s == "lognormal") return Marginal::Lognormal;
    if (s == "bounded_percent" || s == "bounded-percent") return Marginal::BoundedPercent;
    throw std::runtime_error(where + ": unknown marginal '" + s +
                             "' (expected normal, lognormal or bounded_percent)");
}

SyntheticSpec synthetic_from(const json& j, const std::string& where) {
    require_keys(j, {"n_schools", "correlation", "marginals", "seed", "name", "group_id"},
                 where);
    SyntheticSpec spec;
    if (!j.contains("n_schools")) throw std::runtime_error(where + ": n_schools is required");
    spec.n_schools = static_cast<std::size_t>(
        get_int(j.at("n_schools"), where + ".n_schools", 1, 100000000));
    if (j.contains("seed")) spec.seed = get_seed(j.at("seed"), where + ".seed");
    if (j.contains("name")) spec.name = j.at("name").get<std::string>();
    if (j.contains("group_id")) spec.group_id = j.at("group_id").get<std::string>();
    if (j.contains("correlation")) {
        const json& m = j.at("correlation");
        if (!m.is_array() || m.size() != kNumVars)
            throw std::runtime_error(where + ".correlation: expected a 3x3 matrix");
        for (std::size_t i = 0; i < kNumVars; ++i) {
            if (!m[i].is_array() || m[i].size() != kNumVars)
                throw std::runtime_error(where + ".correlation: expected a 3x3 matrix");
            for (std::size_t k = 0; k < kNumVars; ++k)
                spec.correlation[i][k] = get_number(m[i][k], where + ".correlation");
        }
    }
    if (j.contains("marginals")) {
        const json& m = j.at("marginals");
        if (!m.is_array() || m.size() != kNumVars)
            throw std::runtime_error(where + ".marginals: expected 3 entries");
        for (std::size_t i = 0; i < kNumVars; ++i)
            spec.marginals[i] =
                marginal_from_string(m[i].get<std::string>(), where + ".marginals");
    }
    return spec;
}

ExperimentConfig config_from(const json& j, const fs::path& base) {
    require_keys(j,
                 {"population", "n_target", "k_strata", "k_bins", "p_low", "p_high",
                  "replications", "master_seed", "filter", "permutations", "output_dir",
                  "trace", "jobs"},
                 "config");
    ExperimentConfig cfg;
    if (!j.contains("population"))
        throw std::runtime_error("config: population is required");

    const json& pop = j.at("population");
    if (pop.contains("synthetic")) {
        require_keys(pop, {"synthetic"}, "config.population");
        cfg.source.synthetic = synthetic_from(pop.at("synthetic"), "config.population.synthetic");
        cfg.source.name = cfg.source.synthetic->name;
    } else {
        require_keys(pop, {"csv", "name"}, "config.population");
        if (!pop.contains("csv"))
            throw std::runtime_error("config.population: needs either csv or synthetic");
        cfg.source.csv_path = (base / pop.at("csv").get<std::string>()).string();
        if (pop.contains("name")) cfg.source.name = pop.at("name").get<std::string>();
    }

    if (j.contains("n_target"))
        cfg.design.n_target = static_cast<int>(get_int(j.at("n_target"), "config.n_target", 1, 1000000));
    if (j.contains("k_strata"))
        cfg.design.k_strata = static_cast<int>(get_int(j.at("k_strata"), "config.k_strata", 1, 1000000));
    if (j.contains("k_bins"))
        cfg.design.k_bins = static_cast<int>(get_int(j.at("k_bins"), "config.k_bins", 1, 1000000));
    if (j.contains("p_low")) cfg.design.p_low = get_number(j.at("p_low"), "config.p_low");
    if (j.contains("p_high")) cfg.design.p_high = get_number(j.at("p_high"), "config.p_high");
    if (cfg.design.p_low < 0.0 || cfg.design.p_low > 1.0 || cfg.design.p_high < 0.0 ||
        cfg.design.p_high > 1.0)
        throw std::runtime_error("config: p_low/p_high must lie in [0,1]");
    if (j.contains("replications"))
        cfg.replications = get_int(j.at("replications"), "config.replications", 1, 100000000);
    if (j.contains("master_seed"))
        cfg.master_seed = get_seed(j.at("master_seed"), "config.master_seed");
    if (j.contains("filter")) {
        const json& f = j.at("filter");
        require_keys(f, {"groups", "min_size"}, "config.filter");
        if (f.contains("groups")) {
            if (!f.at("groups").is_array())
                throw std::runtime_error("config.filter.groups: expected an array");
            for (const auto& g : f.at("groups"))
                cfg.filter.groups.push_back(g.get<std::string>());
        }
        if (f.contains("min_size"))
            cfg.filter.min_size = get_int(f.at("min_size"), "config.filter.min_size", 0,
                                          std::numeric_limits<std::int64_t>::max());
    }
    if (j.contains("permutations")) {
        if (!j.at("permutations").is_array())
            throw std::runtime_error("config.permutations: expected an array");
        for (const auto& p : j.at("permutations"))
            cfg.permutations.push_back(
                static_cast<int>(get_int(p, "config.permutations", 1, 6)));
        std::sort(cfg.permutations.begin(), cfg.permutations.end());
        if (std::adjacent_find(cfg.permutations.begin(), cfg.permutations.end()) !=
            cfg.permutations.end())
            throw std::runtime_error("config.permutations: duplicate entry");
    }
    if (j.contains("output_dir"))
        cfg.output_dir = (base / j.at("output_dir").get<std::string>()).string();
    else
        cfg.output_dir = (base / cfg.output_dir).string();
    if (j.contains("trace")) {
        if (!j.at("trace").is_boolean())
            throw std::runtime_error("config.trace: expected a boolean");
        cfg.trace = j.at("trace").get<bool>();
    }
    if (j.contains("jobs"))
        cfg.jobs = static_cast<int>(get_int(j.at("jobs"), "config.jobs", 0, 4096));
    return cfg;
}

// Population names double as directory names; anything unsafe is mapped to
// '_' and collisions are rejected rather than silently merged.
std::string sanitize_name(const std::string& name) {
    std::string out;
    for (char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                        (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
        out.push_back(ok ? c : '_');
    }
    if (out.empty() || out == "." || out == "..") out = "_";
    return out;
}

template <class Body>
void parallel_for(std::int64_t count, int jobs, const Body& body) {
    int workers = jobs > 0 ? jobs : static_cast<int>(std::thread::hardware_concurrency());
    if (workers < 1) workers = 1;
    if (static_cast<std::int64_t>(workers) > count) workers = static_cast<int>(count);
    if (workers <= 1) {
        for (std::int64_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&]() {
        try {
            while (true) {
                const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
                if (i >= count) break;
                body(i);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!error) error = std::current_exception();
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

json role_stats_json(const RoleStats& s) {
    return json{{"bias_signed", s.mean_signed},
                {"bias_abs", s.bias_abs},
                {"variance", s.variance},
                {"mse", s.mse}};
}

json counts_json(const CountStats& c) {
    return json{{"contacted", c.contacted}, {"excluded", c.excluded_by_quota},
                {"invited", c.invited},     {"declined", c.declined},
                {"agreed", c.agreed},       {"achieved", c.achieved}};
}

json roles_json(const RoleAssignment& roles) {
    return json{{"stratifier", std::string(var_name(roles.stratifier))},
                {"auxiliary", std::string(var_name(roles.auxiliary))},
                {"unobserved", std::string(var_name(roles.unobserved))}};
}

json summary_json(const MethodSummary& s) {
    json out{{"replications", s.replications},
             {"zero_size", s.zero_size},
             {"counts", counts_json(s.counts)}};
    for (Role role : kRoles)
        out[std::string(role_name(role))] = role_stats_json(s.role_stats[role_index(role)]);
    if (s.roles) out["roles"] = roles_json(*s.roles);
    return out;
}

json delta_json(const SummaryDelta& d) {
    json out{{"counts", counts_json(d.counts)}};
    for (Role role : kRoles)
        out[std::string(role_name(role))] = role_stats_json(d.role_stats[role_index(role)]);
    return out;
}

json report_json(const std::string& population, std::size_t n, const std::string& permutation,
                 const ComparisonReport& rep, const ExperimentConfig& cfg, bool feasible) {
    json out{{"population", population},
             {"N", n},
             {"permutation", permutation},
             {"replications", rep.srs.replications},
             {"master_seed", cfg.master_seed},
             {"feasible", feasible},
             {"params",
              json{{"n_target", cfg.design.n_target},
                   {"k_strata", cfg.design.k_strata},
                   {"k_bins", cfg.design.k_bins},
                   {"p_low", cfg.design.p_low},
                   {"p_high", cfg.design.p_high}}},
             {"srs", summary_json(rep.srs)},
             {"srsq", summary_json(rep.srsq)},
             {"diff", delta_json(rep.diff)}};
    if (rep.srs.roles) out["roles"] = roles_json(*rep.srs.roles);
    return out;
}

struct MetricsRow {
    std::string population;
    std::size_t n = 0;
    std::string permutation;
    std::string method;
    std::string role;
    RoleStats stats;
    CountStats counts;
    bool feasible = false;
};

void append_rows(std::vector<MetricsRow>& rows, const std::string& population, std::size_t n,
                 const std::string& permutation, const ComparisonReport& rep, bool feasible) {
    for (const MethodSummary* s : {&rep.srs, &rep.srsq}) {
        for (Role role : kRoles) {
            MetricsRow row;
            row.population = population;
            row.n = n;
            row.permutation = permutation;
            row.method = std::string(method_name(s->method));
            row.role = std::string(role_name(role));
            row.stats = s->role_stats[role_index(role)];
            row.counts = s->counts;
            row.feasible = feasible;
            rows.push_back(std::move(row));
        }
    }
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
    std::string out =
        "population,N,permutation,method,role,bias_signed,bias_abs,variance,mse,"
        "contacted,excluded,invited,declined,agreed,achieved_n,feasible\n";
    for (const auto& r : rows) {
        out += csv_escape(r.population);
        out += ',' + std::to_string(r.n);
        out += ',' + csv_escape(r.permutation);
        out += ',' + r.method;
        out += ',' + r.role;
        out += ',' + format_double(r.stats.mean_signed);
        out += ',' + format_double(r.stats.bias_abs);
        out += ',' + format_double(r.stats.variance);
        out += ',' + format_double(r.stats.mse);
        out += ',' + format_double(r.counts.contacted);
        out += ',' + format_double(r.counts.excluded_by_quota);
        out += ',' + format_double(r.counts.invited);
        out += ',' + format_double(r.counts.declined);
        out += ',' + format_double(r.counts.agreed);
        out += ',' + format_double(r.counts.achieved);
        out += r.feasible ? ",true\n" : ",false\n";
    }
    return out;
}

std::string trace_jsonl(const std::vector<ReplicationOutcome>& srs,
                        const std::vector<ReplicationOutcome>& srsq) {
    std::string out;
    for (std::size_t r = 0; r < srs.size(); ++r) {
        for (const ReplicationOutcome* o : {&srs[r], &srsq[r]}) {
            json line{{"replication", r},
                      {"method", std::string(method_name(o->method))},
                      {"counts",
                       json{{"contacted", o->counts.contacted},
                            {"excluded", o->counts.excluded_by_quota},
                            {"invited", o->counts.invited},
                            {"declined", o->counts.declined},
                            {"agreed", o->counts.agreed}}},
                      {"achieved", o->achieved},
                      {"sample_mean_z",
                       json{{"var_a", o->sample_mean_z[0]},
                            {"var_b", o->sample_mean_z[1]},
                            {"var_c", o->sample_mean_z[2]}}}};
            out += line.dump();
            out += '\n';
        }
    }
    return out;
}

PopulationFrame load_source(const PopulationSource& source) {
    if (source.synthetic) return generate_synthetic(*source.synthetic);
    std::ifstream in(source.csv_path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open population CSV: " + source.csv_path);
    return load_population(in, source.name);
}

} // namespace

ExperimentConfig config_from_json(const std::string& json_text, const std::string& base_dir) {
    return config_from(json::parse(json_text), fs::path(base_dir));
}

SyntheticSpec synthetic_spec_from_json(const std::string& json_text) {
    return synthetic_from(json::parse(json_text), "spec");
}

void write_population_csv(const PopulationFrame& frame, std::ostream& out) {
    out << "school_id,group_id,var_a,var_b,var_c\n";
    for (const auto& r : frame.records()) {
        out << csv_escape(r.school_id) << ',' << csv_escape(r.group_id);
        for (std::size_t k = 0; k < kNumVars; ++k) out << ',' << format_double(r.value[k]);
        out << '\n';
    }
}

void run_experiment(const ExperimentConfig& config, std::ostream& log) {
    const PopulationFrame raw = load_source(config.source);
    const PartitionResult parts = partition_by_group(raw);

    std::vector<std::pair<std::string, std::string>> skips;  // (population, reason)
    for (const auto& s : parts.skipped)
        skips.emplace_back(s.group, "degenerate variable " + s.variable);

    const int k_min = std::max(config.design.k_strata, config.design.k_bins);
    std::vector<const PopulationFrame*> retained;
    for (const auto& frame : parts.frames) {
        if (!config.filter.groups.empty() &&
            std::find(config.filter.groups.begin(), config.filter.groups.end(),
                      frame.name()) == config.filter.groups.end()) {
            skips.emplace_back(frame.name(), "excluded by filter");
            continue;
        }
        if (static_cast<std::int64_t>(frame.size()) < config.filter.min_size) {
            skips.emplace_back(frame.name(), "below minimum size " +
                                                 std::to_string(config.filter.min_size));
            continue;
        }
        if (frame.size() < static_cast<std::size_t>(k_min)) {
            skips.emplace_back(frame.name(), "fewer schools than strata or quota bins");
            continue;
        }
        retained.push_back(&frame);
    }

    std::map<std::string, std::string> dir_names;  // sanitized -> population
    for (const auto* frame : retained) {
        const std::string dir = sanitize_name(frame->name());
        const auto [it, inserted] = dir_names.emplace(dir, frame->name());
        if (!inserted)
            throw std::runtime_error("population names collide in the output layout: '" +
                                     it->second + "' vs '" + frame->name() + "'");
    }

    const auto all_perms = enumerate_role_permutations();
    std::vector<std::size_t> perm_idx;
    if (config.permutations.empty()) {
        for (std::size_t i = 0; i < all_perms.size(); ++i) perm_idx.push_back(i);
    } else {
        for (int p : config.permutations) perm_idx.push_back(static_cast<std::size_t>(p - 1));
    }

    const fs::path out_dir(config.output_dir);
    fs::create_directories(out_dir);

    const double mean_p = 0.5 * (config.design.p_low + config.design.p_high);
    std::vector<MetricsRow> rows;

    for (const auto* frame : retained) {
        const std::size_t n = frame->size();
        const bool feasible =
            static_cast<double>(n) * mean_p >= static_cast<double>(config.design.n_target);
        const fs::path pop_dir = out_dir / sanitize_name(frame->name());

        std::vector<ComparisonReport> cell_reports;
        for (std::size_t i : perm_idx) {
            const RoleAssignment roles = all_perms[i];
            const SamplingDesign design = build_design(*frame, roles, config.design);

            std::vector<PairedOutcome> paired(static_cast<std::size_t>(config.replications));
            parallel_for(config.replications, config.jobs, [&](std::int64_t r) {
                paired[static_cast<std::size_t>(r)] =
                    run_replication(design, static_cast<std::uint64_t>(r), config.master_seed);
            });

            std::vector<ReplicationOutcome> srs_outs, srsq_outs;
            srs_outs.reserve(paired.size());
            srsq_outs.reserve(paired.size());
            for (auto& p : paired) {
                srs_outs.push_back(std::move(p.srs));
                srsq_outs.push_back(std::move(p.srsq));
            }

            const ComparisonReport rep =
                compare(summarize(srs_outs, roles), summarize(srsq_outs, roles));

            const fs::path cell_dir = pop_dir / roles.label();
            fs::create_directories(cell_dir);
            write_file(cell_dir / "report.json",
                       report_json(frame->name(), n, roles.label(), rep, config, feasible)
                               .dump(2) +
                           "\n");
            if (config.trace)
                write_file(cell_dir / "trace.jsonl", trace_jsonl(srs_outs, srsq_outs));

            append_rows(rows, frame->name(), n, roles.label(), rep, feasible);
            cell_reports.push_back(rep);

            log << "population " << frame->name() << " (N=" << n << ") " << roles.label()
                << ": " << config.replications << " replications\n";
        }

        if (cell_reports.size() == all_perms.size()) {
            const ComparisonReport avg = average_over_permutations(cell_reports);
            write_file(pop_dir / "averaged.json",
                       report_json(frame->name(), n, "averaged", avg, config, feasible)
                               .dump(2) +
                           "\n");
            append_rows(rows, frame->name(), n, "averaged", avg, feasible);
        }
    }

    write_file(out_dir / "metrics.csv", metrics_csv(rows));

    std::string skipped_csv = "population,reason\n";
    for (const auto& [population, reason] : skips)
        skipped_csv += csv_escape(population) + ',' + csv_escape(reason) + '\n';
    write_file(out_dir / "skipped.csv", skipped_csv);

    log << "wrote " << (out_dir / "metrics.csv").string() << " (" << rows.size()
        << " rows), " << skips.size() << " populations skipped\n";
}

int cmd_gen_pop(const std::string& spec_path, const std::string& out_path, std::ostream& out,
                std::ostream& err) {
    try {
        const SyntheticSpec spec = synthetic_spec_from_json(read_file(spec_path));
        const PopulationFrame frame = generate_synthetic(spec);

        const fs::path target(out_path);
        if (target.has_parent_path()) fs::create_directories(target.parent_path());
        std::ofstream csv(target, std::ios::binary);
        if (!csv) throw std::runtime_error("cannot open for writing: " + out_path);
        write_population_csv(frame, csv);
        if (!csv) throw std::runtime_error("write failed: " + out_path);

        // Summary statistics: moments and the Pearson correlation matrix.
        const std::size_t n = frame.size();
        std::array<double, kNumVars> mean{}, sd{};
        for (std::size_t k = 0; k < kNumVars; ++k) {
            double sum = 0.0;
            for (const auto& r : frame.records()) sum += r.value[k];
            mean[k] = sum / static_cast<double>(n);
            double ssd = 0.0;
            for (const auto& r : frame.records()) {
                const double d = r.value[k] - mean[k];
                ssd += d * d;
            }
            sd[k] = std::sqrt(ssd / static_cast<double>(n));
        }
        out << "N " << n << "\n";
        char buf[128];
        for (std::size_t k = 0; k < kNumVars; ++k) {
            std::snprintf(buf, sizeof(buf), "%s mean %.4f sd %.4f",
                          var_name(static_cast<Var>(k)).data(), mean[k], sd[k]);
            out << buf << "\n";
        }
        out << "correlation\n";
        for (std::size_t i = 0; i < kNumVars; ++i) {
            std::string line;
            for (std::size_t j = 0; j < kNumVars; ++j) {
                double cov = 0.0;
                for (const auto& r : frame.records())
                    cov += (r.value[i] - mean[i]) * (r.value[j] - mean[j]);
                cov /= static_cast<double>(n);
                const double denom = sd[i] * sd[j];
                std::snprintf(buf, sizeof(buf), "%s%8.4f", j ? " " : "",
                              denom > 0.0 ? cov / denom : std::nan(""));
                line += buf;
            }
            out << line << "\n";
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_simulate(const std::string& config_path, const SimulateOverrides& overrides,
                 std::ostream& out, std::ostream& err) {
    try {
        const fs::path path(config_path);
        ExperimentConfig cfg = config_from_json(
            read_file(path), path.has_parent_path() ? path.parent_path().string() : ".");
        if (overrides.seed) cfg.master_seed = *overrides.seed;
        if (overrides.replications) {
            if (*overrides.replications < 1)
                throw std::runtime_error("--replications must be positive");
            cfg.replications = *overrides.replications;
        }
        if (overrides.jobs) {
            if (*overrides.jobs < 0) throw std::runtime_error("--jobs must be non-negative");
            cfg.jobs = *overrides.jobs;
        }
        run_experiment(cfg, out);
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int cmd_report(const std::string& results_dir, const std::string& figure, std::ostream& out,
               std::ostream& err) {
    try {
        struct FigureField {
            const char* name;
            const char* section;  // role name, or nullptr for counts.achieved
            const char* field;
        };
        static const FigureField kFigures[] = {
            {"aux_bias", "auxiliary", "bias_abs"},   {"aux_var", "auxiliary", "variance"},
            {"strat_bias", "stratifier", "bias_abs"}, {"strat_var", "stratifier", "variance"},
            {"unobs_bias", "unobserved", "bias_abs"}, {"unobs_var", "unobserved", "variance"},
            {"achieved_n", nullptr, "achieved"},
        };
        const FigureField* fig = nullptr;
        for (const auto& f : kFigures)
            if (figure == f.name) { fig = &f; break; }
        if (!fig) {
            std::string names;
            for (const auto& f : kFigures) names += std::string(names.empty() ? "" : ", ") + f.name;
            throw std::runtime_error("unknown figure '" + figure + "' (expected one of " +
                                     names + ")");
        }

        const fs::path root(results_dir);
        if (!fs::is_directory(root))
            throw std::runtime_error("results directory not found: " + results_dir);

        std::vector<fs::path> averaged;
        for (const auto& entry : fs::directory_iterator(root)) {
            if (!entry.is_directory()) continue;
            const fs::path candidate = entry.path() / "averaged.json";
            if (fs::is_regular_file(candidate)) averaged.push_back(candidate);
        }
        std::sort(averaged.begin(), averaged.end());
        if (averaged.empty())
            throw std::runtime_error("no averaged reports under " + results_dir);

        struct Row {
            std::string population;
            std::size_t n;
            double srs;
            double srsq;
        };
        auto extract = [&](const json& summary) {
            const json& node =
                fig->section ? summary.at(fig->section) : summary.at("counts");
            const json& v = node.at(fig->field);
            return v.is_null() ? std::nan("") : v.get<double>();
        };
        std::vector<Row> data;
        for (const auto& path : averaged) {
            const json j = json::parse(read_file(path));
            data.push_back(Row{j.at("population").get<std::string>(),
                               j.at("N").get<std::size_t>(), extract(j.at("srs")),
                               extract(j.at("srsq"))});
        }
        std::sort(data.begin(), data.end(), [](const Row& x, const Row& y) {
            if (x.n != y.n) return x.n < y.n;
            return x.population < y.population;
        });

        std::string csv = "population,N,srs,srsq\n";
        for (const auto& row : data) {
            csv += csv_escape(row.population) + ',' + std::to_string(row.n) + ',' +
                   format_double(row.srs) + ',' + format_double(row.srsq) + '\n';
        }
        fs::create_directories(root / "figures");
        const fs::path target = root / "figures" / (figure + ".csv");
        write_file(target, csv);
        out << "wrote " << target.string() << " (" << data.size() << " populations)\n";
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace srsq
