// Copyright 2026 The srsq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is
// distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and limitations under the License.

#include "srsq/population.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <stdexcept>
#include <utility>

#include "srsq/errors.hpp"
#include "srsq/rng.hpp"

namespace srsq {
namespace {

constexpr double kMomentTol = 1e-9;

// A variable counts as degenerate when its sd is negligible relative to its
// own scale; an exact ==0 test would miss all-equal columns whose rounded
// mean differs from the common value in the last bit.
bool is_degenerate(const VariableMoments& m) {
    return m.sd <= 1e-9 * std::max(1.0, std::fabs(m.mean));
}

std::array<VariableMoments, kNumVars> compute_moments(const std::vector<SchoolRecord>& records,
                                                      bool from_z) {
    std::array<VariableMoments, kNumVars> out{};
    const double n = static_cast<double>(records.size());
    for (std::size_t k = 0; k < kNumVars; ++k) {
        double sum = 0.0;
        for (const auto& r : records) sum += from_z ? r.z[k] : r.value[k];
        const double mean = sum / n;
        double ssd = 0.0;
        for (const auto& r : records) {
            const double d = (from_z ? r.z[k] : r.value[k]) - mean;
            ssd += d * d;
        }
        out[k] = VariableMoments{mean, std::sqrt(ssd / n)};
    }
    return out;
}

// Splits one physical line into CSV fields. Quoted fields may contain commas
// and doubled quotes; embedded line breaks are not supported.
std::vector<std::string> split_csv_row(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    std::size_t i = 0;
    const std::size_t n = line.size();
    while (true) {
        cur.clear();
        if (i < n && line[i] == '"') {
            ++i;
            bool closed = false;
            while (i < n) {
                if (line[i] == '"') {
                    if (i + 1 < n && line[i + 1] == '"') {
                        cur.push_back('"');
                        i += 2;
                    } else {
                        ++i;
                        closed = true;
                        break;
                    }
                } else {
                    cur.push_back(line[i++]);
                }
            }
            if (!closed) throw ParseError(line_no, "unterminated quoted field");
            if (i < n && line[i] != ',')
                throw ParseError(line_no, "unexpected character after closing quote");
        } else {
            while (i < n && line[i] != ',') cur.push_back(line[i++]);
        }
        fields.push_back(cur);
        if (i >= n) break;
        ++i;  // consume the comma; a trailing comma yields a final empty field
    }
    return fields;
}

double parse_number(const std::string& field, std::size_t line_no, const char* column) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || field.empty())
        throw ParseError(line_no, std::string(column) + ": not a number: '" + field + "'");
    if (!std::isfinite(value))
        throw ParseError(line_no, std::string(column) + ": non-finite value");
    return value;
}

double standard_normal_cdf(double x) {
    return 0.5 * std::erfc(-x / 1.4142135623730950488);
}

struct EigenSystem {
    std::array<double, kNumVars> values;                         // unordered
    std::array<std::array<double, kNumVars>, kNumVars> vectors;  // columns
};

// Cyclic Jacobi rotations; plenty for a 3x3 symmetric matrix.
EigenSystem jacobi_eigen(std::array<std::array<double, kNumVars>, kNumVars> a) {
    EigenSystem sys{};
    auto& v = sys.vectors;
    for (std::size_t i = 0; i < kNumVars; ++i)
        for (std::size_t j = 0; j < kNumVars; ++j) v[i][j] = (i == j) ? 1.0 : 0.0;

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < kNumVars; ++p)
            for (std::size_t q = p + 1; q < kNumVars; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < kNumVars; ++p) {
            for (std::size_t q = p + 1; q < kNumVars; ++q) {
                if (std::fabs(a[p][q]) < 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < kNumVars; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < kNumVars; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < kNumVars; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    for (std::size_t i = 0; i < kNumVars; ++i) sys.values[i] = a[i][i];
    return sys;
}

} // namespace

PopulationFrame::PopulationFrame(std::string name, std::vector<SchoolRecord> records,
                                 bool standardized,
                                 std::array<VariableMoments, kNumVars> moments)
    : name_(std::move(name)),
      records_(std::move(records)),
      standardized_(standardized),
      moments_(moments) {
    if (records_.empty()) throw EmptyPopulation();
    index_.reserve(records_.size());
    for (std::size_t i = 0; i < records_.size(); ++i) {
        if (!index_.emplace(records_[i].school_id, i).second)
            throw DuplicateId(records_[i].school_id);
    }
    if (standardized_) {
        const auto zm = compute_moments(records_, /*from_z=*/true);
        for (std::size_t k = 0; k < kNumVars; ++k) {
            if (std::fabs(zm[k].mean) > kMomentTol || std::fabs(zm[k].sd - 1.0) > kMomentTol)
                throw std::invalid_argument(
                    "standardized frame violates z-moment invariant for " +
                    std::string(var_name(static_cast<Var>(k))));
        }
    }
}

std::size_t PopulationFrame::index_of(const std::string& school_id) const {
    const auto it = index_.find(school_id);
    if (it == index_.end()) throw UnknownSchool(school_id);
    return it->second;
}

PopulationFrame load_population(std::istream& csv_source, std::string name) {
    std::string line;
    std::size_t line_no = 0;

    auto next_line = [&](std::string& out) -> bool {
        if (!std::getline(csv_source, out)) return false;
        ++line_no;
        if (!out.empty() && out.back() == '\r') out.pop_back();
        return true;
    };

    if (!next_line(line)) throw EmptyPopulation();
    const auto header = split_csv_row(line, line_no);
    const std::vector<std::string> expected = {"school_id", "group_id", "var_a", "var_b",
                                               "var_c"};
    if (header != expected)
        throw ParseError(line_no,
                         "header must be school_id,group_id,var_a,var_b,var_c");

    std::vector<SchoolRecord> records;
    while (next_line(line)) {
        if (line.empty()) continue;  // tolerate a trailing blank line
        const auto fields = split_csv_row(line, line_no);
        if (fields.size() != expected.size())
            throw ParseError(line_no, "expected 5 fields, got " +
                                          std::to_string(fields.size()));
        SchoolRecord rec;
        rec.school_id = fields[0];
        rec.group_id = fields[1];
        if (rec.school_id.empty()) throw ParseError(line_no, "empty school_id");
        for (std::size_t k = 0; k < kNumVars; ++k)
            rec.value[k] = parse_number(fields[2 + k], line_no,
                                        var_name(static_cast<Var>(k)).data());
        records.push_back(std::move(rec));
    }
    return PopulationFrame(std::move(name), std::move(records));
}

PopulationFrame standardize(const PopulationFrame& frame) {
    if (frame.standardized())
        throw std::invalid_argument("frame '" + frame.name() + "' is already standardized");
    const auto moments = compute_moments(frame.records(), /*from_z=*/false);
    for (std::size_t k = 0; k < kNumVars; ++k) {
        if (is_degenerate(moments[k]))
            throw DegenerateVariable(std::string(var_name(static_cast<Var>(k))));
    }
    std::vector<SchoolRecord> records = frame.records();
    for (auto& r : records)
        for (std::size_t k = 0; k < kNumVars; ++k)
            r.z[k] = (r.value[k] - moments[k].mean) / moments[k].sd;
    return PopulationFrame(frame.name(), std::move(records), /*standardized=*/true, moments);
}

PartitionResult partition_by_group(const PopulationFrame& frame) {
    PartitionResult result;
    auto try_standardize = [&](const PopulationFrame& piece, const std::string& label) {
        try {
            result.frames.push_back(standardize(piece));
        } catch (const DegenerateVariable& e) {
            result.skipped.push_back(SkippedGroup{label, e.variable(), e.what()});
        }
    };

    try_standardize(frame, frame.name());

    std::map<std::string, std::vector<SchoolRecord>> groups;
    for (const auto& r : frame.records()) groups[r.group_id].push_back(r);
    for (auto& [group_id, records] : groups) {
        PopulationFrame piece(group_id, std::move(records));
        try_standardize(piece, group_id);
    }
    return result;
}

PopulationFrame generate_synthetic(const SyntheticSpec& spec) {
    if (spec.n_schools == 0)
        throw std::invalid_argument("n_schools must be positive");

    const auto& r = spec.correlation;
    for (std::size_t i = 0; i < kNumVars; ++i) {
        if (std::fabs(r[i][i] - 1.0) > 1e-12)
            throw InvalidCorrelation("diagonal entries must equal 1");
        for (std::size_t j = i + 1; j < kNumVars; ++j) {
            if (std::fabs(r[i][j] - r[j][i]) > 1e-12)
                throw InvalidCorrelation("matrix must be symmetric");
        }
    }
    const EigenSystem eig = jacobi_eigen(r);
    for (double lambda : eig.values) {
        if (lambda < -1e-10) {
            char buf[64];
            std::snprintf(buf, sizeof(buf), "%.6g", lambda);
            throw InvalidCorrelation(std::string("not positive semidefinite (eigenvalue ") +
                                     buf + ")");
        }
    }
    // B = V diag(sqrt(max(lambda, 0))); then B g has covariance R for iid g.
    std::array<std::array<double, kNumVars>, kNumVars> b{};
    for (std::size_t i = 0; i < kNumVars; ++i)
        for (std::size_t j = 0; j < kNumVars; ++j)
            b[i][j] = eig.vectors[i][j] * std::sqrt(std::max(eig.values[j], 0.0));

    RngStream rng(StreamKey(spec.seed).absorb("synthetic"));
    std::vector<SchoolRecord> records;
    records.reserve(spec.n_schools);
    for (std::size_t i = 0; i < spec.n_schools; ++i) {
        // Latents are drawn before any transform is applied, so the draw
        // sequence does not depend on the marginal choices.
        std::array<double, kNumVars> g{};
        for (auto& gk : g) gk = rng.next_normal();
        SchoolRecord rec;
        char id[16];
        std::snprintf(id, sizeof(id), "S%07zu", i + 1);
        rec.school_id = id;
        rec.group_id = spec.group_id;
        for (std::size_t k = 0; k < kNumVars; ++k) {
            const double latent = b[k][0] * g[0] + b[k][1] * g[1] + b[k][2] * g[2];
            switch (spec.marginals[k]) {
                case Marginal::Normal: rec.value[k] = latent; break;
                case Marginal::Lognormal: rec.value[k] = std::exp(latent); break;
                case Marginal::BoundedPercent:
                    rec.value[k] = standard_normal_cdf(latent) * 100.0;
                    break;
            }
        }
        records.push_back(std::move(rec));
    }
    return PopulationFrame(spec.name, std::move(records));
}

} // namespace srsq
