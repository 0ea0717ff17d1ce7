// Copyright 2026 The qchain Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qchain/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "qchain/evolution.hpp"
#include "qchain/feynman.hpp"

namespace qchain {

namespace {

using Json = nlohmann::ordered_json;

std::string g12(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::vector<std::string> labels_of(const std::vector<const Observable *> &obs, const OutcomeSequence &seq) {
    std::vector<std::string> out;
    for (std::size_t k = 0; k < seq.size(); ++k) {
        out.push_back(obs[k]->eigen_class(seq[k]).label);
    }
    return out;
}

std::vector<std::string> engine_columns(EngineSelection engine) {
    switch (engine) {
    case EngineSelection::feynman:
        return {"feynman"};
    case EngineSelection::evolution:
        return {"evolution"};
    case EngineSelection::both:
        break;
    }
    return {"feynman", "evolution", "abs_diff"};
}

struct EngineRun {
    std::optional<Distribution> feynman;
    std::optional<Distribution> evolution;
};

EngineRun run_engines(const MeasurementChain &chain, EngineSelection engine, double tol) {
    EngineRun out;
    if (engine != EngineSelection::evolution) {
        out.feynman = chain_distribution(chain);
        check_normalization(*out.feynman, tol);
    }
    if (engine != EngineSelection::feynman) {
        out.evolution = evolution_distribution(chain);
        check_normalization(*out.evolution, tol);
    }
    return out;
}

// Builds rows from per-engine distributions keyed by the same sequences.
void fill_rows(Report &report, const EngineRun &runs, const std::vector<const Observable *> &obs, double tol) {
    const Distribution &keys = runs.feynman ? *runs.feynman : *runs.evolution;
    double total = 0.0;
    double worst = 0.0;
    for (const auto &[seq, unused] : keys) {
        (void)unused;
        ReportRow row{labels_of(obs, seq), {}};
        const double f = runs.feynman ? clamp_probability(runs.feynman->at(seq)) : 0.0;
        const double e = runs.evolution ? clamp_probability(runs.evolution->at(seq)) : 0.0;
        if (runs.feynman) {
            row.values.push_back(f);
        }
        if (runs.evolution) {
            row.values.push_back(e);
        }
        if (runs.feynman && runs.evolution) {
            row.values.push_back(std::abs(f - e));
            worst = std::max(worst, std::abs(f - e));
        }
        total += row.values.front();
        report.rows.push_back(std::move(row));
    }
    std::sort(report.rows.begin(), report.rows.end(),
              [](const ReportRow &a, const ReportRow &b) { return a.outcome < b.outcome; });
    report.total = total;
    if (runs.feynman && runs.evolution) {
        report.max_abs_diff = worst;
        if (worst > tol) {
            throw Error(ErrorCode::numerical_invariant,
                        "engines disagree by " + g12(worst) + ", tolerance " + g12(tol));
        }
    }
}

Distribution select(const Distribution &dist, std::size_t position, std::size_t cls) {
    Distribution out;
    out[OutcomeSequence{{cls}}] = marginal(dist, std::vector<std::size_t>{position})[OutcomeSequence{{cls}}];
    return out;
}

std::vector<std::string> string_list(const Json &j) {
    std::vector<std::string> out;
    for (const auto &x : j) {
        out.push_back(x.get<std::string>());
    }
    return out;
}

} // namespace

double round12(double x) {
    if (!std::isfinite(x)) {
        return x;
    }
    return std::strtod(g12(x).c_str(), nullptr);
}

void check_normalization(const Distribution &dist, double tol) {
    const double total = total_probability(dist);
    if (!(std::abs(total - 1.0) <= tol)) {
        throw Error(ErrorCode::numerical_invariant, "probabilities sum to " + g12(total) + ", tolerance " + g12(tol));
    }
}

Report run(const ScenarioDocument &doc, const RunOptions &options) {
    const double tol = options.tolerance.value_or(doc.options.tolerance);
    const EngineSelection engine = options.engine.value_or(doc.options.engine);
    Report report;
    report.scenario = doc.name;
    report.query = std::string(to_string(doc.query.kind));

    const Protocol protocol = to_protocol(doc);
    const auto names = observation_names(protocol);

    if (doc.query.kind == QueryKind::histories_check) {
        const HistoryFamily family = to_family(doc);
        std::vector<const Observable *> obs;
        for (const Observable &o : family.projector_sets) {
            obs.push_back(&o);
        }
        const DecoherenceMatrix matrix = decoherence_matrix(family);
        const ConsistencyVerdict verdict = consistency_check(matrix, tol);
        report.engine = "decoherence";
        report.observations = names;
        report.columns = {"probability"};
        double total = 0.0;
        for (std::size_t i = 0; i < matrix.histories.size(); ++i) {
            const double p = clamp_probability(matrix.gram(static_cast<Index>(i), static_cast<Index>(i)).real());
            total += p;
            report.rows.push_back({labels_of(obs, matrix.histories[i]), {p}});
        }
        std::sort(report.rows.begin(), report.rows.end(),
                  [](const ReportRow &a, const ReportRow &b) { return a.outcome < b.outcome; });
        report.total = total;
        report.consistent = verdict.consistent;
        report.max_off_diagonal = verdict.max_off_diagonal;
        report.tolerance = tol;
        return report;
    }

    const MeasurementChain chain = build_chain(protocol);
    std::vector<const Observable *> obs;
    for (const Observable &o : chain.observables) {
        obs.push_back(&o);
    }
    report.engine = std::string(to_string(engine));
    report.columns = engine_columns(engine);
    EngineRun runs = run_engines(chain, engine, tol);

    if (doc.query.kind == QueryKind::return_probability) {
        const auto pos = static_cast<std::size_t>(
            std::find(names.begin(), names.end(), doc.query.observation) - names.begin());
        if (pos == names.size()) {
            throw Error(ErrorCode::unknown_label, "no observation named '" + doc.query.observation + "'",
                        "query.observation");
        }
        const auto cls = obs[pos]->find_class(doc.query.label);
        if (!cls) {
            throw Error(ErrorCode::unknown_label, "no class '" + doc.query.label + "'", "query.label");
        }
        if (runs.feynman) {
            runs.feynman = select(*runs.feynman, pos, *cls);
        }
        if (runs.evolution) {
            runs.evolution = select(*runs.evolution, pos, *cls);
        }
        report.observations = {doc.query.observation};
        fill_rows(report, runs, {obs[pos]}, tol);
        report.total.reset();
        return report;
    }

    report.observations = names;
    fill_rows(report, runs, obs, tol);
    return report;
}

Format parse_format(std::string_view text) {
    if (text == "table") {
        return Format::table;
    }
    if (text == "json") {
        return Format::json;
    }
    if (text == "csv") {
        return Format::csv;
    }
    throw Error(ErrorCode::schema_error, "unknown output format '" + std::string(text) + "'");
}

std::string emit(const Report &report, Format format) {
    if (format == Format::json) {
        Json j;
        j["format_version"] = report.format_version;
        j["scenario"] = report.scenario;
        j["query"] = report.query;
        j["engine"] = report.engine;
        j["observations"] = report.observations;
        j["columns"] = report.columns;
        Json rows = Json::array();
        for (const ReportRow &r : report.rows) {
            Json values = Json::array();
            for (const double v : r.values) {
                values.push_back(round12(v));
            }
            rows.push_back(Json{{"outcome", r.outcome}, {"values", std::move(values)}});
        }
        j["rows"] = std::move(rows);
        if (report.total) {
            j["total"] = round12(*report.total);
        }
        if (report.max_abs_diff) {
            j["max_abs_diff"] = round12(*report.max_abs_diff);
        }
        if (report.consistent) {
            j["consistent"] = *report.consistent;
        }
        if (report.max_off_diagonal) {
            j["max_off_diagonal"] = round12(*report.max_off_diagonal);
        }
        if (report.tolerance) {
            j["tolerance"] = round12(*report.tolerance);
        }
        return j.dump(2) + "\n";
    }

    std::vector<std::string> header = report.observations;
    header.insert(header.end(), report.columns.begin(), report.columns.end());
    std::vector<std::vector<std::string>> cells;
    for (const ReportRow &r : report.rows) {
        std::vector<std::string> line = r.outcome;
        for (const double v : r.values) {
            line.push_back(g12(v));
        }
        cells.push_back(std::move(line));
    }

    std::ostringstream os;
    if (format == Format::csv) {
        auto write = [&](const std::vector<std::string> &line) {
            for (std::size_t k = 0; k < line.size(); ++k) {
                os << (k ? "," : "") << line[k];
            }
            os << "\n";
        };
        write(header);
        for (const auto &line : cells) {
            write(line);
        }
        return os.str();
    }

    std::vector<std::size_t> width(header.size());
    for (std::size_t k = 0; k < header.size(); ++k) {
        width[k] = header[k].size();
        for (const auto &line : cells) {
            width[k] = std::max(width[k], line[k].size());
        }
    }
    auto write = [&](const std::vector<std::string> &line) {
        for (std::size_t k = 0; k < line.size(); ++k) {
            os << line[k];
            if (k + 1 < line.size()) {
                os << std::string(width[k] - line[k].size() + 2, ' ');
            }
        }
        os << "\n";
    };
    os << "# scenario: " << report.scenario << "\n";
    os << "# query: " << report.query << "\n";
    os << "# engine: " << report.engine << "\n";
    write(header);
    for (const auto &line : cells) {
        write(line);
    }
    if (report.total) {
        os << "# total: " << g12(*report.total) << "\n";
    }
    if (report.max_abs_diff) {
        os << "# max_abs_diff: " << g12(*report.max_abs_diff) << "\n";
    }
    if (report.consistent) {
        os << "# consistent: " << (*report.consistent ? "yes" : "no") << "\n";
    }
    if (report.max_off_diagonal) {
        os << "# max_off_diagonal: " << g12(*report.max_off_diagonal) << "\n";
    }
    if (report.tolerance) {
        os << "# tolerance: " << g12(*report.tolerance) << "\n";
    }
    return os.str();
}

Report parse_report(std::string_view json_text) {
    Json j;
    try {
        j = Json::parse(json_text.begin(), json_text.end());
    } catch (const nlohmann::json::parse_error &e) {
        throw Error(ErrorCode::syntax_error, std::string("invalid report JSON: ") + e.what());
    }
    try {
        Report r;
        r.format_version = j.at("format_version").get<int>();
        r.scenario = j.at("scenario").get<std::string>();
        r.query = j.at("query").get<std::string>();
        r.engine = j.at("engine").get<std::string>();
        r.observations = string_list(j.at("observations"));
        r.columns = string_list(j.at("columns"));
        for (const auto &row : j.at("rows")) {
            ReportRow out{string_list(row.at("outcome")), {}};
            for (const auto &v : row.at("values")) {
                out.values.push_back(v.get<double>());
            }
            r.rows.push_back(std::move(out));
        }
        if (j.contains("total")) {
            r.total = j["total"].get<double>();
        }
        if (j.contains("max_abs_diff")) {
            r.max_abs_diff = j["max_abs_diff"].get<double>();
        }
        if (j.contains("consistent")) {
            r.consistent = j["consistent"].get<bool>();
        }
        if (j.contains("max_off_diagonal")) {
            r.max_off_diagonal = j["max_off_diagonal"].get<double>();
        }
        if (j.contains("tolerance")) {
            r.tolerance = j["tolerance"].get<double>();
        }
        return r;
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::schema_error, std::string("malformed report: ") + e.what());
    }
}

double expectation_deviation(const Report &report, const ExpectSpec &expect) {
    double worst = 0.0;
    for (std::size_t k = 0; k < expect.entries.size(); ++k) {
        const ExpectedEntry &e = expect.entries[k];
        const auto it = std::find_if(report.rows.begin(), report.rows.end(),
                                     [&](const ReportRow &r) { return r.outcome == e.outcome; });
        if (it == report.rows.end()) {
            throw Error(ErrorCode::unknown_label, "expected outcome not in the report",
                        "expect.entries[" + std::to_string(k) + "]");
        }
        worst = std::max(worst, std::abs(it->values.front() - e.probability));
    }
    return worst;
}

} // namespace qchain
