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

// qchain command line: run, check-histories, corpus, export, format.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "qchain/builtins.hpp"
#include "qchain/report.hpp"

namespace fs = std::filesystem;
using namespace qchain;

namespace {

int report_error(const Error &e) {
    std::cerr << "error[" << to_string(e.code()) << "]";
    if (!e.path().empty()) {
        std::cerr << " at " << e.path();
    }
    std::cerr << ": " << e.message() << "\n";
    return exit_status(e.code());
}

std::string g6(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

struct CorpusLine {
    std::string text;
    int status = 0;
};

CorpusLine check_file(const fs::path &path) {
    const std::string name = path.filename().string();
    try {
        const ScenarioDocument doc = load_scenario(path.string());
        const Report report = run(doc);
        std::string text = "PASS " + name;
        if (report.max_abs_diff) {
            text += " max_abs_diff=" + g6(*report.max_abs_diff);
        }
        if (report.consistent) {
            text += std::string(" consistent=") + (*report.consistent ? "yes" : "no");
        }
        if (doc.expect) {
            const double dev = expectation_deviation(report, *doc.expect);
            text += " expect_dev=" + g6(dev);
            if (!(dev <= doc.expect->tolerance)) {
                return {"FAIL " + name + " expectation off by " + g6(dev), 4};
            }
        }
        return {text, 0};
    } catch (const Error &e) {
        return {"FAIL " + name + " " + std::string(to_string(e.code())) + ": " + e.message(), exit_status(e.code())};
    }
}

int corpus(const std::string &dir, unsigned jobs) {
    std::vector<fs::path> files;
    std::error_code ec;
    for (const auto &entry : fs::directory_iterator(dir, ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json") {
            files.push_back(entry.path());
        }
    }
    if (ec) {
        std::cerr << "error[io_error]: cannot list '" << dir << "'\n";
        return exit_status(ErrorCode::io_error);
    }
    std::sort(files.begin(), files.end());
    std::vector<CorpusLine> lines(files.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < files.size(); k = next++) {
            lines[k] = check_file(files[k]);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned j = 1; j < std::max(1u, jobs); ++j) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto &t : pool) {
        t.join();
    }
    int status = 0;
    std::size_t failed = 0;
    for (const CorpusLine &line : lines) {
        std::cout << line.text << "\n";
        if (line.status != 0) {
            ++failed;
            status = std::max(status, line.status);
        }
    }
    std::cout << "# " << files.size() - failed << "/" << files.size() << " passed\n";
    return status;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Probabilities of measurement chains and observer scenarios"};
    app.require_subcommand(1);

    std::string file;
    std::string engine;
    std::string format = "table";
    std::optional<double> tol;
    std::string builtin;
    std::optional<std::uint64_t> seed;
    unsigned jobs = 1;

    auto *run_cmd = app.add_subcommand("run", "Run a scenario and print its distribution");
    run_cmd->add_option("file", file, "Scenario JSON file");
    run_cmd->add_option("--engine", engine, "feynman, evolution or both");
    run_cmd->add_option("--format", format, "table, json or csv");
    run_cmd->add_option("--tol", tol, "Tolerance for normalization and engine agreement");
    run_cmd->add_option("--builtin", builtin, "Built-in scenario instead of a file");
    run_cmd->add_option("--seed", seed, "Random parameters for a built-in scenario");

    auto *hist_cmd = app.add_subcommand("check-histories", "Decoherence check of a scenario's projector families");
    hist_cmd->add_option("file", file, "Scenario JSON file")->required();
    hist_cmd->add_option("--tol", tol, "Off-diagonal tolerance");
    hist_cmd->add_option("--format", format, "table, json or csv");

    auto *corpus_cmd = app.add_subcommand("corpus", "Run every scenario in a directory");
    std::string dir;
    corpus_cmd->add_option("dir", dir, "Directory of scenario files")->required();
    corpus_cmd->add_option("--jobs", jobs, "Worker threads");

    auto *export_cmd = app.add_subcommand("export", "Print a built-in scenario as JSON");
    export_cmd->add_option("--builtin", builtin, "Built-in scenario name")->required();
    export_cmd->add_option("--seed", seed, "Random parameters");

    auto *format_cmd = app.add_subcommand("format", "Print a scenario file in canonical form");
    format_cmd->add_option("file", file, "Scenario JSON file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (corpus_cmd->parsed()) {
            return corpus(dir, jobs);
        }
        if (export_cmd->parsed()) {
            std::cout << serialize_scenario(builtin_document(builtin, seed));
            return 0;
        }
        if (format_cmd->parsed()) {
            std::cout << serialize_scenario(load_scenario(file));
            return 0;
        }
        ScenarioDocument doc;
        if (!builtin.empty()) {
            doc = builtin_document(builtin, seed);
        } else if (!file.empty()) {
            doc = load_scenario(file);
        } else {
            std::cerr << "run needs a scenario file or --builtin\n";
            return exit_status(ErrorCode::schema_error);
        }
        const Format out = parse_format(format);
        RunOptions options;
        options.tolerance = tol;
        if (hist_cmd->parsed()) {
            if (doc.query.kind != QueryKind::histories_check) {
                doc.query = QuerySpec{QueryKind::histories_check, "", ""};
                if (!doc.projector_families) {
                    throw Error(ErrorCode::missing_projector_families,
                                "check-histories needs a projector_families section", "projector_families");
                }
            }
        } else if (!engine.empty()) {
            options.engine = parse_engine(engine);
        }
        std::cout << emit(run(doc, options), out);
        return 0;
    } catch (const Error &e) {
        return report_error(e);
    }
}
