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

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "qchain/scenario.hpp"
#include "support/documents.hpp"

using namespace qchain;
using testing_support::json;

namespace {

std::string slurp(const std::filesystem::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<std::filesystem::path> corpus_files() {
    std::vector<std::filesystem::path> out;
    for (const auto &e : std::filesystem::directory_iterator(QCHAIN_SOURCE_DIR "/corpus")) {
        if (e.path().extension() == ".json") {
            out.push_back(e.path());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

Error caught(const std::function<void()> &f) {
    try {
        f();
    } catch (const Error &e) {
        return e;
    }
    FAIL("no error thrown");
    return Error(ErrorCode::schema_error, "");
}

} // namespace

TEST_CASE("minimal document") {
    const ScenarioDocument doc = parse_scenario(testing_support::base_document().dump());
    CHECK(doc.factors.size() == 1);
    CHECK(doc.events.size() == 2);
    CHECK(doc.options.engine == EngineSelection::both);
    CHECK(doc.options.tolerance == 1e-10);
    const Protocol p = to_protocol(doc);
    CHECK(p.space.dim() == 2);
    const MeasurementChain chain = build_chain(p);
    CHECK(chain.length() == 1);
}

TEST_CASE("named and explicit matrices") {
    MatrixSpec h;
    h.kind = MatrixSpec::Kind::hadamard;
    CHECK(resolve(h, 2).isApprox(hadamard()));
    MatrixSpec rot;
    rot.kind = MatrixSpec::Kind::rotation;
    rot.theta = 0.3;
    CHECK(resolve(rot, 2).isApprox(rotation(0.3)));
    MatrixSpec haar;
    haar.kind = MatrixSpec::Kind::haar;
    haar.seed = 11;
    CHECK(resolve(haar, 3).isApprox(haar_random_unitary(3, 11)));
    CHECK_THROWS_AS(resolve(rot, 3), Error);
    CHECK(to_matrix_spec(hadamard()).kind == MatrixSpec::Kind::hadamard);
    CHECK(to_matrix_spec(pauli_x()).kind == MatrixSpec::Kind::pauli_x);
    CHECK(to_matrix_spec(rotation(0.3)).kind == MatrixSpec::Kind::explicit_entries);

    json doc = testing_support::base_document();
    doc["events"][0]["matrix"] = json::parse("[[0, [0, 1]], [[0, 1], 0]]");
    const Protocol p = to_protocol(parse_scenario(doc.dump()));
    const auto &u = std::get<UnitaryStep>(p.events[0].action).matrix;
    CHECK(std::abs(u(0, 1) - Complex(0, 1)) < 1e-15);
}

TEST_CASE("non-unitary matrix is rejected with its deviation") {
    json doc = testing_support::base_document();
    doc["events"][0]["matrix"] = json::parse("[[1, 0], [0, 0]]");
    const Error e = caught([&] { parse_scenario(doc.dump()); });
    CHECK(e.code() == ErrorCode::non_unitary);
    CHECK(e.path() == "events[0].matrix");
    CHECK(e.message().find("unitarity violation, max deviation 1") != std::string::npos);
}

TEST_CASE("syntax errors report line and column") {
    const Error e = caught([] { parse_scenario("{\n  \"name\": \"x\",\n  oops\n}"); });
    CHECK(e.code() == ErrorCode::syntax_error);
    CHECK(e.message().find("line 3") != std::string::npos);
    CHECK(e.message().find("column") != std::string::npos);
}

TEST_CASE("every error category has a trigger") {
    std::set<ErrorCode> seen;
    for (const auto &c : testing_support::error_cases()) {
        CAPTURE(c.what);
        const auto code = testing_support::thrown_code(c.trigger);
        REQUIRE(code.has_value());
        CHECK(to_string(*code) == to_string(c.code));
        seen.insert(*code);
    }
    CHECK(seen.size() == kAllErrorCodes.size());
}

TEST_CASE("exit statuses by category") {
    CHECK(exit_status(ErrorCode::schema_error) == 2);
    CHECK(exit_status(ErrorCode::non_unitary) == 2);
    CHECK(exit_status(ErrorCode::capacity_exceeded) == 3);
    CHECK(exit_status(ErrorCode::numerical_invariant) == 4);
}

TEST_CASE("event order rules") {
    json doc = testing_support::base_document();
    doc["events"][0]["time"] = 2;
    doc["events"][0]["seq"] = 0;
    doc["events"][1]["seq"] = 1;
    CHECK_NOTHROW(parse_scenario(doc.dump()));
    doc["events"][1]["seq"] = 0;
    CHECK(caught([&] { parse_scenario(doc.dump()); }).code() == ErrorCode::time_collision);
    doc["events"][0]["seq"] = 2;
    CHECK(caught([&] { parse_scenario(doc.dump()); }).code() == ErrorCode::unordered_events);
    doc = testing_support::base_document();
    doc["events"][0]["time"] = 0;
    CHECK(caught([&] { parse_scenario(doc.dump()); }).code() == ErrorCode::unordered_events);
}

TEST_CASE("observable partitions") {
    json doc = testing_support::base_document();
    doc["events"][1]["observable"]["classes"][1]["members"] = json::array();
    CHECK(caught([&] { parse_scenario(doc.dump()); }).code() == ErrorCode::invalid_observable);
    doc["events"][1]["observable"]["classes"].erase(1);
    const Error e = caught([&] { parse_scenario(doc.dump()); });
    CHECK(e.code() == ErrorCode::invalid_observable);
    CHECK(e.message().find("incomplete partition") != std::string::npos);
}

TEST_CASE("probe coupling and registration") {
    json doc = testing_support::probe_document();
    doc["factors"].push_back({{"label", "mu"}, {"dim", 3}, {"role", "memory"}});
    doc["events"].insert(doc["events"].begin() + 2,
                         json{{"time", 1.7}, {"kind", "register"}, {"probe", "d"}, {"memory", "mu"}});
    const ScenarioDocument parsed = parse_scenario(doc.dump());
    CHECK(to_protocol(parsed).space.dim() == 18);
    // a register onto a probe is refused
    doc["events"][2]["memory"] = "d";
    CHECK_THROWS_AS(parse_scenario(doc.dump()), Error);
}

TEST_CASE("return probability needs a known label") {
    json doc = testing_support::base_document();
    doc["query"] = {{"kind", "return_probability"}, {"observation", "Z"}, {"label", "sideways"}};
    CHECK(caught([&] { parse_scenario(doc.dump()); }).code() == ErrorCode::unknown_label);
    doc["query"]["label"] = "up";
    CHECK_NOTHROW(parse_scenario(doc.dump()));
}

TEST_CASE("projector families") {
    json doc = testing_support::base_document();
    doc["query"]["kind"] = "histories_check";
    doc["projector_families"] = json::parse(R"({"Z": {"basis": "hadamard",
        "classes": [{"label": "plus", "members": [0]}, {"label": "minus", "members": [1]}]}})");
    const ScenarioDocument parsed = parse_scenario(doc.dump());
    const HistoryFamily f = to_family(parsed);
    CHECK(f.length() == 1);
    CHECK(!f.projector_sets[0].is_computational());
    doc["projector_families"]["Q"] = doc["projector_families"]["Z"];
    doc["projector_families"].erase("Z");
    CHECK(caught([&] { parse_scenario(doc.dump()); }).code() == ErrorCode::unknown_label);
}

TEST_CASE("two-observer corpus file builds the full composite") {
    const ScenarioDocument doc = load_scenario(QCHAIN_SOURCE_DIR "/corpus/scenario-b.json");
    const MeasurementChain chain = build_chain(to_protocol(doc));
    CHECK(chain.dim() == 648);
    CHECK(chain.length() == 2);
}

TEST_CASE("corpus files round-trip byte for byte") {
    const auto files = corpus_files();
    CHECK(files.size() >= 20);
    for (const auto &p : files) {
        CAPTURE(p.filename().string());
        const std::string text = slurp(p);
        CHECK(serialize_scenario(parse_scenario(text)) == text);
    }
}

TEST_CASE("builtins export to parseable documents") {
    for (const auto &name : builtin_names()) {
        CAPTURE(name);
        const ScenarioDocument doc = builtin_document(name);
        const std::string text = serialize_scenario(doc);
        CHECK(serialize_scenario(parse_scenario(text)) == text);
    }
    CHECK(builtin_document("wigner-friend", 3).name == "wigner-friend-seed3");
}
