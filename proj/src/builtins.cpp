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

#include "qchain/builtins.hpp"

#include "qchain/gedanken.hpp"

namespace qchain {

namespace {

ExpectSpec expect_from(const GedankenResult &result) {
    ExpectSpec x;
    for (const GedankenEntry &e : result.entries) {
        x.entries.push_back({e.outcome, e.closed_form});
    }
    return x;
}

TwoObserverParams params_for(std::optional<std::uint64_t> seed) {
    return seed ? TwoObserverParams::random(*seed) : TwoObserverParams::hadamard_case();
}

std::string suffix(std::optional<std::uint64_t> seed) { return seed ? "-seed" + std::to_string(*seed) : ""; }

} // namespace

const std::vector<std::string> &builtin_names() {
    static const std::vector<std::string> names{"scenario-a",   "scenario-b",
                                                "scenario-c",   "wigner-friend",
                                                "interference", "interference-registered",
                                                "reduced"};
    return names;
}

ScenarioDocument builtin_document(const std::string &name, std::optional<std::uint64_t> seed) {
    const std::string doc_name = name + suffix(seed);
    ScenarioDocument doc;
    if (name == "scenario-a" || name == "scenario-b" || name == "scenario-c") {
        const TwoObserverParams params = params_for(seed);
        const char which = name.back();
        const TwoObserverScenario kind = which == 'a'   ? TwoObserverScenario::a
                                         : which == 'b' ? TwoObserverScenario::b
                                                        : TwoObserverScenario::c;
        doc = to_document(two_observer_protocol(params, kind), doc_name);
        doc.expect = expect_from(which == 'a'   ? scenario_a(params)
                                 : which == 'b' ? scenario_b(params)
                                                : scenario_c(params));
        doc.description = "two observers on one spin, variant " + std::string(1, which);
    } else if (name == "wigner-friend") {
        Operator u_s = hadamard();
        Operator u_ds = identity(4);
        Vector s0 = basis_vector(2, 0);
        if (seed) {
            u_s = haar_random_unitary(2, *seed);
            u_ds = haar_random_unitary(4, *seed + 1);
            s0 = haar_random_state(2, *seed + 2);
        }
        doc = to_document(wigner_friend_protocol(u_s, u_ds, s0), doc_name);
        doc.expect = expect_from(wigner_friend(u_s, u_ds, s0));
        doc.description = "friend asked twice, with a system-probe interaction in between";
    } else if (name == "interference" || name == "interference-registered") {
        const bool registered = name == "interference-registered";
        const Operator u = seed ? haar_random_unitary(2, *seed) : hadamard();
        QuerySpec query{QueryKind::return_probability, "W", "back"};
        doc = to_document(interference_protocol(u, registered), doc_name, query);
        doc.expect = expect_from(interference_experiment(u, registered));
        doc.description = registered ? "reversal after the probe was copied into a memory"
                                     : "reversal of an unrecorded probe coupling";
    } else if (name == "reduced") {
        TwoObserverParams params = params_for(seed);
        params.alpha = 1.0;
        params.beta = 0.0;
        doc = to_document(reduced_protocol(params), doc_name);
        const ReducedResult r = reduced_path_probabilities(params);
        ExpectSpec x;
        const char *f[] = {"sF1", "sF2"};
        const char *w[] = {"sW1", "sW2"};
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                x.entries.push_back({{f[i], w[j]}, r.closed_form[i][j]});
            }
        }
        doc.expect = std::move(x);
        doc.description = "system-only chain of two measurements";
    } else {
        throw Error(ErrorCode::unknown_builtin, "unknown builtin '" + name + "'");
    }
    if (doc.expect) {
        doc.expect->tolerance = 1e-10;
    }
    return doc;
}

} // namespace qchain
