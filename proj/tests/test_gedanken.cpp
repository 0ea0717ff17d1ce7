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

#include "qchain/feynman.hpp"
#include "qchain/gedanken.hpp"

using namespace qchain;

namespace {

double yes_of(const GedankenResult &r) {
    // W's yes, summed over F's answer for the joint variant
    double p = 0.0;
    for (const auto &e : r.entries) {
        if (e.outcome.back() == "yes") {
            p += e.closed_form;
        }
    }
    return p;
}

TwoObserverParams single_branch(std::uint64_t seed) {
    TwoObserverParams p = TwoObserverParams::random(seed);
    p.alpha = 1.0;
    p.beta = 0.0;
    return p;
}

} // namespace

TEST_CASE("system amplitudes") {
    TwoObserverParams p;
    p.u_f = identity(2);
    auto a = system_amplitudes(p).a;
    CHECK(std::abs(a[0] - 1.0) < 1e-15);
    CHECK(std::abs(a[1]) + std::abs(a[2]) + std::abs(a[3]) < 1e-15);

    a = system_amplitudes(TwoObserverParams::hadamard_case()).a;
    CHECK(std::abs(a[0] - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(a[3] - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(a[1]) + std::abs(a[2]) < 1e-15);

    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        CHECK(std::abs(system_amplitudes(TwoObserverParams::random(seed)).norm_squared() - 1.0) < 1e-12);
    }
}

TEST_CASE("parameter validation") {
    TwoObserverParams p;
    p.alpha = 1.0;
    CHECK_THROWS_AS(validate(p), Error);
    p = TwoObserverParams{};
    p.u_w = 2.0 * identity(2);
    CHECK_THROWS_AS(validate(p), Error);
    p = TwoObserverParams{};
    p.s0 = Vector::Ones(2);
    CHECK_THROWS_AS(validate(p), Error);
    CHECK_NOTHROW(validate(TwoObserverParams::random(1)));
}

TEST_CASE("scenario A with Hadamard parameters") {
    const GedankenResult r = scenario_a(TwoObserverParams::hadamard_case());
    CHECK(r.at({"yes"}).engine == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(r.at({"no"}).engine) < 1e-12);
    CHECK(std::abs(r.at({"not_sure"}).engine) < 1e-12);
    CHECK(r.max_difference() < 1e-12);
    CHECK_THROWS_AS(r.at({"maybe"}), Error);
}

TEST_CASE("scenario A with a single F branch") {
    const TwoObserverParams p = single_branch(4);
    const auto amps = system_amplitudes(p);
    const GedankenResult r = scenario_a(p);
    CHECK(std::abs(r.at({"yes"}).closed_form - std::norm(amps.a[0])) < 1e-12);
    CHECK(std::abs(interference_term(amps, p.alpha, p.beta)) < 1e-15);
    CHECK(r.max_difference() < 1e-10);
}

TEST_CASE("two-observer identities on random parameters") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        CAPTURE(seed);
        const TwoObserverParams p = TwoObserverParams::random(seed);
        const auto amps = system_amplitudes(p);
        const GedankenResult a = scenario_a(p);
        const GedankenResult b = scenario_b(p);
        const GedankenResult c = scenario_c(p);
        CHECK(a.max_difference() < 1e-10);
        CHECK(b.max_difference() < 1e-10);
        CHECK(c.max_difference() < 1e-10);
        double total = 0.0;
        for (const auto &e : a.entries) {
            total += e.closed_form;
        }
        CHECK(std::abs(total - 1.0) < 1e-12);
        CHECK(std::abs(yes_of(a) - yes_of(b) - interference_term(amps, p.alpha, p.beta)) < 1e-12);
        // C is B with F's answer summed out
        for (const char *w : {"yes", "no", "not_sure"}) {
            const double marginal = b.at({"yes", w}).engine + b.at({"no", w}).engine;
            CHECK(std::abs(c.at({w}).engine - marginal) < 1e-12);
        }
    }
}

TEST_CASE("scenario B and C with Hadamard parameters") {
    const TwoObserverParams p = TwoObserverParams::hadamard_case();
    CHECK(std::abs(yes_of(scenario_b(p)) - 0.5) < 1e-12);
    CHECK(std::abs(scenario_c(p).at({"yes"}).engine - 0.5) < 1e-12);
}

TEST_CASE("single F branch: all scenarios coincide") {
    const TwoObserverParams p = single_branch(9);
    const GedankenResult b = scenario_b(p);
    CHECK(std::abs(b.at({"no", "yes"}).engine) < 1e-12);
    const double a_yes = scenario_a(p).at({"yes"}).engine;
    CHECK(std::abs(scenario_c(p).at({"yes"}).engine - a_yes) < 1e-12);
    CHECK(std::abs(b.at({"yes", "yes"}).engine + b.at({"no", "yes"}).engine - a_yes) < 1e-12);
}

TEST_CASE("two-observer composite is 648-dimensional in the documented order") {
    const Protocol p = two_observer_protocol(TwoObserverParams::hadamard_case(), TwoObserverScenario::b);
    CHECK(p.space.dim() == 648);
    std::vector<std::string> labels;
    for (const auto &f : p.space.factors()) {
        labels.push_back(f.label);
    }
    CHECK(labels == std::vector<std::string>{"muW", "muF", "dW", "dF", "s"});
    CHECK(observation_names(p) == std::vector<std::string>{"F", "W"});
    const Protocol a = two_observer_protocol(TwoObserverParams::hadamard_case(), TwoObserverScenario::a);
    CHECK(observation_names(a) == std::vector<std::string>{"W"});
}

TEST_CASE("phi basis is orthonormal") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        CHECK(adjoint_check(phi_basis(TwoObserverParams::random(seed)), 1e-12));
    }
}

TEST_CASE("W's not_sure class is rank 2") {
    const Protocol p = two_observer_protocol(TwoObserverParams::hadamard_case(), TwoObserverScenario::a);
    const auto &obs = std::get<ObserveStep>(p.events.back().action).observable;
    const auto cls = obs.find_class("not_sure");
    REQUIRE(cls.has_value());
    CHECK(obs.members(*cls).size() == 2);
}

TEST_CASE("Wigner's friend with a Hadamard") {
    const GedankenResult r = wigner_friend(hadamard(), identity(4));
    CHECK(std::abs(r.at({"yes", "yes"}).engine - 0.5) < 1e-12);
    CHECK(std::abs(r.at({"no", "no"}).engine - 0.5) < 1e-12);
    CHECK(std::abs(r.at({"yes", "no"}).engine) < 1e-12);
    CHECK(std::abs(r.at({"no", "yes"}).engine) < 1e-12);
}

TEST_CASE("Wigner's friend from a prepared eigenstate") {
    const GedankenResult r = wigner_friend(identity(2), haar_random_unitary(4, 3), basis_vector(2, 0));
    CHECK(std::abs(r.at({"yes", "yes"}).engine - 1.0) < 1e-12);
}

TEST_CASE("Wigner's friend ignores the later system-probe interaction") {
    const Operator us = haar_random_unitary(2, 77);
    const Vector s0 = haar_random_state(2, 78);
    const GedankenResult base = wigner_friend(us, identity(4), s0);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const GedankenResult r = wigner_friend(us, haar_random_unitary(4, seed), s0);
        CHECK(r.max_difference() < 1e-12);
        for (std::size_t k = 0; k < 4; ++k) {
            CHECK(std::abs(r.entries[k].engine - base.entries[k].engine) < 1e-12);
        }
    }
    CHECK_THROWS_AS(wigner_friend(us, 2.0 * identity(4), s0), Error);
}

TEST_CASE("interference returns without a record") {
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const GedankenResult r = interference_experiment(haar_random_unitary(2, seed), false);
        CHECK(std::abs(r.at({"back"}).engine - 1.0) < 1e-12);
    }
    CHECK(interference_protocol(hadamard(), false).space.dim() == 486);
    CHECK(interference_protocol(hadamard(), true).space.dim() == 1458);
}

TEST_CASE("interference with a record") {
    const GedankenResult h = interference_experiment(hadamard(), true);
    CHECK(std::abs(h.at({"back"}).engine - 0.5) < 1e-12);
    CHECK(h.max_difference() < 1e-12);
    const GedankenResult i = interference_experiment(identity(2), true);
    CHECK(std::abs(i.at({"back"}).engine - 1.0) < 1e-12);
}

TEST_CASE("reduced path probabilities") {
    TwoObserverParams p = TwoObserverParams::hadamard_case();
    p.alpha = 1.0;
    p.beta = 0.0;
    const ReducedResult r = reduced_path_probabilities(p);
    CHECK(std::abs(r.closed_form[0][0] - 0.5) < 1e-12);
    CHECK(std::abs(r.closed_form[0][1]) < 1e-12);
    CHECK(std::abs(r.closed_form[1][0]) < 1e-12);
    CHECK(std::abs(r.closed_form[1][1] - 0.5) < 1e-12);
    CHECK(r.max_difference() < 1e-12);

    const ReducedResult q = reduced_path_probabilities(single_branch(12));
    double total = 0.0;
    for (const auto &row : q.reduced) {
        for (const double x : row) {
            total += x;
        }
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
    CHECK(q.max_difference() < 1e-12);
    CHECK_THROWS_AS(reduced_path_probabilities(TwoObserverParams::hadamard_case()), Error);
}
