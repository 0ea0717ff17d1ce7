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

#include "qchain/gedanken.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "qchain/feynman.hpp"

namespace qchain {

namespace {

constexpr double kParamTolerance = 1e-12;

template <typename Step> Event at(double time, int seq, Step step) {
    return Event{time, seq, std::move(step)};
}

Vector kron(const Vector &a, const Vector &b) { return tensor_product(a, b); }

// Class index of `label` in the chain's observable at position k.
std::size_t class_index(const MeasurementChain &chain, std::size_t k, const std::string &label) {
    const auto m = chain.observables.at(k).find_class(label);
    if (!m) {
        throw Error(ErrorCode::unknown_label, "unknown outcome label '" + label + "'");
    }
    return *m;
}

// Marginal probability of the given labels at the given chain positions.
double probability_of(const MeasurementChain &chain, const Distribution &dist,
                      const std::vector<std::pair<std::size_t, std::string>> &fixed) {
    std::vector<std::pair<std::size_t, std::size_t>> want;
    for (const auto &[k, label] : fixed) {
        want.emplace_back(k, class_index(chain, k, label));
    }
    double p = 0.0;
    for (const auto &[seq, value] : dist) {
        const bool match = std::all_of(want.begin(), want.end(),
                                       [&](const auto &w) { return seq[w.first] == w.second; });
        if (match) {
            p += value;
        }
    }
    return p;
}

Observable f_readout() {
    return Observable::computational(3, {0, 1, 2}, {{"blank", 0.0}, {"yes", 1.0}, {"no", 2.0}});
}

Observable w_readout(bool fine_grained) {
    if (fine_grained) {
        return Observable::computational(6, {0, 1, 2, 3, 4, 0},
                                         {{"blank", 0.0}, {"yes", 1.0}, {"no", 2.0}, {"phi3", 3.0}, {"phi4", 4.0}});
    }
    return Observable::computational(6, {0, 1, 2, 3, 3, 0},
                                     {{"blank", 0.0}, {"yes", 1.0}, {"no", 2.0}, {"not_sure", 3.0}});
}

double norm2(Complex z) { return std::norm(z); }

} // namespace

TwoObserverParams TwoObserverParams::hadamard_case() { return TwoObserverParams{}; }

TwoObserverParams TwoObserverParams::random(std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    const double theta = 0.5 * angle(rng);
    TwoObserverParams p;
    p.alpha = std::polar(std::cos(theta), angle(rng));
    p.beta = std::polar(std::sin(theta), angle(rng));
    const std::uint64_t base = rng();
    p.s0 = haar_random_state(2, base + 1);
    p.u_f = haar_random_unitary(2, base + 2);
    p.u_w = haar_random_unitary(2, base + 3);
    p.basis_f = haar_random_unitary(2, base + 4);
    p.basis_w = haar_random_unitary(2, base + 5);
    return p;
}

void validate(const TwoObserverParams &params) {
    const double weight = norm2(params.alpha) + norm2(params.beta);
    if (!(std::abs(weight - 1.0) <= kParamTolerance)) {
        throw Error(ErrorCode::invalid_state, "|alpha|^2 + |beta|^2 differs from 1");
    }
    if (params.s0.size() != 2 || !(std::abs(params.s0.norm() - 1.0) <= kParamTolerance)) {
        throw Error(ErrorCode::invalid_state, "s0 must be a normalized 2-dim vector");
    }
    const std::pair<const Operator *, const char *> ops[] = {
        {&params.u_f, "u_f"}, {&params.u_w, "u_w"}, {&params.basis_f, "basis_f"}, {&params.basis_w, "basis_w"}};
    for (const auto &[op, name] : ops) {
        if (op->rows() != 2 || !adjoint_check(*op, kParamTolerance)) {
            const ErrorCode code = std::string_view(name).starts_with("basis") ? ErrorCode::invalid_observable
                                                                               : ErrorCode::non_unitary;
            throw Error(code, std::string(name) + " must be a 2x2 unitary");
        }
    }
}

double SystemAmplitudes::norm_squared() const {
    double s = 0.0;
    for (const Complex &z : a) {
        s += std::norm(z);
    }
    return s;
}

SystemAmplitudes system_amplitudes(const TwoObserverParams &params) {
    validate(params);
    const Vector evolved = params.u_f * params.s0;
    auto amp = [&](int w, int f) {
        const Complex into_f = params.basis_f.col(f).dot(evolved);
        const Complex into_w = params.basis_w.col(w).dot(params.u_w * params.basis_f.col(f));
        return into_w * into_f;
    };
    return SystemAmplitudes{{amp(0, 0), amp(0, 1), amp(1, 0), amp(1, 1)}};
}

std::array<double, 3> scenario_a_closed_form(const SystemAmplitudes &amps, Complex alpha, Complex beta) {
    const auto &a = amps.a;
    return {norm2(std::conj(alpha) * a[0] + std::conj(beta) * a[3]), norm2(beta * a[0] - alpha * a[3]),
            norm2(std::conj(alpha) * a[1] + std::conj(beta) * a[2]) + norm2(beta * a[1] - alpha * a[2])};
}

double interference_term(const SystemAmplitudes &amps, Complex alpha, Complex beta) {
    return 2.0 * (std::conj(alpha) * beta * amps.a[0] * std::conj(amps.a[3])).real();
}

Operator phi_basis(const TwoObserverParams &params) {
    const Vector d0 = basis_vector(3, 0);
    const Vector d1 = basis_vector(3, 1);
    const Vector d2 = basis_vector(3, 2);
    const Vector w1 = params.basis_w.col(0);
    const Vector w2 = params.basis_w.col(1);
    const Complex a = params.alpha;
    const Complex b = params.beta;
    Operator phi(6, 6);
    phi.col(0) = a * kron(d1, w1) + b * kron(d2, w2);
    phi.col(1) = std::conj(b) * kron(d1, w1) - std::conj(a) * kron(d2, w2);
    phi.col(2) = a * kron(d2, w1) + b * kron(d1, w2);
    phi.col(3) = std::conj(b) * kron(d2, w1) - std::conj(a) * kron(d1, w2);
    phi.col(4) = kron(d0, w1);
    phi.col(5) = kron(d0, w2);
    return phi;
}

Protocol two_observer_protocol(const TwoObserverParams &params, TwoObserverScenario scenario,
                               bool fine_grained) {
    validate(params);
    Protocol p{CompositeSpace({{"muW", 6, Role::memory},
                               {"muF", 3, Role::memory},
                               {"dW", 6, Role::probe},
                               {"dF", 3, Role::probe},
                               {"s", 2, Role::system}}),
               InitialState::pure(basis_vector(2, 0)),
               {},
               0.0};
    p.initial = InitialState::pure(p.space.product_state({{"s", params.s0}}));

    CouplingSpec f_coupling{"dF", {"s"}, Observable(params.basis_f, {0, 1}, {{"yes", 1.0}, {"no", 2.0}}), 1.0};
    CouplingSpec w_coupling{"dW",
                            {"dF", "s"},
                            Observable(phi_basis(params), {0, 1, 2, 3, 4, 4},
                                       {{"phi1", 1.0}, {"phi2", 2.0}, {"phi3", 3.0}, {"phi4", 4.0}, {"idle", 5.0}}),
                            3.0};

    p.events.push_back(at(1.0, 0, UnitaryStep{{"s"}, params.u_f}));
    p.events.push_back(at(1.0, 1, CoupleStep{f_coupling}));
    if (scenario != TwoObserverScenario::a) {
        p.events.push_back(at(2.0, 0, RegisterStep{"muF", "dF"}));
    }
    if (scenario == TwoObserverScenario::b) {
        p.events.push_back(at(2.0, 1, ObserveStep{"F", {"muF"}, f_readout()}));
    }
    p.events.push_back(at(3.0, 0, UnitaryStep{{"s"}, params.u_w}));
    p.events.push_back(at(3.0, 1, CoupleStep{w_coupling}));
    p.events.push_back(at(4.0, 0, RegisterStep{"muW", "dW"}));
    p.events.push_back(at(4.0, 1, ObserveStep{"W", {"muW"}, w_readout(fine_grained)}));
    return p;
}

double GedankenResult::max_difference() const {
    double worst = 0.0;
    for (const auto &e : entries) {
        worst = std::max(worst, e.difference());
    }
    return worst;
}

const GedankenEntry &GedankenResult::at(const std::vector<std::string> &outcome) const {
    for (const auto &e : entries) {
        if (e.outcome == outcome) {
            return e;
        }
    }
    throw Error(ErrorCode::unknown_label, "no entry for the requested outcome in '" + name + "'");
}

GedankenResult scenario_a(const TwoObserverParams &params) {
    const auto amps = system_amplitudes(params);
    const auto closed = scenario_a_closed_form(amps, params.alpha, params.beta);
    const MeasurementChain chain = build_chain(two_observer_protocol(params, TwoObserverScenario::a));
    const Distribution dist = chain_distribution(chain);
    GedankenResult r{"scenario-a", {}};
    const char *labels[] = {"yes", "no", "not_sure"};
    for (int k = 0; k < 3; ++k) {
        r.entries.push_back({{labels[k]}, closed[k], probability_of(chain, dist, {{0, labels[k]}})});
    }
    return r;
}

GedankenResult scenario_b(const TwoObserverParams &params) {
    const auto amps = system_amplitudes(params);
    const auto &a = amps.a;
    const double wa = norm2(params.alpha);
    const double wb = norm2(params.beta);
    const MeasurementChain chain = build_chain(two_observer_protocol(params, TwoObserverScenario::b));
    const Distribution dist = chain_distribution(chain);
    const struct {
        const char *f;
        const char *w;
        double p;
    } rows[] = {
        {"yes", "yes", wa * norm2(a[0])},  {"yes", "no", wb * norm2(a[0])}, {"yes", "not_sure", norm2(a[2])},
        {"no", "yes", wb * norm2(a[3])},   {"no", "no", wa * norm2(a[3])},  {"no", "not_sure", norm2(a[1])},
    };
    GedankenResult r{"scenario-b", {}};
    for (const auto &row : rows) {
        r.entries.push_back({{row.f, row.w}, row.p, probability_of(chain, dist, {{0, row.f}, {1, row.w}})});
    }
    return r;
}

GedankenResult scenario_c(const TwoObserverParams &params) {
    const auto amps = system_amplitudes(params);
    const auto &a = amps.a;
    const double wa = norm2(params.alpha);
    const double wb = norm2(params.beta);
    const double closed[] = {wa * norm2(a[0]) + wb * norm2(a[3]), wb * norm2(a[0]) + wa * norm2(a[3]),
                             norm2(a[1]) + norm2(a[2])};
    const MeasurementChain chain = build_chain(two_observer_protocol(params, TwoObserverScenario::c));
    const Distribution dist = chain_distribution(chain);
    GedankenResult r{"scenario-c", {}};
    const char *labels[] = {"yes", "no", "not_sure"};
    for (int k = 0; k < 3; ++k) {
        r.entries.push_back({{labels[k]}, closed[k], probability_of(chain, dist, {{0, labels[k]}})});
    }
    return r;
}

Protocol wigner_friend_protocol(const Operator &u_s, const Operator &u_ds, const Vector &s0) {
    if (u_s.rows() != 2 || !adjoint_check(u_s, kUnitarityTolerance)) {
        throw Error(ErrorCode::non_unitary, "U_S must be a 2x2 unitary");
    }
    if (u_ds.rows() != 4 || !adjoint_check(u_ds, kUnitarityTolerance)) {
        throw Error(ErrorCode::non_unitary, "U_DS must be a 4x4 unitary");
    }
    if (s0.size() != 2 || !(std::abs(s0.norm() - 1.0) <= kStateTolerance)) {
        throw Error(ErrorCode::invalid_state, "s0 must be a normalized 2-dim vector");
    }
    Protocol p{CompositeSpace({{"mu", 3, Role::memory}, {"d", 3, Role::probe}, {"s", 2, Role::system}}),
               InitialState::pure(basis_vector(2, 0)),
               {},
               0.0};
    p.initial = InitialState::pure(p.space.product_state({{"s", s0}}));

    // identity on the ready sector d_0, u_ds on d in {1, 2}
    Operator after = Operator::Identity(6, 6);
    after.bottomRightCorner(4, 4) = u_ds;

    const Observable readout =
        Observable::computational(3, {0, 1, 2}, {{"blank", 0.0}, {"yes", 1.0}, {"no", 2.0}});
    CouplingSpec coupling{"d", {"s"}, Observable::computational(2, {0, 1}, {{"s1", 1.0}, {"s2", 2.0}}), 1.0};
    p.events.push_back(at(1.0, 0, UnitaryStep{{"s"}, u_s}));
    p.events.push_back(at(1.0, 1, CoupleStep{coupling}));
    p.events.push_back(at(1.0, 2, RegisterStep{"mu", "d"}));
    p.events.push_back(at(1.0, 3, ObserveStep{"F1", {"mu"}, readout}));
    p.events.push_back(at(2.0, 0, UnitaryStep{{"d", "s"}, after}));
    p.events.push_back(at(2.0, 1, ObserveStep{"F2", {"mu"}, readout}));
    return p;
}

GedankenResult wigner_friend(const Operator &u_s, const Operator &u_ds, const Vector &s0) {
    const MeasurementChain chain = build_chain(wigner_friend_protocol(u_s, u_ds, s0));
    const Distribution dist = chain_distribution(chain);
    const Vector evolved = u_s * s0;
    const double p1 = std::norm(evolved(0));
    const double p2 = std::norm(evolved(1));
    const struct {
        const char *first;
        const char *second;
        double p;
    } rows[] = {{"yes", "yes", p1}, {"yes", "no", 0.0}, {"no", "yes", 0.0}, {"no", "no", p2}};
    GedankenResult r{"wigner-friend", {}};
    for (const auto &row : rows) {
        r.entries.push_back(
            {{row.first, row.second}, row.p, probability_of(chain, dist, {{0, row.first}, {1, row.second}})});
    }
    return r;
}

Protocol interference_protocol(const Operator &u, bool register_memory) {
    if (u.rows() != 2 || !adjoint_check(u, kUnitarityTolerance)) {
        throw Error(ErrorCode::non_unitary, "U must be a 2x2 unitary");
    }
    std::vector<Factor> factors{{"muW", 3, Role::memory}, {"muF", 3, Role::memory}};
    if (register_memory) {
        factors.push_back({"muD", 3, Role::memory});
    }
    for (const Factor &f : {Factor{"dW", 3, Role::probe}, Factor{"dF", 3, Role::probe}, Factor{"d", 3, Role::probe},
                            Factor{"s", 2, Role::system}}) {
        factors.push_back(f);
    }
    Protocol p{CompositeSpace(std::move(factors)), InitialState::pure(basis_vector(2, 0)), {}, 0.0};
    p.initial = InitialState::pure(basis_vector(p.space.dim(), 0));

    // (d, s) index = 2 d + s
    const CouplingSpec d_coupling{"d", {"s"}, Observable::computational(2, {0, 1}, {{"s1", 1.0}, {"s2", 2.0}}),
                                  1.0};
    const CouplingSpec f_coupling{"dF",
                                  {"d", "s"},
                                  Observable::computational(6, {1, 1, 0, 1, 1, 0}, {{"on", 1.0}, {"off", 2.0}}),
                                  2.0};
    const CouplingSpec w_coupling{"dW",
                                  {"d", "s"},
                                  Observable::computational(6, {0, 1, 1, 1, 1, 1}, {{"back", 1.0}, {"other", 2.0}}),
                                  4.0};
    const Observable f_readout =
        Observable::computational(3, {0, 1, 2}, {{"blank", 0.0}, {"on", 1.0}, {"off", 2.0}});
    const Observable w_readout =
        Observable::computational(3, {0, 1, 2}, {{"blank", 0.0}, {"back", 1.0}, {"other", 2.0}});

    p.events.push_back(at(1.0, 0, UnitaryStep{{"s"}, u}));
    p.events.push_back(at(1.0, 1, CoupleStep{d_coupling}));
    if (register_memory) {
        p.events.push_back(at(1.5, 0, RegisterStep{"muD", "d"}));
    }
    p.events.push_back(at(2.0, 0, CoupleStep{f_coupling}));
    p.events.push_back(at(2.0, 1, RegisterStep{"muF", "dF"}));
    p.events.push_back(at(2.0, 2, ObserveStep{"F", {"muF"}, f_readout}));
    p.events.push_back(at(3.0, 0, ReverseStep{d_coupling}));
    p.events.push_back(at(4.0, 0, UnitaryStep{{"s"}, u.adjoint()}));
    p.events.push_back(at(4.0, 1, CoupleStep{w_coupling}));
    p.events.push_back(at(4.0, 2, RegisterStep{"muW", "dW"}));
    p.events.push_back(at(4.0, 3, ObserveStep{"W", {"muW"}, w_readout}));
    return p;
}

GedankenResult interference_experiment(const Operator &u, bool register_memory) {
    const MeasurementChain chain = build_chain(interference_protocol(u, register_memory));
    const Distribution dist = chain_distribution(chain);
    double closed = 1.0;
    if (register_memory) {
        const double p1 = std::norm(u(0, 0));
        const double p2 = std::norm(u(1, 0));
        closed = p1 * p1 + p2 * p2;
    }
    GedankenResult r{register_memory ? "interference-registered" : "interference", {}};
    r.entries.push_back({{"back"}, closed, probability_of(chain, dist, {{1, "back"}})});
    return r;
}

Protocol reduced_protocol(const TwoObserverParams &params) {
    validate(params);
    Protocol p{CompositeSpace({{"s", 2, Role::system}}), InitialState::pure(params.s0), {}, 0.0};
    p.events.push_back(at(1.0, 0, UnitaryStep{{"s"}, params.u_f}));
    p.events.push_back(
        at(1.0, 1, ObserveStep{"F", {"s"}, Observable(params.basis_f, {0, 1}, {{"sF1", 1.0}, {"sF2", 2.0}})}));
    p.events.push_back(at(2.0, 0, UnitaryStep{{"s"}, params.u_w}));
    p.events.push_back(
        at(2.0, 1, ObserveStep{"W", {"s"}, Observable(params.basis_w, {0, 1}, {{"sW1", 1.0}, {"sW2", 2.0}})}));
    return p;
}

double ReducedResult::max_difference() const {
    double worst = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            worst = std::max(worst, std::abs(closed_form[i][j] - reduced[i][j]));
            for (const auto &c : composite) {
                worst = std::max(worst, std::abs(closed_form[i][j] - c[i][j]));
            }
        }
    }
    return worst;
}

ReducedResult reduced_path_probabilities(const TwoObserverParams &params) {
    if (!(std::abs(params.alpha - Complex(1.0)) <= kParamTolerance)) {
        throw Error(ErrorCode::invalid_state, "reduced path probabilities need alpha = 1, beta = 0");
    }
    const auto amps = system_amplitudes(params);
    ReducedResult r;
    // A_1 = (F 1, W 1), A_2 = (F 2, W 1), A_3 = (F 1, W 2), A_4 = (F 2, W 2)
    r.closed_form = {{{norm2(amps.a[0]), norm2(amps.a[2])}, {norm2(amps.a[1]), norm2(amps.a[3])}}};

    const MeasurementChain reduced = build_chain(reduced_protocol(params));
    const Distribution rd = chain_distribution(reduced);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            r.reduced[i][j] = rd.at(OutcomeSequence{{i, j}});
        }
    }

    // with alpha = 1: phi1 <-> (1,1), phi2 <-> (2,2), phi3 <-> (2,1), phi4 <-> (1,2)
    const char *label[2][2] = {{"yes", "phi4"}, {"phi3", "no"}};
    const TwoObserverScenario kinds[] = {TwoObserverScenario::a, TwoObserverScenario::b, TwoObserverScenario::c};
    for (std::size_t k = 0; k < 3; ++k) {
        const MeasurementChain chain = build_chain(two_observer_protocol(params, kinds[k], true));
        const Distribution dist = chain_distribution(chain);
        const std::size_t w_pos = chain.length() - 1;
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                r.composite[k][i][j] = probability_of(chain, dist, {{w_pos, label[i][j]}});
            }
        }
    }
    return r;
}

} // namespace qchain
