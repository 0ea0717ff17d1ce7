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

#include "qchain/evolution.hpp"
#include "qchain/feynman.hpp"
#include "support/random_chain.hpp"

using namespace qchain;

namespace {

Observable z_observable() { return Observable::computational(2, {0, 1}, {{"0", 0.0}, {"1", 1.0}}); }

MeasurementChain two_hadamards() {
    return make_chain(InitialState::pure(basis_vector(2, 0)), {hadamard(), hadamard()}, {z_observable(), z_observable()});
}

OutcomeSequence seq(std::vector<std::size_t> v) { return OutcomeSequence{std::move(v)}; }

} // namespace

TEST_CASE("virtual amplitude, identity dynamics") {
    const MeasurementChain chain = make_chain(InitialState::pure(basis_vector(3, 0)), {identity(3), identity(3)},
                                              {Observable::nondegenerate(identity(3)),
                                               Observable::nondegenerate(identity(3))});
    CHECK(virtual_amplitude(chain, VirtualPath{{0, 0}}) == Complex(1.0));
    CHECK(virtual_amplitude(chain, VirtualPath{{0, 2}}) == Complex(0.0));
    CHECK(virtual_amplitude(chain, VirtualPath{{1, 1}}) == Complex(0.0));
}

TEST_CASE("virtual amplitude through one Hadamard") {
    const MeasurementChain chain = make_chain(InitialState::pure(basis_vector(2, 0)), {hadamard()}, {z_observable()});
    CHECK(std::abs(virtual_amplitude(chain, VirtualPath{{0}}) - 1.0 / std::sqrt(2.0)) < 1e-15);
    CHECK_THROWS_AS(virtual_amplitude(chain, VirtualPath{{0, 0}}), Error);
}

TEST_CASE("real amplitude with nondegenerate intermediates is a single path") {
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        MeasurementChain chain = testing_support::random_chain(seed);
        if (chain.length() < 2 || !chain.initial.is_pure()) {
            continue;
        }
        for (auto &obs : chain.observables) {
            obs = Observable::nondegenerate(obs.basis());
        }
        std::vector<std::size_t> path(chain.length(), 1);
        const OutcomeSequence mids{std::vector<std::size_t>(path.begin(), path.end() - 1)};
        CHECK(std::abs(real_amplitude(chain, mids, 1) - virtual_amplitude(chain, VirtualPath{path})) < 1e-15);
        ++checked;
    }
    CHECK(checked > 0);
}

TEST_CASE("single-class intermediate reduces to the full evolution") {
    const Operator u1 = haar_random_unitary(3, 1);
    const Operator u2 = haar_random_unitary(3, 2);
    const Vector psi = haar_random_state(3, 3);
    const MeasurementChain chain = make_chain(InitialState::pure(psi), {u1, u2},
                                              {Observable::trivial(3), Observable::nondegenerate(identity(3))});
    const Vector direct = u2 * u1 * psi;
    for (std::size_t n = 0; n < 3; ++n) {
        CHECK(std::abs(real_amplitude(chain, seq({0}), n) - direct(static_cast<Index>(n))) < 1e-14);
    }
}

TEST_CASE("repeated measurement with identity dynamics") {
    const MeasurementChain chain = make_chain(InitialState::pure(basis_vector(2, 0)), {identity(2), identity(2), identity(2)},
                                              {z_observable(), z_observable(), z_observable()});
    const Distribution d = chain_distribution(chain);
    CHECK(d.at(seq({0, 0, 0})) == doctest::Approx(1.0));
    CHECK(d.at(seq({0, 1, 0})) == 0.0);
    CHECK(trace_probability(chain, seq({0, 0, 0})) == doctest::Approx(1.0));
    CHECK(trace_probability(chain, seq({1, 1, 1})) == doctest::Approx(0.0));
}

TEST_CASE("two Hadamards give a uniform distribution") {
    const Distribution d = chain_distribution(two_hadamards());
    const oracle::Dist ref = oracle::distribution(testing_support::to_oracle(two_hadamards()));
    for (const auto &[s, p] : d) {
        CHECK(p == doctest::Approx(0.25).epsilon(1e-14));
        CHECK(std::abs(p - ref.at(s.classes)) < 1e-15);
    }
    CHECK(d.size() == 4);
}

TEST_CASE("engines agree with the oracle on random chains") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        CAPTURE(seed);
        const MeasurementChain chain = testing_support::random_chain(seed);
        const Distribution ref = testing_support::oracle_distribution(chain);
        const Distribution f = chain_distribution(chain);
        const Distribution e = evolution_distribution(chain);
        CHECK(max_abs_difference(f, ref) < 1e-12);
        CHECK(max_abs_difference(e, ref) < 1e-12);
        CHECK(std::abs(total_probability(f) - 1.0) < 1e-12);
        for (const auto &[s, p] : e) {
            CHECK(std::abs(trace_probability(chain, s) - p) < 1e-12);
        }
    }
}

TEST_CASE("Markov factorization when every observable is nondegenerate") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        MeasurementChain chain = testing_support::random_chain(seed);
        for (auto &obs : chain.observables) {
            obs = Observable::nondegenerate(obs.basis());
        }
        chain.initial = InitialState::pure(haar_random_state(chain.dim(), seed + 1000));
        const Distribution d = chain_distribution(chain);
        for (const auto &[s, p] : d) {
            double product = 1.0;
            Vector prev = chain.initial.pure_state();
            for (std::size_t l = 0; l < chain.length(); ++l) {
                const Vector q = chain.observables[l].basis_vector(s[l]);
                product *= std::norm(q.dot(chain.unitaries[l] * prev));
                prev = q;
            }
            CHECK(std::abs(p - product) < 1e-12);
        }
    }
}

TEST_CASE("degenerate intermediate breaks the Markov product") {
    // trivial intermediate class: coherent sum gives 1, the product of
    // per-path probabilities gives 1/2
    const MeasurementChain chain = make_chain(InitialState::pure(basis_vector(2, 0)), {hadamard(), hadamard()},
                                              {Observable::trivial(2), z_observable()});
    const Distribution d = chain_distribution(chain);
    CHECK(d.at(seq({0, 0})) == doctest::Approx(1.0));
    double incoherent = 0.0;
    for (std::size_t n = 0; n < 2; ++n) {
        incoherent += std::norm(virtual_amplitude(chain, VirtualPath{{n, 0}}));
    }
    CHECK(incoherent == doctest::Approx(0.5));
}

TEST_CASE("final degenerate class sums squared amplitudes") {
    // final class {0, 1}: sum of |amp|^2 = 1 while |sum amp|^2 = 2
    const MeasurementChain chain =
        make_chain(InitialState::pure(basis_vector(2, 0)), {hadamard()}, {Observable::trivial(2)});
    const Distribution d = chain_distribution(chain);
    CHECK(d.at(seq({0})) == doctest::Approx(1.0));
    const Complex a0 = real_amplitude(chain, seq({}), 0);
    const Complex a1 = real_amplitude(chain, seq({}), 1);
    CHECK(std::norm(a0 + a1) == doctest::Approx(2.0));
}

TEST_CASE("mixtures are linear") {
    const Vector a = haar_random_state(3, 7);
    const Vector b = haar_random_state(3, 8);
    MeasurementChain chain = testing_support::random_chain(11);
    chain = make_chain(InitialState::mixed({{0.3, a}, {0.7, b}}), {haar_random_unitary(3, 1), haar_random_unitary(3, 2)},
                       {Observable::computational(3, {0, 1, 1}, {{"a", 0.0}, {"b", 1.0}}),
                        Observable::nondegenerate(haar_random_unitary(3, 3))});
    auto pure = chain;
    pure.initial = InitialState::pure(a);
    const Distribution da = chain_distribution(pure);
    pure.initial = InitialState::pure(b);
    const Distribution db = chain_distribution(pure);
    const Distribution mixed = chain_distribution(chain);
    CHECK(max_abs_difference(mixed, accumulate(accumulate({}, da, 0.3), db, 0.7)) < 1e-12);
    CHECK(max_abs_difference(evolution_distribution(chain), mixed) < 1e-12);
}

TEST_CASE("pruning drops negligible paths only") {
    const MeasurementChain chain = testing_support::random_chain(21);
    const Distribution full = chain_distribution(chain);
    const Distribution pruned = chain_distribution(chain, FeynmanOptions{1e-14});
    CHECK(max_abs_difference(full, pruned) < 1e-12);
}

TEST_CASE("partial evolution with trivial intermediates is the full evolution") {
    const Operator u1 = haar_random_unitary(3, 4);
    const Operator u2 = haar_random_unitary(3, 5);
    const MeasurementChain chain = make_chain(InitialState::pure(basis_vector(3, 0)), {u1, u2},
                                              {Observable::trivial(3), Observable::trivial(3)});
    CHECK((partial_evolution(chain, seq({0})) - u2 * u1).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((full_evolution(chain) - u2 * u1).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("mismatched intermediate class kills the state") {
    const MeasurementChain chain = make_chain(InitialState::pure(basis_vector(2, 0)), {identity(2), identity(2)},
                                              {z_observable(), z_observable()});
    CHECK((partial_evolution(chain, seq({1})) * basis_vector(2, 0)).norm() == 0.0);
    CHECK_THROWS_AS(partial_evolution(chain, seq({2})), Error);
    CHECK_THROWS_AS(partial_evolution(chain, seq({0, 0})), Error);
}

TEST_CASE("partial evolutions sum to the full evolution") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const MeasurementChain chain = testing_support::random_chain(seed);
        const auto counts = class_counts(chain);
        Operator sum = Operator::Zero(static_cast<Index>(chain.dim()), static_cast<Index>(chain.dim()));
        for (const auto &mids : all_sequences(std::span(counts.data(), counts.size() - 1))) {
            sum += partial_evolution(chain, mids);
        }
        CHECK((sum - full_evolution(chain)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("partial evolution is not unitary; its Gram is the projector product") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const MeasurementChain chain = testing_support::random_chain(seed);
        if (chain.length() < 2) {
            continue;
        }
        const auto counts = class_counts(chain);
        for (const auto &mids : all_sequences(std::span(counts.data(), counts.size() - 1))) {
            const Operator gram = partial_gram(chain, mids);
            CHECK((gram - heisenberg_projector_product(chain, mids)).cwiseAbs().maxCoeff() < 1e-12);
            bool nontrivial = false;
            for (std::size_t l = 0; l + 1 < chain.length(); ++l) {
                nontrivial = nontrivial || chain.observables[l].num_classes() > 1;
            }
            if (nontrivial) {
                CHECK((gram - identity(chain.dim())).cwiseAbs().maxCoeff() > 1e-3);
            }
        }
    }
}

TEST_CASE("conditional states are Hermitian and positive") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const MeasurementChain chain = testing_support::random_chain(seed);
        const auto counts = class_counts(chain);
        const Operator rho0 = chain.initial.density_matrix();
        for (const auto &mids : all_sequences(std::span(counts.data(), counts.size() - 1))) {
            const Operator rho = conditional_state(chain, mids, rho0);
            CHECK(hermiticity_deviation(rho) < 1e-12);
            Eigen::SelfAdjointEigenSolver<Operator> solver(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
            CHECK(solver.eigenvalues().minCoeff() >= -1e-10);
            if (chain.initial.is_pure()) {
                CHECK(solver.eigenvalues().head(chain.dim() - 1).cwiseAbs().maxCoeff() < 1e-10);
            }
        }
    }
}

TEST_CASE("trivial intermediates conjugate the state unitarily") {
    const Vector psi = haar_random_state(3, 1);
    const Operator u1 = haar_random_unitary(3, 2);
    const MeasurementChain chain = make_chain(InitialState::pure(psi), {u1, identity(3)},
                                              {Observable::trivial(3), Observable::trivial(3)});
    const Operator rho = conditional_state(chain, seq({0}), chain.initial.density_matrix());
    CHECK(std::abs(rho.trace() - 1.0) < 1e-14);
    CHECK((rho - u1 * outer(psi, psi) * u1.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("density operator validation") {
    CHECK_NOTHROW(check_density_operator(0.5 * identity(2)));
    CHECK_THROWS_AS(check_density_operator(identity(2)), Error);
    Operator neg = Operator::Zero(2, 2);
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    CHECK_THROWS_AS(check_density_operator(neg), Error);
    Operator skew = 0.5 * identity(2);
    skew(0, 1) = 0.3;
    CHECK_THROWS_AS(check_density_operator(skew), Error);
    const MeasurementChain chain = two_hadamards();
    CHECK_THROWS_AS(conditional_state(chain, seq({0}), 0.5 * identity(3)), Error);
}

TEST_CASE("factored evolution route matches the dense one") {
    // block-diagonal embedding of a small chain into a dimension above the
    // factored threshold
    const MeasurementChain small = testing_support::random_chain(4);
    const std::size_t n = small.dim();
    const std::size_t big = (kFactoredEvolutionDim / n + 1) * n;
    const std::size_t copies = big / n;
    auto lift = [&](const Operator &u) { return tensor_product(identity(copies), u); };
    std::vector<Operator> unitaries;
    std::vector<Observable> observables;
    for (std::size_t l = 0; l < small.length(); ++l) {
        unitaries.push_back(lift(small.unitaries[l]));
        observables.push_back(lift_observable(small.observables[l], std::vector<std::size_t>{1},
                                              std::vector<std::size_t>{copies, n}));
    }
    std::vector<InitialState::Component> comps;
    for (const auto &c : small.initial.components()) {
        comps.push_back({c.weight, tensor_product(basis_vector(copies, copies - 1), c.state)});
    }
    const InitialState init = small.initial.is_pure() ? InitialState::pure(comps.front().state)
                                                      : InitialState::mixed(comps);
    const MeasurementChain large = make_chain(init, unitaries, observables);
    REQUIRE(large.dim() > kFactoredEvolutionDim);
    CHECK(max_abs_difference(evolution_distribution(large), evolution_distribution(small)) < 1e-12);
}

TEST_CASE("distribution helpers") {
    const std::vector<std::size_t> counts{2, 3};
    const auto all = all_sequences(counts);
    CHECK(all.size() == 6);
    CHECK(all.front() == seq({0, 0}));
    CHECK(all.back() == seq({1, 2}));
    Distribution d{{seq({0, 0}), 0.25}, {seq({0, 1}), 0.25}, {seq({1, 1}), 0.5}};
    const std::vector<std::size_t> keep{1};
    const Distribution m = marginal(d, keep);
    CHECK(m.at(seq({0})) == doctest::Approx(0.25));
    CHECK(m.at(seq({1})) == doctest::Approx(0.75));
    CHECK(total_probability(d) == doctest::Approx(1.0));
    CHECK(clamp_probability(-1e-15) == 0.0);
    CHECK(clamp_probability(0.3) == 0.3);
    CHECK(max_abs_difference(d, {{seq({0, 0}), 0.25}}) == doctest::Approx(0.5));
}
