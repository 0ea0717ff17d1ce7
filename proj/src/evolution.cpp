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

#include "qchain/evolution.hpp"

#include <cmath>
#include <sstream>

namespace qchain {

namespace {

void check_intermediates(const MeasurementChain &chain, const OutcomeSequence &intermediates) {
    if (chain.length() == 0 || chain.observables.size() != chain.length()) {
        throw Error(ErrorCode::schema_error, "chain needs one observable per interval unitary");
    }
    if (intermediates.size() + 1 != chain.length()) {
        throw Error(ErrorCode::dimension_mismatch,
                    "expected " + std::to_string(chain.length() - 1) + " intermediate outcomes");
    }
    for (std::size_t k = 0; k < intermediates.size(); ++k) {
        if (intermediates[k] >= chain.observables[k].num_classes()) {
            throw Error(ErrorCode::index_out_of_range, "intermediate outcome class out of range");
        }
    }
}

std::vector<Index> members_as_index(const Observable &obs, std::size_t m) {
    const auto &members = obs.members(m);
    return {members.begin(), members.end()};
}

// Pi * x, row masking for computational observables.
Operator project_left(const Observable &obs, std::size_t m, const Operator &x) {
    if (!obs.is_computational()) {
        const Operator q = obs.basis()(Eigen::all, members_as_index(obs, m));
        return q * (q.adjoint() * x);
    }
    Operator out = Operator::Zero(x.rows(), x.cols());
    for (const std::size_t n : obs.members(m)) {
        out.row(static_cast<Index>(n)) = x.row(static_cast<Index>(n));
    }
    return out;
}

double class_weight(const Observable &obs, std::size_t m, const Operator &rho) {
    double p = 0.0;
    for (const std::size_t n : obs.members(m)) {
        const auto k = static_cast<Index>(n);
        if (obs.is_computational()) {
            p += rho(k, k).real();
        } else {
            const auto q = obs.basis().col(k);
            p += q.dot(rho * q).real();
        }
    }
    return p;
}

// ||Pi v||_F^2 summed over the members of class m.
double factor_weight(const Observable &obs, std::size_t m, const Operator &v) {
    if (obs.is_computational()) {
        double p = 0.0;
        for (const std::size_t n : obs.members(m)) {
            p += v.row(static_cast<Index>(n)).squaredNorm();
        }
        return p;
    }
    const Operator q = obs.basis()(Eigen::all, members_as_index(obs, m));
    return (q.adjoint() * v).squaredNorm();
}

// rho = V V^dagger carried through the projected evolution column by column.
void factored_walk(const MeasurementChain &chain, std::size_t level, const Operator &v, OutcomeSequence &prefix,
                   Distribution &dist) {
    const Operator next = chain.unitaries[level] * v;
    const Observable &obs = chain.observables[level];
    if (level + 1 == chain.length()) {
        prefix.classes.push_back(0);
        for (std::size_t m = 0; m < obs.num_classes(); ++m) {
            prefix.classes.back() = m;
            dist[prefix] = factor_weight(obs, m, next);
        }
        prefix.classes.pop_back();
        return;
    }
    for (std::size_t m = 0; m < obs.num_classes(); ++m) {
        prefix.classes.push_back(m);
        factored_walk(chain, level + 1, project_left(obs, m, next), prefix, dist);
        prefix.classes.pop_back();
    }
}

Operator conjugate(const Operator &u, const Operator &rho) { return u * rho * u.adjoint(); }

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

} // namespace

Operator partial_evolution(const MeasurementChain &chain, const OutcomeSequence &intermediates) {
    check_intermediates(chain, intermediates);
    Operator u = chain.unitaries.front();
    for (std::size_t level = 1; level < chain.length(); ++level) {
        u = chain.unitaries[level] * project_left(chain.observables[level - 1], intermediates[level - 1], u);
    }
    return u;
}

Operator full_evolution(const MeasurementChain &chain) {
    Operator u = chain.unitaries.at(0);
    for (std::size_t level = 1; level < chain.length(); ++level) {
        u = chain.unitaries[level] * u;
    }
    return u;
}

void check_density_operator(const Operator &rho, double tol) {
    if (rho.rows() != rho.cols() || rho.rows() == 0) {
        throw Error(ErrorCode::invalid_state, "density operator must be a non-empty square matrix");
    }
    const double herm = hermiticity_deviation(rho);
    if (!(herm <= tol)) {
        throw Error(ErrorCode::invalid_state, "density operator not Hermitian, deviation " + fmt(herm));
    }
    const double trace_dev = std::abs(rho.trace() - Complex(1.0));
    if (!(trace_dev <= tol)) {
        throw Error(ErrorCode::invalid_state, "density operator trace differs from 1 by " + fmt(trace_dev));
    }
    const Operator hermitian_part = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Operator> solver(hermitian_part, Eigen::EigenvaluesOnly);
    const double floor = solver.eigenvalues().minCoeff();
    if (!(floor >= -tol)) {
        throw Error(ErrorCode::invalid_state, "density operator has eigenvalue " + fmt(floor));
    }
}

Operator conditional_state(const MeasurementChain &chain, const OutcomeSequence &intermediates,
                           const Operator &rho0) {
    check_density_operator(rho0);
    if (static_cast<std::size_t>(rho0.rows()) != chain.dim()) {
        throw Error(ErrorCode::dimension_mismatch, "density operator dimension differs from the chain");
    }
    return conjugate(partial_evolution(chain, intermediates), rho0);
}

double trace_probability(const MeasurementChain &chain, const OutcomeSequence &outcomes) {
    if (outcomes.size() != chain.length() || chain.length() == 0) {
        throw Error(ErrorCode::dimension_mismatch, "outcome sequence length differs from the chain length");
    }
    OutcomeSequence intermediates{
        std::vector<std::size_t>(outcomes.classes.begin(), outcomes.classes.end() - 1)};
    const Observable &last = chain.observables.back();
    if (outcomes.classes.back() >= last.num_classes()) {
        throw Error(ErrorCode::index_out_of_range, "final outcome class out of range");
    }
    const Operator rho = conjugate(partial_evolution(chain, intermediates), chain.initial.density_matrix());
    return class_weight(last, outcomes.classes.back(), rho);
}

Distribution evolution_distribution(const MeasurementChain &chain) {
    if (chain.length() == 0 || chain.observables.size() != chain.length()) {
        throw Error(ErrorCode::schema_error, "chain needs one observable per interval unitary");
    }
    if (chain.dim() > kFactoredEvolutionDim) {
        const auto &components = chain.initial.components();
        Operator v(static_cast<Index>(chain.dim()), static_cast<Index>(components.size()));
        for (std::size_t k = 0; k < components.size(); ++k) {
            v.col(static_cast<Index>(k)) = std::sqrt(components[k].weight) * components[k].state;
        }
        Distribution dist;
        OutcomeSequence prefix;
        factored_walk(chain, 0, v, prefix, dist);
        return dist;
    }
    const auto counts = class_counts(chain);
    const Operator rho0 = chain.initial.density_matrix();
    const Observable &last = chain.observables.back();
    Distribution dist;
    for (const OutcomeSequence &tuple : all_sequences(std::span(counts.data(), counts.size() - 1))) {
        const Operator rho = conjugate(partial_evolution(chain, tuple), rho0);
        OutcomeSequence full = tuple;
        full.classes.push_back(0);
        for (std::size_t m = 0; m < last.num_classes(); ++m) {
            full.classes.back() = m;
            dist[full] = class_weight(last, m, rho);
        }
    }
    return dist;
}

Operator partial_gram(const MeasurementChain &chain, const OutcomeSequence &intermediates) {
    const Operator u = partial_evolution(chain, intermediates);
    return u.adjoint() * u;
}

Operator heisenberg_projector_product(const MeasurementChain &chain,
                                      const OutcomeSequence &intermediates) {
    check_intermediates(chain, intermediates);
    const auto n = static_cast<Index>(chain.dim());
    // right = Pi_{L-1}(t_{L-1}) ... Pi_1(t_1)
    Operator right = Operator::Identity(n, n);
    Operator elapsed = Operator::Identity(n, n);
    for (std::size_t level = 0; level + 1 < chain.length(); ++level) {
        elapsed = chain.unitaries[level] * elapsed;
        const Operator heisenberg =
            elapsed.adjoint() * chain.observables[level].projector(intermediates[level]) * elapsed;
        right = heisenberg * right;
    }
    return right.adjoint() * right;
}

} // namespace qchain
