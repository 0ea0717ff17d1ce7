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

#include "qchain/feynman.hpp"

#include <cmath>
#include <functional>

namespace qchain {

namespace {

const Vector &prepared(const MeasurementChain &chain, std::size_t component) {
    const auto &components = chain.initial.components();
    if (component >= components.size()) {
        throw Error(ErrorCode::index_out_of_range, "initial-state component out of range");
    }
    return components[component].state;
}

// <q^l_i| U_l |q^{l-1}_j> for l >= 2 (zero-based level index l-1).
Operator transition_matrix(const MeasurementChain &chain, std::size_t level) {
    const Observable &to = chain.observables[level];
    const Observable &from = chain.observables[level - 1];
    Operator t = chain.unitaries[level];
    if (!from.is_computational()) {
        t = t * from.basis();
    }
    if (!to.is_computational()) {
        t = to.basis().adjoint() * t;
    }
    return t;
}

Vector first_amplitudes(const MeasurementChain &chain, const Vector &psi) {
    const Observable &to = chain.observables.front();
    Vector a = chain.unitaries.front() * psi;
    if (!to.is_computational()) {
        a = to.basis().adjoint() * a;
    }
    return a;
}

void check_shape(const MeasurementChain &chain) {
    if (chain.length() == 0 || chain.observables.size() != chain.length()) {
        throw Error(ErrorCode::schema_error, "chain needs one observable per interval unitary");
    }
}

Distribution component_distribution(const MeasurementChain &chain, const Vector &psi,
                                     const FeynmanOptions &options) {
    const std::size_t length = chain.length();
    const Vector start = first_amplitudes(chain, psi);
    std::vector<Operator> transitions;
    transitions.reserve(length);
    transitions.emplace_back(); // level 0 uses `start`
    for (std::size_t level = 1; level < length; ++level) {
        transitions.push_back(transition_matrix(chain, level));
    }

    const auto counts = class_counts(chain);
    const std::span<const std::size_t> intermediate_counts(counts.data(), length - 1);
    const Observable &last = chain.observables.back();
    const auto n_final = static_cast<Index>(last.dim());

    Distribution dist;
    Vector final_amp(n_final);
    for (const OutcomeSequence &tuple : all_sequences(intermediate_counts)) {
        final_amp.setZero();
        if (length == 1) {
            final_amp = start;
        } else {
            // depth-first over virtual paths; `level` is the zero-based index of
            // the intermediate measurement being chosen
            std::function<void(std::size_t, std::size_t, Complex)> walk =
                [&](std::size_t level, std::size_t prev, Complex amp) {
                    if (level == length - 1) {
                        final_amp.noalias() += amp * transitions[level].col(static_cast<Index>(prev));
                        return;
                    }
                    for (const std::size_t n : chain.observables[level].members(tuple[level])) {
                        const Complex step = level == 0
                                                 ? start(static_cast<Index>(n))
                                                 : transitions[level](static_cast<Index>(n),
                                                                      static_cast<Index>(prev));
                        const Complex next = amp * step;
                        if (options.prune_below > 0.0 && std::abs(next) < options.prune_below) {
                            continue;
                        }
                        walk(level + 1, n, next);
                    }
                };
            walk(0, 0, Complex(1.0));
        }
        OutcomeSequence full = tuple;
        full.classes.push_back(0);
        for (std::size_t m = 0; m < last.num_classes(); ++m) {
            double p = 0.0;
            for (const std::size_t n : last.members(m)) {
                p += std::norm(final_amp(static_cast<Index>(n)));
            }
            full.classes.back() = m;
            dist[full] = p;
        }
    }
    return dist;
}

} // namespace

Complex virtual_amplitude(const MeasurementChain &chain, const VirtualPath &path, std::size_t component) {
    check_shape(chain);
    if (path.indices.size() != chain.length()) {
        throw Error(ErrorCode::dimension_mismatch, "virtual path length differs from the chain length");
    }
    Vector prev = prepared(chain, component);
    Complex amp(1.0);
    for (std::size_t level = 0; level < chain.length(); ++level) {
        const Observable &obs = chain.observables[level];
        if (path.indices[level] >= obs.dim()) {
            throw Error(ErrorCode::index_out_of_range, "virtual path index out of range");
        }
        const Vector here = obs.basis_vector(path.indices[level]);
        amp *= here.dot(chain.unitaries[level] * prev);
        prev = here;
    }
    return amp;
}

Complex real_amplitude(const MeasurementChain &chain, const OutcomeSequence &intermediates,
                       std::size_t final_index, std::size_t component) {
    check_shape(chain);
    const std::size_t length = chain.length();
    if (intermediates.size() + 1 != length) {
        throw Error(ErrorCode::dimension_mismatch, "expected " + std::to_string(length - 1) +
                                                       " intermediate outcomes");
    }
    for (std::size_t level = 0; level + 1 < length; ++level) {
        if (intermediates[level] >= chain.observables[level].num_classes()) {
            throw Error(ErrorCode::index_out_of_range, "intermediate outcome class out of range");
        }
    }
    if (final_index >= chain.observables.back().dim()) {
        throw Error(ErrorCode::index_out_of_range, "final basis index out of range");
    }

    VirtualPath path{std::vector<std::size_t>(length, 0)};
    path.indices.back() = final_index;
    Complex sum(0.0);
    std::function<void(std::size_t)> enumerate = [&](std::size_t level) {
        if (level + 1 == length) {
            sum += virtual_amplitude(chain, path, component);
            return;
        }
        for (const std::size_t n : chain.observables[level].members(intermediates[level])) {
            path.indices[level] = n;
            enumerate(level + 1);
        }
    };
    enumerate(0);
    return sum;
}

Distribution chain_distribution(const MeasurementChain &chain, const FeynmanOptions &options) {
    check_shape(chain);
    const auto &components = chain.initial.components();
    if (components.size() == 1) {
        return component_distribution(chain, components.front().state, options);
    }
    Distribution dist;
    for (const auto &c : components) {
        dist = accumulate(dist, component_distribution(chain, c.state, options), c.weight);
    }
    return dist;
}

} // namespace qchain
