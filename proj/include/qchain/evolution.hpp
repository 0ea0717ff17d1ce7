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

/**
 * @file
 * Sequence probabilities from a prepared density operator carried through
 * the chain by partial (projector-interrupted) evolution operators, read out
 * by a trace at the last time. Independent of the path-sum route in
 * feynman.hpp; the two must agree entry by entry.
 */

#pragma once

#include "qchain/chain.hpp"
#include "qchain/distribution.hpp"

namespace qchain {

inline constexpr double kDensityTolerance = 1e-10;

/// U_L Pi^{L-1}_{m_{L-1}} U_{L-1} ... Pi^1_{m_1} U_1 for the intermediate
/// classes (m_1, ..., m_{L-1}).
Operator partial_evolution(const MeasurementChain &chain, const OutcomeSequence &intermediates);

/// U_L ... U_1, the uninterrupted evolution from t_0 to t_L.
Operator full_evolution(const MeasurementChain &chain);

/// Throws invalid_state unless rho is Hermitian, has unit trace and no
/// eigenvalue below -tol.
void check_density_operator(const Operator &rho, double tol = kDensityTolerance);

/// U_partial rho0 U_partial^dagger. rho0 is validated first.
Operator conditional_state(const MeasurementChain &chain, const OutcomeSequence &intermediates,
                           const Operator &rho0);

/// tr[Pi^L_{m_L} rho(m_1..m_{L-1})] for the chain's own initial state.
double trace_probability(const MeasurementChain &chain, const OutcomeSequence &outcomes);

/// Above this dimension evolution_distribution keeps rho = V V^dagger in
/// factored form (one column per prepared component).
inline constexpr std::size_t kFactoredEvolutionDim = 256;

/// trace_probability for every outcome sequence.
Distribution evolution_distribution(const MeasurementChain &chain);

/// U_partial^dagger U_partial.
Operator partial_gram(const MeasurementChain &chain, const OutcomeSequence &intermediates);

/**
 * Pi_1(t_1) ... Pi_{L-1}(t_{L-1}) Pi_{L-1}(t_{L-1}) ... Pi_1(t_1), with the
 * Heisenberg-picture projectors Pi(t_l) = U(t_l,t_0)^dagger Pi U(t_l,t_0).
 * Equals partial_gram and differs from the identity whenever an
 * intermediate projector is nontrivial.
 */
Operator heisenberg_projector_product(const MeasurementChain &chain,
                                      const OutcomeSequence &intermediates);

} // namespace qchain
