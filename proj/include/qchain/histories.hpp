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
 * History families: projector sets at every time t_1..t_L (the last one
 * included), branch states, the Gram matrix of branches and its consistency
 * verdict, and the enlargement of a bare family by witnessing probes and
 * memories.
 */

#pragma once

#include <optional>
#include <vector>

#include "qchain/apparatus.hpp"
#include "qchain/chain.hpp"
#include "qchain/distribution.hpp"

namespace qchain {

inline constexpr double kConsistencyTolerance = 1e-10;

struct HistoryFamily {
    Vector initial;
    std::vector<double> times;
    std::vector<Operator> unitaries;
    /// One projector set per time t_1..t_L.
    std::vector<Observable> projector_sets;

    std::size_t length() const noexcept { return unitaries.size(); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(initial.size()); }
};

/// Times 0, 1, ..., L. Throws like validate_family.
HistoryFamily make_family(Vector initial, std::vector<Operator> unitaries, std::vector<Observable> projector_sets);

/// The family of a chain with a pure preparation; throws invalid_state for a mixture.
HistoryFamily family_from_chain(const MeasurementChain &chain);

/// The measurement chain that perceives an outcome at every time of the family.
MeasurementChain chain_from_family(const HistoryFamily &family);

/// Throws on shape, dimension, normalization or unitarity problems.
void validate_family(const HistoryFamily &family);

/// Pi^L U_L ... Pi^1 U_1 |q_0>, unnormalized.
Vector branch_state(const HistoryFamily &family, const OutcomeSequence &outcomes);

struct DecoherenceMatrix {
    /// Row/column order, lexicographic.
    std::vector<OutcomeSequence> histories;
    /// gram(i, j) = <branch(histories[i]) | branch(histories[j])>
    Operator gram;
};

DecoherenceMatrix decoherence_matrix(const HistoryFamily &family);

struct ConsistencyVerdict {
    bool consistent = true;
    double max_off_diagonal = 0.0;
    /// Pair attaining the maximum (absent for a single history).
    std::optional<std::pair<OutcomeSequence, OutcomeSequence>> worst;
};

/// Consistent iff every off-diagonal magnitude is below `tol`.
ConsistencyVerdict consistency_check(const HistoryFamily &family, double tol = kConsistencyTolerance);
ConsistencyVerdict consistency_check(const DecoherenceMatrix &matrix, double tol = kConsistencyTolerance);

/// Diagonal of the decoherence matrix.
Distribution history_probabilities(const DecoherenceMatrix &matrix);

enum class Witness {
    none,
    /// A probe coupled at that time, never read.
    probe,
    /// A probe coupled and registered in a memory.
    probe_and_memory,
};

struct AugmentedFamily {
    HistoryFamily family;
    CompositeSpace space{{Factor{"s", 2, Role::system}}};
    std::vector<Witness> witnesses;
    /// Per time: index of the extra class collecting unrecorded states, if any.
    std::vector<std::optional<std::size_t>> unrecorded_class;
};

/**
 * Brings observers into a bare family on a single system factor. At each
 * witnessed time t_l a probe d_l (and memory mu_l) with M_l + 1 levels is
 * coupled in the family's own partition right after the free evolution, and
 * the projector set becomes |mu_m><mu_m| (x) |d_m><d_m| (x) pi_m plus one
 * extra class for the orthogonal complement. Composite order: memories,
 * then probes, later times first, then the system.
 *
 * Throws dimension_mismatch unless `witnesses` has one entry per time, and
 * capacity_exceeded when the composite is too large.
 */
AugmentedFamily augment_with_observers(const HistoryFamily &bare, std::span<const Witness> witnesses);

/// Memories and probes at every intermediate time, the last time bare.
std::vector<Witness> default_witnesses(std::size_t length);

/// Distribution when only the last time is perceived: intermediate
/// projectors dropped, evolution (couplings included) kept.
Distribution final_only_distribution(const HistoryFamily &family);

/**
 * max over final classes m_L of |sum_{m_1..m_{L-1}} full(m_1..m_L) - last(m_L)|.
 * last is keyed by one-element sequences.
 */
double marginal_check(const Distribution &full, const Distribution &last);

} // namespace qchain
