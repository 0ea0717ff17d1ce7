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
 * Probabilities of whole outcome sequences from path amplitudes.
 *
 * A virtual path visits one eigenvector of each measured observable and
 * carries the product of the interval transition amplitudes. Paths that agree
 * on every intermediate eigenvalue class are indistinguishable and their
 * amplitudes add; the squared modulus of the sum is the probability of the
 * path ending at a given final eigenvector, and those probabilities add over
 * the final class.
 */

#pragma once

#include <cstddef>

#include "qchain/chain.hpp"
#include "qchain/distribution.hpp"

namespace qchain {

struct FeynmanOptions {
    /// Skip path prefixes whose amplitude modulus is below this bound.
    /// 0 disables pruning.
    double prune_below = 0.0;
};

/// prod_l <q^l_{n_l}| U_l |q^{l-1}_{n_{l-1}}>, starting from the prepared
/// component `component` of the initial state.
Complex virtual_amplitude(const MeasurementChain &chain, const VirtualPath &path,
                          std::size_t component = 0);

/**
 * Sum of virtual_amplitude over every path whose intermediate indices
 * n_1..n_{L-1} lie in the classes `intermediates` (m_1..m_{L-1}) and which
 * ends at final basis index `final_index`. Enumerates paths one by one.
 */
Complex real_amplitude(const MeasurementChain &chain, const OutcomeSequence &intermediates,
                       std::size_t final_index, std::size_t component = 0);

/// Probability of every outcome sequence of the chain. Mixtures contribute
/// as the weighted sum of their components' distributions.
Distribution chain_distribution(const MeasurementChain &chain, const FeynmanOptions &options = {});

} // namespace qchain
