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

#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace qchain {

struct MeasurementChain;

/// Eigenvalue-class indices (m_1, ..., m_L), one per measurement after the
/// preparation.
struct OutcomeSequence {
    std::vector<std::size_t> classes;

    std::size_t size() const noexcept { return classes.size(); }
    std::size_t operator[](std::size_t k) const { return classes[k]; }
    auto operator<=>(const OutcomeSequence &) const = default;
};

/// Basis indices (n_1, ..., n_L) of a virtual path starting at the prepared
/// state.
struct VirtualPath {
    std::vector<std::size_t> indices;
};

/// Probabilities keyed by outcome sequence, in lexicographic sequence order.
/// Values are stored unclamped; clamp() is applied only when reporting.
using Distribution = std::map<OutcomeSequence, double>;

/// Every sequence over the given per-time class counts, lexicographic.
std::vector<OutcomeSequence> all_sequences(std::span<const std::size_t> class_counts);

/// Per-measurement class counts of a chain.
std::vector<std::size_t> class_counts(const MeasurementChain &chain);

double total_probability(const Distribution &dist);

/// Sums out every position not listed in `keep` (kept positions retain order).
Distribution marginal(const Distribution &dist, std::span<const std::size_t> keep);

/// max over the union of keys of |a - b|, treating missing keys as 0.
double max_abs_difference(const Distribution &a, const Distribution &b);

/// Rounding negatives (>= -1e-12 by invariant) mapped to 0 for output.
double clamp_probability(double p) noexcept;

/// `into + weight * add`, entry by entry.
Distribution accumulate(const Distribution &into, const Distribution &add, double weight);

} // namespace qchain
