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

#include "qchain/distribution.hpp"

#include <algorithm>
#include <cmath>

#include "qchain/chain.hpp"

namespace qchain {

std::vector<OutcomeSequence> all_sequences(std::span<const std::size_t> class_counts) {
    std::vector<OutcomeSequence> out;
    std::size_t count = 1;
    for (const std::size_t c : class_counts) {
        if (c == 0) {
            return out;
        }
        count *= c;
    }
    out.reserve(count);
    OutcomeSequence seq{std::vector<std::size_t>(class_counts.size(), 0)};
    for (std::size_t k = 0; k < count; ++k) {
        out.push_back(seq);
        for (std::size_t pos = class_counts.size(); pos-- > 0;) {
            if (++seq.classes[pos] < class_counts[pos]) {
                break;
            }
            seq.classes[pos] = 0;
        }
    }
    return out;
}

std::vector<std::size_t> class_counts(const MeasurementChain &chain) {
    std::vector<std::size_t> counts;
    counts.reserve(chain.observables.size());
    for (const auto &obs : chain.observables) {
        counts.push_back(obs.num_classes());
    }
    return counts;
}

double total_probability(const Distribution &dist) {
    double total = 0.0;
    for (const auto &[seq, p] : dist) {
        total += p;
    }
    return total;
}

Distribution marginal(const Distribution &dist, std::span<const std::size_t> keep) {
    Distribution out;
    for (const auto &[seq, p] : dist) {
        OutcomeSequence key;
        key.classes.reserve(keep.size());
        for (const std::size_t k : keep) {
            key.classes.push_back(seq.classes.at(k));
        }
        out[key] += p;
    }
    return out;
}

double max_abs_difference(const Distribution &a, const Distribution &b) {
    double worst = 0.0;
    for (const auto &[seq, p] : a) {
        const auto it = b.find(seq);
        worst = std::max(worst, std::abs(p - (it == b.end() ? 0.0 : it->second)));
    }
    for (const auto &[seq, p] : b) {
        if (!a.contains(seq)) {
            worst = std::max(worst, std::abs(p));
        }
    }
    return worst;
}

double clamp_probability(double p) noexcept { return p < 0.0 ? 0.0 : p; }

Distribution accumulate(const Distribution &into, const Distribution &add, double weight) {
    Distribution out = into;
    for (const auto &[seq, p] : add) {
        out[seq] += weight * p;
    }
    return out;
}

} // namespace qchain
