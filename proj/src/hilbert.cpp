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

#include "qchain/hilbert.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <string>

namespace qchain {

std::size_t dimension_cap() {
    const char *env = std::getenv("QCHAIN_DIM_CAP");
    if (env == nullptr || *env == '\0') {
        return kDefaultDimensionCap;
    }
    std::size_t value = 0;
    const char *end = env + std::strlen(env);
    const auto [ptr, ec] = std::from_chars(env, end, value);
    if (ec != std::errc{} || ptr != end || value == 0) {
        return kDefaultDimensionCap;
    }
    return value;
}

void check_capacity(std::size_t dim, const char *what) {
    const std::size_t cap = dimension_cap();
    if (dim > cap) {
        throw Error(ErrorCode::capacity_exceeded,
                    std::string(what) + " " + std::to_string(dim) + " exceeds cap " +
                        std::to_string(cap));
    }
}

std::size_t composite_dimension(std::span<const std::size_t> dims) {
    const std::size_t cap = dimension_cap();
    std::size_t total = 1;
    for (const std::size_t d : dims) {
        if (d == 0) {
            throw Error(ErrorCode::dimension_mismatch, "factor dimension must be positive");
        }
        if (total > cap / d) {
            throw Error(ErrorCode::capacity_exceeded, "composite dimension exceeds cap " +
                                                          std::to_string(cap));
        }
        total *= d;
    }
    return total;
}

std::vector<std::size_t> index_digits(std::size_t index, std::span<const std::size_t> dims) {
    std::vector<std::size_t> digits(dims.size());
    for (std::size_t k = dims.size(); k-- > 0;) {
        digits[k] = index % dims[k];
        index /= dims[k];
    }
    return digits;
}

std::size_t compose_index(std::span<const std::size_t> digits, std::span<const std::size_t> dims) {
    std::size_t index = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
        index = index * dims[k] + digits[k];
    }
    return index;
}

FactorSplit::FactorSplit(std::span<const std::size_t> factors, std::span<const std::size_t> dims) {
    std::vector<bool> chosen(dims.size(), false);
    for (const std::size_t f : factors) {
        if (f >= dims.size()) {
            throw Error(ErrorCode::index_out_of_range, "factor index out of range");
        }
        if (chosen[f]) {
            throw Error(ErrorCode::duplicate_label, "factor listed twice");
        }
        chosen[f] = true;
        local_dim_ *= dims[f];
    }
    const std::size_t total = composite_dimension(dims);
    rest_dim_ = total / local_dim_;
    table_.resize(total);

    std::vector<std::size_t> digits(dims.size(), 0);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t local = 0;
        for (const std::size_t f : factors) {
            local = local * dims[f] + digits[f];
        }
        std::size_t rest = 0;
        for (std::size_t k = 0; k < dims.size(); ++k) {
            if (!chosen[k]) {
                rest = rest * dims[k] + digits[k];
            }
        }
        table_[rest * local_dim_ + local] = static_cast<Index>(idx);
        // odometer increment, last factor fastest
        for (std::size_t k = dims.size(); k-- > 0;) {
            if (++digits[k] < dims[k]) {
                break;
            }
            digits[k] = 0;
        }
    }
}

} // namespace qchain
