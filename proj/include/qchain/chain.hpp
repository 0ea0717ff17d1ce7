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

#include <cstddef>
#include <string>
#include <vector>

#include "qchain/error.hpp"
#include "qchain/hilbert.hpp"
#include "qchain/observable.hpp"

namespace qchain {

/**
 * The prepared state at t_0: either a single normalized vector, or a
 * statistical mixture sum_k w_k |psi_k><psi_k| whose components need not be
 * orthogonal. Each component plays the role of the (non-degenerate)
 * preparation outcome, so no separate observable is attached to t_0.
 */
class InitialState {
  public:
    struct Component {
        double weight = 1.0;
        Vector state;
    };

    static InitialState pure(Vector state);
    static InitialState mixed(std::vector<Component> components);

    bool is_pure() const noexcept { return components_.size() == 1 && pure_; }
    std::size_t dim() const noexcept;
    const std::vector<Component> &components() const noexcept { return components_; }
    /// The state vector of a pure preparation; throws invalid_state for a mixture.
    const Vector &pure_state() const;
    /// sum_k w_k |psi_k><psi_k|
    Operator density_matrix() const;

  private:
    std::vector<Component> components_;
    bool pure_ = true;
};

/**
 * Measurements at t_1 < ... < t_L following a preparation at t_0.
 * `unitaries[l-1]` evolves from t_{l-1} to t_l; `observables[l-1]` is measured
 * at t_l. Times are bookkeeping only.
 */
struct MeasurementChain {
    std::vector<double> times;
    std::vector<Operator> unitaries;
    std::vector<Observable> observables;
    InitialState initial = InitialState::pure(basis_vector(1, 0));

    std::size_t length() const noexcept { return unitaries.size(); }
    std::size_t dim() const noexcept { return initial.dim(); }
};

/// Chain with times 0, 1, ..., L.
MeasurementChain make_chain(InitialState initial, std::vector<Operator> unitaries,
                            std::vector<Observable> observables);

struct ValidationIssue {
    ErrorCode code;
    std::string location;
    std::string message;
};

struct ValidationReport {
    std::vector<ValidationIssue> issues;
    bool ok() const noexcept { return issues.empty(); }
};

inline constexpr double kUnitarityTolerance = 1e-10;
inline constexpr double kStateTolerance = 1e-12;

/// Lists every violated chain invariant; empty iff the chain is valid.
ValidationReport validate_chain(const MeasurementChain &chain);

/// Throws the first issue of validate_chain as an Error.
void require_valid(const MeasurementChain &chain);

} // namespace qchain
