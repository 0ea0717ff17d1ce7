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

#include "qchain/chain.hpp"

#include <cmath>
#include <sstream>

namespace qchain {

InitialState InitialState::pure(Vector state) {
    InitialState s;
    s.components_.push_back({1.0, std::move(state)});
    s.pure_ = true;
    return s;
}

InitialState InitialState::mixed(std::vector<Component> components) {
    InitialState s;
    s.components_ = std::move(components);
    s.pure_ = false;
    return s;
}

std::size_t InitialState::dim() const noexcept {
    return components_.empty() ? 0 : static_cast<std::size_t>(components_.front().state.size());
}

const Vector &InitialState::pure_state() const {
    if (!is_pure()) {
        throw Error(ErrorCode::invalid_state, "initial state is a mixture, not a pure state");
    }
    return components_.front().state;
}

Operator InitialState::density_matrix() const {
    const auto n = static_cast<Index>(dim());
    Operator rho = Operator::Zero(n, n);
    for (const auto &c : components_) {
        rho.noalias() += c.weight * (c.state * c.state.adjoint());
    }
    return rho;
}

MeasurementChain make_chain(InitialState initial, std::vector<Operator> unitaries,
                            std::vector<Observable> observables) {
    MeasurementChain chain;
    chain.times.resize(unitaries.size() + 1);
    for (std::size_t k = 0; k < chain.times.size(); ++k) {
        chain.times[k] = static_cast<double>(k);
    }
    chain.unitaries = std::move(unitaries);
    chain.observables = std::move(observables);
    chain.initial = std::move(initial);
    return chain;
}

namespace {
std::string fmt_double(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}
} // namespace

ValidationReport validate_chain(const MeasurementChain &chain) {
    ValidationReport report;
    auto add = [&](ErrorCode code, std::string location, std::string message) {
        report.issues.push_back({code, std::move(location), std::move(message)});
    };

    const std::size_t length = chain.length();
    const std::size_t n = chain.dim();
    if (length == 0) {
        add(ErrorCode::schema_error, "unitaries", "chain needs at least one measurement after the preparation");
    }
    if (chain.times.size() != length + 1) {
        add(ErrorCode::schema_error, "times",
            "expected " + std::to_string(length + 1) + " times, got " + std::to_string(chain.times.size()));
    }
    for (std::size_t k = 1; k < chain.times.size(); ++k) {
        if (!(chain.times[k] > chain.times[k - 1])) {
            add(ErrorCode::time_collision, "times[" + std::to_string(k) + "]",
                "non-increasing times at index " + std::to_string(k));
        }
    }
    if (chain.observables.size() != length) {
        add(ErrorCode::schema_error, "observables",
            "expected " + std::to_string(length) + " observables, got " +
                std::to_string(chain.observables.size()));
    }
    for (std::size_t k = 0; k < chain.unitaries.size(); ++k) {
        const Operator &u = chain.unitaries[k];
        const std::string where = "unitaries[" + std::to_string(k) + "]";
        if (static_cast<std::size_t>(u.rows()) != n || static_cast<std::size_t>(u.cols()) != n) {
            add(ErrorCode::dimension_mismatch, where, "unitary shape does not match dimension " + std::to_string(n));
            continue;
        }
        const double dev = unitarity_deviation(u);
        if (!(dev < kUnitarityTolerance)) {
            add(ErrorCode::non_unitary, where, "unitarity violation, max deviation " + fmt_double(dev));
        }
    }
    for (std::size_t k = 0; k < chain.observables.size(); ++k) {
        if (chain.observables[k].dim() != n) {
            add(ErrorCode::dimension_mismatch, "observables[" + std::to_string(k) + "]",
                "observable dimension does not match " + std::to_string(n));
        }
    }

    const auto &components = chain.initial.components();
    if (components.empty()) {
        add(ErrorCode::invalid_state, "initial", "initial state has no components");
    }
    double total_weight = 0.0;
    for (std::size_t k = 0; k < components.size(); ++k) {
        const auto &c = components[k];
        const std::string where = "initial[" + std::to_string(k) + "]";
        if (static_cast<std::size_t>(c.state.size()) != n) {
            add(ErrorCode::dimension_mismatch, where, "component dimension differs from the first component");
            continue;
        }
        if (!(c.weight > 0.0 && c.weight <= 1.0)) {
            add(ErrorCode::invalid_state, where, "weight " + fmt_double(c.weight) + " outside (0, 1]");
        }
        total_weight += c.weight;
        const double norm_dev = std::abs(c.state.norm() - 1.0);
        if (!(norm_dev <= kStateTolerance)) {
            add(ErrorCode::invalid_state, where, "state not normalized, |norm - 1| = " + fmt_double(norm_dev));
        }
    }
    if (!components.empty() && !(std::abs(total_weight - 1.0) <= kStateTolerance)) {
        add(ErrorCode::invalid_state, "initial", "mixture weights sum to " + fmt_double(total_weight));
    }
    return report;
}

void require_valid(const MeasurementChain &chain) {
    const ValidationReport report = validate_chain(chain);
    if (!report.ok()) {
        const auto &first = report.issues.front();
        throw Error(first.code, first.message, first.location);
    }
}

} // namespace qchain
