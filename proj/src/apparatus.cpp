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

#include "qchain/apparatus.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace qchain {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

std::vector<std::size_t> coupling_factors(const CompositeSpace &space, const CouplingSpec &spec) {
    std::vector<std::size_t> factors{space.index_of(spec.probe)};
    for (const auto &t : spec.targets) {
        const std::size_t k = space.index_of(t);
        if (k == factors.front()) {
            throw Error(ErrorCode::invalid_event, "probe '" + spec.probe + "' is also a coupling target");
        }
        factors.push_back(k);
    }
    if (spec.targets.empty()) {
        throw Error(ErrorCode::invalid_event, "coupling of probe '" + spec.probe + "' has no targets");
    }
    return factors;
}

// Pointer level reached from `level` when class `m` (1-based shift) fires.
std::size_t shifted_level(Completion completion, std::size_t level, std::size_t shift, std::size_t classes) {
    if (completion == Completion::transposition) {
        if (level == 0) {
            return shift;
        }
        return level == shift ? 0 : level;
    }
    if (level > classes) {
        return level;
    }
    return (level + shift) % (classes + 1);
}

} // namespace

std::string_view to_string(Role role) noexcept {
    switch (role) {
    case Role::system:
        return "system";
    case Role::probe:
        return "probe";
    case Role::memory:
        return "memory";
    }
    return "system";
}

CompositeSpace::CompositeSpace(std::vector<Factor> factors) : factors_(std::move(factors)) {
    if (factors_.empty()) {
        throw Error(ErrorCode::schema_error, "composite space needs at least one factor");
    }
    std::set<std::string> seen;
    for (const Factor &f : factors_) {
        if (!seen.insert(f.label).second) {
            throw Error(ErrorCode::duplicate_label, "factor label '" + f.label + "' declared twice");
        }
        if (f.dim < 2) {
            throw Error(ErrorCode::dimension_mismatch, "factor '" + f.label + "' must have dimension >= 2");
        }
        dims_.push_back(f.dim);
    }
    dim_ = composite_dimension(dims_);
}

std::size_t CompositeSpace::index_of(const std::string &label) const {
    for (std::size_t k = 0; k < factors_.size(); ++k) {
        if (factors_[k].label == label) {
            return k;
        }
    }
    throw Error(ErrorCode::unknown_label, "unknown factor '" + label + "'");
}

std::vector<std::size_t> CompositeSpace::indices_of(std::span<const std::string> labels) const {
    std::vector<std::size_t> out;
    out.reserve(labels.size());
    for (const auto &l : labels) {
        const std::size_t k = index_of(l);
        if (std::find(out.begin(), out.end(), k) != out.end()) {
            throw Error(ErrorCode::duplicate_label, "factor '" + l + "' listed twice");
        }
        out.push_back(k);
    }
    return out;
}

std::size_t CompositeSpace::dim_of(std::span<const std::string> labels) const {
    std::size_t d = 1;
    for (const std::size_t k : indices_of(labels)) {
        d *= dims_[k];
    }
    return d;
}

Vector CompositeSpace::product_state(const std::map<std::string, Vector> &states) const {
    for (const auto &[label, v] : states) {
        const std::size_t k = index_of(label);
        if (static_cast<std::size_t>(v.size()) != dims_[k]) {
            throw Error(ErrorCode::dimension_mismatch, "state for factor '" + label + "' has the wrong dimension");
        }
    }
    Vector out = Vector::Ones(1);
    for (const Factor &f : factors_) {
        const auto it = states.find(f.label);
        const Vector local = it == states.end() ? basis_vector(f.dim, 0) : it->second;
        out = tensor_product(out, local);
    }
    return out;
}

Operator to_composite(const LocalOperator &local, const CompositeSpace &space) {
    return embed(local.op, local.factors, space.dims());
}

void apply(const LocalOperator &local, const CompositeSpace &space, Operator &target) {
    apply_local(local.op, local.factors, space.dims(), target);
}

void apply(const LocalOperator &local, const CompositeSpace &space, Vector &target) {
    apply_local(local.op, local.factors, space.dims(), target);
}

LocalOperator local_coupling(const CompositeSpace &space, const CouplingSpec &spec) {
    auto factors = coupling_factors(space, spec);
    const std::size_t probe_dim = space.dims()[factors.front()];
    std::size_t target_dim = 1;
    for (std::size_t k = 1; k < factors.size(); ++k) {
        target_dim *= space.dims()[factors[k]];
    }
    const Observable &partition = spec.partition;
    if (partition.dim() != target_dim) {
        throw Error(ErrorCode::dimension_mismatch, "partition dimension " + std::to_string(partition.dim()) +
                                                       " differs from the coupling targets (" +
                                                       std::to_string(target_dim) + ")");
    }
    const std::size_t classes = partition.num_classes();
    if (probe_dim < classes + 1) {
        throw Error(ErrorCode::invalid_event, "probe '" + spec.probe + "' has " + std::to_string(probe_dim) +
                                                  " levels, needs " + std::to_string(classes + 1));
    }
    const auto td = static_cast<Index>(target_dim);
    Operator op = Operator::Zero(static_cast<Index>(probe_dim) * td, static_cast<Index>(probe_dim) * td);
    for (std::size_t c = 0; c < classes; ++c) {
        const Operator pi = partition.projector(c);
        for (std::size_t j = 0; j < probe_dim; ++j) {
            const std::size_t to = shifted_level(spec.completion, j, c + 1, classes);
            op.block(static_cast<Index>(to) * td, static_cast<Index>(j) * td, td, td) += pi;
        }
    }
    return {std::move(op), std::move(factors)};
}

Operator coupling_unitary(const CompositeSpace &space, const CouplingSpec &spec) {
    return to_composite(local_coupling(space, spec), space);
}

LocalOperator local_reverse_coupling(const CompositeSpace &space, const CouplingSpec &spec) {
    LocalOperator forward = local_coupling(space, spec);
    forward.op = forward.op.adjoint().eval();
    return forward;
}

Operator reverse_coupling_unitary(const CompositeSpace &space, const CouplingSpec &spec) {
    return to_composite(local_reverse_coupling(space, spec), space);
}

LocalOperator local_registration(const CompositeSpace &space, const std::string &memory,
                                 const std::string &probe) {
    const std::size_t mk = space.index_of(memory);
    const std::size_t pk = space.index_of(probe);
    if (mk == pk) {
        throw Error(ErrorCode::invalid_event, "memory and probe are the same factor '" + memory + "'");
    }
    const std::size_t mem_dim = space.dims()[mk];
    const std::size_t probe_dim = space.dims()[pk];
    if (mem_dim < probe_dim) {
        throw Error(ErrorCode::dimension_mismatch, "memory '" + memory + "' (dim " + std::to_string(mem_dim) +
                                                       ") cannot record probe '" + probe + "' (dim " +
                                                       std::to_string(probe_dim) + ")");
    }
    const auto n = static_cast<Index>(mem_dim * probe_dim);
    Operator op = Operator::Zero(n, n);
    for (std::size_t i = 0; i < mem_dim; ++i) {
        for (std::size_t j = 0; j < probe_dim; ++j) {
            const std::size_t to = ((i + j) % mem_dim) * probe_dim + j;
            op(static_cast<Index>(to), static_cast<Index>(i * probe_dim + j)) = 1.0;
        }
    }
    return {std::move(op), {mk, pk}};
}

Operator register_memory_unitary(const CompositeSpace &space, const std::string &memory,
                                 const std::string &probe) {
    return to_composite(local_registration(space, memory, probe), space);
}

void check_event_order(std::span<const Event> events) {
    for (std::size_t k = 1; k < events.size(); ++k) {
        const Event &a = events[k - 1];
        const Event &b = events[k];
        if (a.time == b.time && a.seq == b.seq) {
            throw Error(ErrorCode::time_collision, "events " + std::to_string(k - 1) + " and " +
                                                       std::to_string(k) + " share time " + fmt(a.time) +
                                                       " and sequence index",
                        "events[" + std::to_string(k) + "]");
        }
        if (b.time < a.time || (b.time == a.time && b.seq < a.seq)) {
            throw Error(ErrorCode::unordered_events, "event " + std::to_string(k) + " precedes its predecessor",
                        "events[" + std::to_string(k) + "]");
        }
    }
}

LocalOperator event_operator(const CompositeSpace &space, const Event &event) {
    return std::visit(
        [&](const auto &step) -> LocalOperator {
            using T = std::decay_t<decltype(step)>;
            if constexpr (std::is_same_v<T, UnitaryStep>) {
                auto factors = space.indices_of(step.factors);
                const std::size_t d = space.dim_of(step.factors);
                if (static_cast<std::size_t>(step.matrix.rows()) != d ||
                    step.matrix.rows() != step.matrix.cols()) {
                    throw Error(ErrorCode::dimension_mismatch, "unitary does not match its factors (dim " +
                                                                   std::to_string(d) + ")");
                }
                const double dev = unitarity_deviation(step.matrix);
                if (!(dev < kUnitarityTolerance)) {
                    throw Error(ErrorCode::non_unitary, "unitarity violation, max deviation " + fmt(dev));
                }
                return {step.matrix, std::move(factors)};
            } else if constexpr (std::is_same_v<T, CoupleStep>) {
                return local_coupling(space, step.coupling);
            } else if constexpr (std::is_same_v<T, ReverseStep>) {
                return local_reverse_coupling(space, step.coupling);
            } else if constexpr (std::is_same_v<T, RegisterStep>) {
                return local_registration(space, step.memory, step.probe);
            } else {
                throw Error(ErrorCode::invalid_event, "observe events have no operator");
            }
        },
        event.action);
}

MeasurementChain build_chain(const Protocol &protocol) {
    const CompositeSpace &space = protocol.space;
    check_event_order(protocol.events);
    if (protocol.initial.dim() != space.dim()) {
        throw Error(ErrorCode::dimension_mismatch, "initial state dimension " +
                                                       std::to_string(protocol.initial.dim()) +
                                                       " differs from the composite (" +
                                                       std::to_string(space.dim()) + ")");
    }
    for (const auto &c : protocol.initial.components()) {
        const double dev = std::abs(c.state.norm() - 1.0);
        if (!(dev <= kStateTolerance)) {
            throw Error(ErrorCode::invalid_state, "initial state component not normalized, deviation " + fmt(dev));
        }
    }

    MeasurementChain chain;
    chain.initial = protocol.initial;
    chain.times.push_back(protocol.start_time);
    const auto n = static_cast<Index>(space.dim());
    Operator u = Operator::Identity(n, n);
    for (std::size_t k = 0; k < protocol.events.size(); ++k) {
        const Event &event = protocol.events[k];
        if (const auto *obs = std::get_if<ObserveStep>(&event.action)) {
            if (!(event.time > chain.times.back())) {
                throw Error(ErrorCode::time_collision, "observation '" + obs->name + "' at time " +
                                                           fmt(event.time) + " does not follow the previous one",
                            "events[" + std::to_string(k) + "]");
            }
            const auto factors = space.indices_of(obs->factors);
            chain.observables.push_back(lift_observable(obs->observable, factors, space.dims()));
            chain.unitaries.push_back(u);
            chain.times.push_back(event.time);
            u.setIdentity();
            continue;
        }
        apply(event_operator(space, event), space, u);
    }
    if (chain.observables.empty()) {
        throw Error(ErrorCode::schema_error, "protocol has no observe event");
    }
    return chain;
}

std::vector<std::string> observation_names(const Protocol &protocol) {
    std::vector<std::string> names;
    for (const Event &e : protocol.events) {
        if (const auto *obs = std::get_if<ObserveStep>(&e.action)) {
            names.push_back(obs->name);
        }
    }
    return names;
}

Vector tagged_final_state(const CompositeSpace &space, const Vector &initial, std::span<const Event> events) {
    check_event_order(events);
    if (static_cast<std::size_t>(initial.size()) != space.dim()) {
        throw Error(ErrorCode::dimension_mismatch, "initial state dimension differs from the composite");
    }
    Vector state = initial;
    for (const Event &e : events) {
        if (std::holds_alternative<ObserveStep>(e.action)) {
            continue;
        }
        apply(event_operator(space, e), space, state);
    }
    return state;
}

std::map<std::vector<std::size_t>, Vector> tagged_substates(const CompositeSpace &space, const Vector &state,
                                                             std::span<const std::string> tags) {
    if (static_cast<std::size_t>(state.size()) != space.dim()) {
        throw Error(ErrorCode::dimension_mismatch, "state dimension differs from the composite");
    }
    const auto tag_factors = space.indices_of(tags);
    std::vector<std::size_t> tag_dims;
    for (const std::size_t k : tag_factors) {
        tag_dims.push_back(space.dims()[k]);
    }
    const FactorSplit split(tag_factors, space.dims());
    std::map<std::vector<std::size_t>, Vector> out;
    for (std::size_t l = 0; l < split.local_dim(); ++l) {
        Vector sub(static_cast<Index>(split.rest_dim()));
        for (std::size_t r = 0; r < split.rest_dim(); ++r) {
            sub(static_cast<Index>(r)) = state(split.at(r, l));
        }
        out.emplace(index_digits(l, tag_dims), std::move(sub));
    }
    return out;
}

Distribution perceive_distribution(const CompositeSpace &space, const Vector &state,
                                   const Observable &observable, std::span<const std::string> factors) {
    if (static_cast<std::size_t>(state.size()) != space.dim()) {
        throw Error(ErrorCode::dimension_mismatch, "state dimension differs from the composite");
    }
    const auto chosen = space.indices_of(factors);
    const FactorSplit split(chosen, space.dims());
    if (split.local_dim() != observable.dim()) {
        throw Error(ErrorCode::dimension_mismatch, "observable does not act on the chosen factors");
    }
    const auto dl = static_cast<Index>(split.local_dim());
    std::vector<double> weight(observable.num_classes(), 0.0);
    Vector local(dl);
    for (std::size_t r = 0; r < split.rest_dim(); ++r) {
        for (Index l = 0; l < dl; ++l) {
            local(l) = state(split.at(r, static_cast<std::size_t>(l)));
        }
        if (!observable.is_computational()) {
            local = (observable.basis().adjoint() * local).eval();
        }
        for (Index l = 0; l < dl; ++l) {
            weight[observable.class_of(static_cast<std::size_t>(l))] += std::norm(local(l));
        }
    }
    Distribution dist;
    for (std::size_t m = 0; m < weight.size(); ++m) {
        dist[OutcomeSequence{{m}}] = weight[m];
    }
    return dist;
}

} // namespace qchain
