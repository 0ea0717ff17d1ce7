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
 * Composite spaces of system, probes and memories, and the unitaries that
 * couple them: pointer coupling, memory registration and coupling reversal.
 *
 * A probe used for an M-class partition needs M+1 orthogonal pointer states:
 * |d_0> (ready) and |d_m> for class m = 1..M. The coupling maps
 * |d_0>|s> to sum_m |d_m> pi_m |s> and is completed to a unitary on the rest
 * of the probe space. Every protocol starts its probes in |d_0>, so the
 * choice of completion does not change any probability.
 */

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "qchain/chain.hpp"
#include "qchain/distribution.hpp"
#include "qchain/observable.hpp"

namespace qchain {

enum class Role { system, probe, memory };

std::string_view to_string(Role role) noexcept;

struct Factor {
    std::string label;
    std::size_t dim = 2;
    Role role = Role::system;
};

/// Ordered tensor factors (left-most is the slowest index).
class CompositeSpace {
  public:
    /// Throws duplicate_label, dimension_mismatch (dim < 2) or capacity_exceeded.
    explicit CompositeSpace(std::vector<Factor> factors);

    const std::vector<Factor> &factors() const noexcept { return factors_; }
    const std::vector<std::size_t> &dims() const noexcept { return dims_; }
    std::size_t size() const noexcept { return factors_.size(); }
    std::size_t dim() const noexcept { return dim_; }

    /// Throws unknown_label.
    std::size_t index_of(const std::string &label) const;
    std::vector<std::size_t> indices_of(std::span<const std::string> labels) const;
    /// Product of the dims of the listed factors.
    std::size_t dim_of(std::span<const std::string> labels) const;

    /// Product state with the given per-factor vectors; unlisted factors
    /// start in their basis state 0.
    Vector product_state(const std::map<std::string, Vector> &states) const;

  private:
    std::vector<Factor> factors_;
    std::vector<std::size_t> dims_;
    std::size_t dim_ = 1;
};

/// An operator on an ordered subset of factors of a composite space.
struct LocalOperator {
    Operator op;
    std::vector<std::size_t> factors;
};

/// Dense composite form of a local operator.
Operator to_composite(const LocalOperator &local, const CompositeSpace &space);
/// In place `target <- local * target` (target is a vector or a matrix).
void apply(const LocalOperator &local, const CompositeSpace &space, Operator &target);
void apply(const LocalOperator &local, const CompositeSpace &space, Vector &target);

/// How a coupling acts outside the ready-pointer sector.
enum class Completion {
    /// |d_j> pi_m -> |d_{(j+m) mod (M+1)}> pi_m; levels above M untouched.
    modular_shift,
    /// |d_0> <-> |d_m> exchanged within pi_m; other levels untouched.
    transposition,
};

struct CouplingSpec {
    std::string probe;
    std::vector<std::string> targets;
    /// Partition of the target space (ordered as `targets`) into classes.
    Observable partition = Observable::trivial(2);
    double time = 0.0;
    Completion completion = Completion::modular_shift;
};

/// Local form on (probe, targets...). Throws invalid_event when the probe has
/// fewer than M+1 levels or appears among the targets.
LocalOperator local_coupling(const CompositeSpace &space, const CouplingSpec &spec);
Operator coupling_unitary(const CompositeSpace &space, const CouplingSpec &spec);

/// Exact inverse of the coupling: |d_m> pi_m |s> -> |d_0> pi_m |s>.
LocalOperator local_reverse_coupling(const CompositeSpace &space, const CouplingSpec &spec);
Operator reverse_coupling_unitary(const CompositeSpace &space, const CouplingSpec &spec);

/// Local form on (memory, probe): |mu_i>|d_j> -> |mu_{(i+j) mod K}>|d_j>, K the
/// memory dimension. Throws dimension_mismatch when K is below the probe dim.
LocalOperator local_registration(const CompositeSpace &space, const std::string &memory,
                                 const std::string &probe);
Operator register_memory_unitary(const CompositeSpace &space, const std::string &memory,
                                 const std::string &probe);

// ---------------------------------------------------------------------------
// Protocols: time-ordered events on a composite space.

struct UnitaryStep {
    std::vector<std::string> factors;
    Operator matrix;
};
struct CoupleStep {
    CouplingSpec coupling;
};
struct ReverseStep {
    CouplingSpec coupling;
};
struct RegisterStep {
    std::string memory;
    std::string probe;
};
/// A perceived outcome: a projective readout of `observable` on `factors`.
struct ObserveStep {
    std::string name;
    std::vector<std::string> factors;
    Observable observable = Observable::trivial(2);
};

struct Event {
    double time = 0.0;
    int seq = 0;
    std::variant<UnitaryStep, CoupleStep, ReverseStep, RegisterStep, ObserveStep> action;
};

/// Throws unordered_events when (time, seq) decreases and time_collision when
/// two events share both.
void check_event_order(std::span<const Event> events);

/// Local operator realizing a non-observe event.
LocalOperator event_operator(const CompositeSpace &space, const Event &event);

/// A preparation followed by events. Observe events become the measurement
/// times of the derived chain; events after the last one do not affect it.
struct Protocol {
    CompositeSpace space{{Factor{"s", 2, Role::system}}};
    InitialState initial = InitialState::pure(basis_vector(2, 0));
    std::vector<Event> events;
    double start_time = 0.0;
};

/// Composite measurement chain of a protocol. Throws time_collision when two
/// observe events share a time, schema_error when nothing is observed.
MeasurementChain build_chain(const Protocol &protocol);

/// Names of the observe events in order.
std::vector<std::string> observation_names(const Protocol &protocol);

/// Composite state after applying all non-observe events to `initial`.
Vector tagged_final_state(const CompositeSpace &space, const Vector &initial, std::span<const Event> events);

/**
 * Splits a composite state by the basis digits of the `tag` factors: the
 * entry for digit tuple t is the (unnormalized) substate on the remaining
 * factors, in composite order.
 */
std::map<std::vector<std::size_t>, Vector> tagged_substates(const CompositeSpace &space, const Vector &state,
                                                             std::span<const std::string> tags);

/**
 * Probability of each class of `observable` (ordered as `factors`) with
 * every other factor traced out: sum over the other factors' basis tags of
 * |Pi_m (tagged substate)|^2. Keys are one-element sequences.
 */
Distribution perceive_distribution(const CompositeSpace &space, const Vector &state,
                                   const Observable &observable, std::span<const std::string> factors);

} // namespace qchain
