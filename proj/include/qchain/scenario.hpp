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
 * Scenario documents (JSON, format_version 1): factors, a preparation, a
 * time-ordered event list, a query and engine options. See docs/schema.json
 * for the schema and README.md for a walk-through.
 *
 * Complex numbers are [re, im] pairs (a bare number is read as real);
 * matrices are row-major lists of rows. A matrix may instead be named:
 * "identity", "hadamard", "pauli_x", {"name": "rotation", "theta": t} or
 * {"name": "haar", "seed": n}.
 */

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qchain/apparatus.hpp"
#include "qchain/histories.hpp"

namespace qchain {

inline constexpr int kFormatVersion = 1;

struct MatrixSpec {
    enum class Kind { explicit_entries, identity, hadamard, pauli_x, rotation, haar };
    Kind kind = Kind::identity;
    double theta = 0.0;
    std::uint64_t seed = 0;
    Operator entries;
};

/// The operator for a factor set of dimension `dim`. Throws
/// dimension_mismatch when a fixed-size or explicit matrix does not fit.
Operator resolve(const MatrixSpec &spec, std::size_t dim);

struct ClassSpec {
    std::string label;
    double value = 0.0;
    /// Basis indices in this class.
    std::vector<std::size_t> members;
};

struct ObservableSpec {
    MatrixSpec basis;
    std::vector<ClassSpec> classes;
};

/// Throws invalid_observable for an incomplete or overlapping partition.
Observable resolve(const ObservableSpec &spec, std::size_t dim);

struct StateSpec {
    /// Per-factor vectors; unlisted factors start in basis state 0.
    std::vector<std::pair<std::string, std::vector<Complex>>> product;
    /// Full composite vector; used instead of `product` when non-empty.
    std::vector<Complex> vector;
};

struct InitialSpec {
    bool mixture = false;
    /// A single unit-weight entry unless `mixture`.
    std::vector<std::pair<double, StateSpec>> components{{1.0, StateSpec{}}};
};

enum class EventKind { unitary, couple, reverse, register_memory, observe };

struct EventSpec {
    double time = 0.0;
    std::optional<int> seq;
    EventKind kind = EventKind::unitary;
    /// unitary, observe
    std::vector<std::string> factors;
    /// unitary
    MatrixSpec matrix;
    /// couple, reverse, register
    std::string probe;
    /// couple
    std::vector<std::string> targets;
    ObservableSpec partition;
    Completion completion = Completion::modular_shift;
    /// register
    std::string memory;
    /// observe
    std::string name;
    ObservableSpec observable;
};

enum class QueryKind { joint_distribution, return_probability, histories_check };
enum class EngineSelection { feynman, evolution, both };

std::string_view to_string(QueryKind kind) noexcept;
std::string_view to_string(EngineSelection engine) noexcept;
/// Throws schema_error.
EngineSelection parse_engine(std::string_view text);

struct QuerySpec {
    QueryKind kind = QueryKind::joint_distribution;
    /// return_probability: observation name and class label.
    std::string observation;
    std::string label;
};

struct OptionsSpec {
    double tolerance = 1e-10;
    EngineSelection engine = EngineSelection::both;
};

struct ExpectedEntry {
    std::vector<std::string> outcome;
    double probability = 0.0;
};

struct ExpectSpec {
    std::vector<ExpectedEntry> entries;
    double tolerance = 1e-10;
};

struct ScenarioDocument {
    int format_version = kFormatVersion;
    std::string name;
    std::string description;
    std::vector<Factor> factors;
    InitialSpec initial;
    std::vector<EventSpec> events;
    QuerySpec query;
    OptionsSpec options;
    /// Projector sets overriding observe events by name (histories checks).
    std::optional<std::vector<std::pair<std::string, ObservableSpec>>> projector_families;
    std::optional<ExpectSpec> expect;
};

/**
 * Parses and fully validates a document. Errors carry a code, a message and
 * a JSON path; syntax errors report line and column.
 */
ScenarioDocument parse_scenario(std::string_view text);

/// Canonical JSON text (2-space indent, trailing newline).
std::string serialize_scenario(const ScenarioDocument &doc);

/// Reads and parses a file; io_error when it cannot be read.
ScenarioDocument load_scenario(const std::string &path);

/// The protocol a document describes. Throws on semantic errors.
Protocol to_protocol(const ScenarioDocument &doc);

/// The history family of a document with its projector_families applied.
/// Throws missing_projector_families when the section is absent.
HistoryFamily to_family(const ScenarioDocument &doc);

/// A document describing `protocol`. Product preparations are written per
/// factor, omitting factors left in basis state 0.
ScenarioDocument to_document(const Protocol &protocol, std::string name, QuerySpec query = {});

/// Spec form of a protocol event, recognizing named matrices.
EventSpec to_event_spec(const Event &event, const CompositeSpace &space);
ObservableSpec to_observable_spec(const Observable &obs);
MatrixSpec to_matrix_spec(const Operator &op);

} // namespace qchain
