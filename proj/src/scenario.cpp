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

#include "qchain/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

namespace qchain {

namespace {

using Json = nlohmann::ordered_json;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

[[noreturn]] void fail(ErrorCode code, const std::string &path, const std::string &message) {
    throw Error(code, message, path);
}

[[noreturn]] void schema(const std::string &path, const std::string &message) {
    fail(ErrorCode::schema_error, path, message);
}

std::string at_key(const std::string &path, const char *key) { return path.empty() ? key : path + "." + key; }
std::string at_index(const std::string &path, std::size_t k) { return path + "[" + std::to_string(k) + "]"; }

// Re-raises a library error with the document location attached.
template <typename F> auto located(const std::string &path, F &&f) -> decltype(f()) {
    try {
        return f();
    } catch (const Error &e) {
        if (!e.path().empty()) {
            throw;
        }
        throw Error(e.code(), e.message(), path);
    }
}

void check_keys(const Json &obj, std::initializer_list<const char *> allowed, const std::string &path) {
    for (const auto &item : obj.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char *k) { return item.key() == k; });
        if (!known) {
            schema(at_key(path, item.key().c_str()), "unknown key '" + item.key() + "'");
        }
    }
}

const Json &require_object(const Json &j, const std::string &path) {
    if (!j.is_object()) {
        schema(path, "expected an object");
    }
    return j;
}

const Json &require_array(const Json &j, const std::string &path) {
    if (!j.is_array()) {
        schema(path, "expected an array");
    }
    return j;
}

const Json &field(const Json &obj, const char *key, const std::string &path) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
        schema(at_key(path, key), std::string("missing required key '") + key + "'");
    }
    return *it;
}

const Json *optional_field(const Json &obj, const char *key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

std::string get_string(const Json &j, const std::string &path) {
    if (!j.is_string()) {
        schema(path, "expected a string");
    }
    return j.get<std::string>();
}

double get_number(const Json &j, const std::string &path) {
    if (!j.is_number()) {
        schema(path, "expected a number");
    }
    const double x = j.get<double>();
    if (!std::isfinite(x)) {
        schema(path, "expected a finite number");
    }
    return x;
}

std::int64_t get_integer(const Json &j, const std::string &path) {
    if (!j.is_number_integer()) {
        schema(path, "expected an integer");
    }
    return j.get<std::int64_t>();
}

std::size_t get_count(const Json &j, const std::string &path) {
    const std::int64_t v = get_integer(j, path);
    if (v < 0) {
        schema(path, "expected a non-negative integer");
    }
    return static_cast<std::size_t>(v);
}

std::vector<std::string> get_labels(const Json &j, const std::string &path) {
    require_array(j, path);
    std::vector<std::string> out;
    for (std::size_t k = 0; k < j.size(); ++k) {
        out.push_back(get_string(j[k], at_index(path, k)));
    }
    return out;
}

Complex get_complex(const Json &j, const std::string &path) {
    if (j.is_number()) {
        return {get_number(j, path), 0.0};
    }
    if (!j.is_array() || j.size() != 2) {
        schema(path, "expected a complex number [re, im]");
    }
    return {get_number(j[0], at_index(path, 0)), get_number(j[1], at_index(path, 1))};
}

std::vector<Complex> get_complex_list(const Json &j, const std::string &path) {
    require_array(j, path);
    std::vector<Complex> out;
    for (std::size_t k = 0; k < j.size(); ++k) {
        out.push_back(get_complex(j[k], at_index(path, k)));
    }
    return out;
}

Operator get_matrix(const Json &j, const std::string &path) {
    require_array(j, path);
    const std::size_t n = j.size();
    if (n == 0) {
        schema(path, "matrix has no rows");
    }
    Operator m(static_cast<Index>(n), static_cast<Index>(n));
    for (std::size_t r = 0; r < n; ++r) {
        const std::string row_path = at_index(path, r);
        const auto row = get_complex_list(j[r], row_path);
        if (row.size() != n) {
            fail(ErrorCode::dimension_mismatch, row_path, "matrix must be square (" + std::to_string(n) + " entries per row)");
        }
        for (std::size_t c = 0; c < n; ++c) {
            m(static_cast<Index>(r), static_cast<Index>(c)) = row[c];
        }
    }
    return m;
}

MatrixSpec parse_matrix_spec(const Json &j, const std::string &path) {
    MatrixSpec spec;
    if (j.is_string()) {
        const std::string name = j.get<std::string>();
        if (name == "identity") {
            spec.kind = MatrixSpec::Kind::identity;
        } else if (name == "hadamard") {
            spec.kind = MatrixSpec::Kind::hadamard;
        } else if (name == "pauli_x") {
            spec.kind = MatrixSpec::Kind::pauli_x;
        } else {
            schema(path, "unknown named matrix '" + name + "'");
        }
        return spec;
    }
    if (j.is_object()) {
        const std::string name = get_string(field(j, "name", path), at_key(path, "name"));
        if (name == "rotation") {
            check_keys(j, {"name", "theta"}, path);
            spec.kind = MatrixSpec::Kind::rotation;
            spec.theta = get_number(field(j, "theta", path), at_key(path, "theta"));
        } else if (name == "haar") {
            check_keys(j, {"name", "seed"}, path);
            spec.kind = MatrixSpec::Kind::haar;
            spec.seed = static_cast<std::uint64_t>(get_count(field(j, "seed", path), at_key(path, "seed")));
        } else if (name == "identity" || name == "hadamard" || name == "pauli_x") {
            check_keys(j, {"name"}, path);
            return parse_matrix_spec(Json(name), path);
        } else {
            schema(at_key(path, "name"), "unknown named matrix '" + name + "'");
        }
        return spec;
    }
    spec.kind = MatrixSpec::Kind::explicit_entries;
    spec.entries = get_matrix(j, path);
    return spec;
}

ObservableSpec parse_observable_spec(const Json &j, const std::string &path) {
    require_object(j, path);
    check_keys(j, {"basis", "classes"}, path);
    ObservableSpec spec;
    if (const Json *b = optional_field(j, "basis")) {
        spec.basis = parse_matrix_spec(*b, at_key(path, "basis"));
    }
    const std::string cpath = at_key(path, "classes");
    const Json &classes = require_array(field(j, "classes", path), cpath);
    if (classes.empty()) {
        fail(ErrorCode::invalid_observable, cpath, "observable needs at least one class");
    }
    for (std::size_t k = 0; k < classes.size(); ++k) {
        const std::string p = at_index(cpath, k);
        const Json &c = require_object(classes[k], p);
        check_keys(c, {"label", "value", "members"}, p);
        ClassSpec cs;
        cs.label = get_string(field(c, "label", p), at_key(p, "label"));
        cs.value = static_cast<double>(k);
        if (const Json *v = optional_field(c, "value")) {
            cs.value = get_number(*v, at_key(p, "value"));
        }
        const std::string mpath = at_key(p, "members");
        const Json &members = require_array(field(c, "members", p), mpath);
        for (std::size_t i = 0; i < members.size(); ++i) {
            cs.members.push_back(get_count(members[i], at_index(mpath, i)));
        }
        spec.classes.push_back(std::move(cs));
    }
    return spec;
}

StateSpec parse_state_spec(const Json &j, const std::string &path) {
    StateSpec s;
    const Json *product = optional_field(j, "product");
    const Json *vector = optional_field(j, "state");
    if ((product != nullptr) == (vector != nullptr)) {
        schema(path, "give exactly one of 'product' or 'state'");
    }
    if (product) {
        const std::string p = at_key(path, "product");
        require_object(*product, p);
        for (const auto &item : product->items()) {
            s.product.emplace_back(item.key(), get_complex_list(item.value(), at_key(p, item.key().c_str())));
        }
    } else {
        s.vector = get_complex_list(*vector, at_key(path, "state"));
        if (s.vector.empty()) {
            schema(at_key(path, "state"), "state vector is empty");
        }
    }
    return s;
}

InitialSpec parse_initial(const Json &j, const std::string &path) {
    require_object(j, path);
    InitialSpec init;
    if (const Json *mix = optional_field(j, "mixture")) {
        check_keys(j, {"mixture"}, path);
        const std::string p = at_key(path, "mixture");
        require_array(*mix, p);
        if (mix->empty()) {
            fail(ErrorCode::invalid_state, p, "mixture has no components");
        }
        init.mixture = true;
        init.components.clear();
        for (std::size_t k = 0; k < mix->size(); ++k) {
            const std::string cp = at_index(p, k);
            const Json &c = require_object((*mix)[k], cp);
            check_keys(c, {"weight", "product", "state"}, cp);
            const double w = get_number(field(c, "weight", cp), at_key(cp, "weight"));
            init.components.emplace_back(w, parse_state_spec(c, cp));
        }
        return init;
    }
    check_keys(j, {"product", "state"}, path);
    init.components = {{1.0, parse_state_spec(j, path)}};
    return init;
}

EventSpec parse_event(const Json &j, const std::string &path) {
    require_object(j, path);
    EventSpec e;
    e.time = get_number(field(j, "time", path), at_key(path, "time"));
    if (const Json *s = optional_field(j, "seq")) {
        const std::int64_t v = get_integer(*s, at_key(path, "seq"));
        if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
            schema(at_key(path, "seq"), "seq out of range");
        }
        e.seq = static_cast<int>(v);
    }
    const std::string kind = get_string(field(j, "kind", path), at_key(path, "kind"));
    if (kind == "unitary") {
        check_keys(j, {"time", "seq", "kind", "factors", "matrix"}, path);
        e.kind = EventKind::unitary;
        e.factors = get_labels(field(j, "factors", path), at_key(path, "factors"));
        e.matrix = parse_matrix_spec(field(j, "matrix", path), at_key(path, "matrix"));
    } else if (kind == "couple") {
        check_keys(j, {"time", "seq", "kind", "probe", "targets", "partition", "completion"}, path);
        e.kind = EventKind::couple;
        e.probe = get_string(field(j, "probe", path), at_key(path, "probe"));
        e.targets = get_labels(field(j, "targets", path), at_key(path, "targets"));
        e.partition = parse_observable_spec(field(j, "partition", path), at_key(path, "partition"));
        if (const Json *c = optional_field(j, "completion")) {
            const std::string name = get_string(*c, at_key(path, "completion"));
            if (name == "modular_shift") {
                e.completion = Completion::modular_shift;
            } else if (name == "transposition") {
                e.completion = Completion::transposition;
            } else {
                schema(at_key(path, "completion"), "unknown completion '" + name + "'");
            }
        }
    } else if (kind == "reverse") {
        check_keys(j, {"time", "seq", "kind", "probe"}, path);
        e.kind = EventKind::reverse;
        e.probe = get_string(field(j, "probe", path), at_key(path, "probe"));
    } else if (kind == "register") {
        check_keys(j, {"time", "seq", "kind", "memory", "probe"}, path);
        e.kind = EventKind::register_memory;
        e.memory = get_string(field(j, "memory", path), at_key(path, "memory"));
        e.probe = get_string(field(j, "probe", path), at_key(path, "probe"));
    } else if (kind == "observe") {
        check_keys(j, {"time", "seq", "kind", "name", "factors", "observable"}, path);
        e.kind = EventKind::observe;
        e.name = get_string(field(j, "name", path), at_key(path, "name"));
        e.factors = get_labels(field(j, "factors", path), at_key(path, "factors"));
        e.observable = parse_observable_spec(field(j, "observable", path), at_key(path, "observable"));
    } else {
        schema(at_key(path, "kind"), "unknown event kind '" + kind + "'");
    }
    return e;
}

Role parse_role(const Json &j, const std::string &path) {
    const std::string r = get_string(j, path);
    if (r == "system") {
        return Role::system;
    }
    if (r == "probe") {
        return Role::probe;
    }
    if (r == "memory") {
        return Role::memory;
    }
    schema(path, "unknown role '" + r + "'");
}

QuerySpec parse_query(const Json &j, const std::string &path) {
    require_object(j, path);
    QuerySpec q;
    const std::string kind = get_string(field(j, "kind", path), at_key(path, "kind"));
    if (kind == "joint_distribution") {
        check_keys(j, {"kind"}, path);
        q.kind = QueryKind::joint_distribution;
    } else if (kind == "histories_check") {
        check_keys(j, {"kind"}, path);
        q.kind = QueryKind::histories_check;
    } else if (kind == "return_probability") {
        check_keys(j, {"kind", "observation", "label"}, path);
        q.kind = QueryKind::return_probability;
        q.observation = get_string(field(j, "observation", path), at_key(path, "observation"));
        q.label = get_string(field(j, "label", path), at_key(path, "label"));
    } else {
        schema(at_key(path, "kind"), "unknown query kind '" + kind + "'");
    }
    return q;
}

OptionsSpec parse_options(const Json &j, const std::string &path) {
    require_object(j, path);
    check_keys(j, {"tolerance", "engine"}, path);
    OptionsSpec o;
    if (const Json *t = optional_field(j, "tolerance")) {
        o.tolerance = get_number(*t, at_key(path, "tolerance"));
        if (!(o.tolerance > 0.0)) {
            schema(at_key(path, "tolerance"), "tolerance must be positive");
        }
    }
    if (const Json *e = optional_field(j, "engine")) {
        const std::string p = at_key(path, "engine");
        o.engine = located(p, [&] { return parse_engine(get_string(*e, p)); });
    }
    return o;
}

ExpectSpec parse_expect(const Json &j, const std::string &path) {
    require_object(j, path);
    check_keys(j, {"entries", "tolerance"}, path);
    ExpectSpec x;
    if (const Json *t = optional_field(j, "tolerance")) {
        x.tolerance = get_number(*t, at_key(path, "tolerance"));
    }
    const std::string p = at_key(path, "entries");
    const Json &entries = require_array(field(j, "entries", path), p);
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const std::string ep = at_index(p, k);
        require_object(entries[k], ep);
        check_keys(entries[k], {"outcome", "probability"}, ep);
        x.entries.push_back({get_labels(field(entries[k], "outcome", ep), at_key(ep, "outcome")),
                             get_number(field(entries[k], "probability", ep), at_key(ep, "probability"))});
    }
    return x;
}

// ---------------------------------------------------------------------------
// serialization

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json complex_list_json(const std::vector<Complex> &v) {
    Json out = Json::array();
    for (const Complex &z : v) {
        out.push_back(complex_json(z));
    }
    return out;
}

Json matrix_json(const MatrixSpec &spec) {
    switch (spec.kind) {
    case MatrixSpec::Kind::identity:
        return "identity";
    case MatrixSpec::Kind::hadamard:
        return "hadamard";
    case MatrixSpec::Kind::pauli_x:
        return "pauli_x";
    case MatrixSpec::Kind::rotation:
        return Json{{"name", "rotation"}, {"theta", spec.theta}};
    case MatrixSpec::Kind::haar:
        return Json{{"name", "haar"}, {"seed", spec.seed}};
    case MatrixSpec::Kind::explicit_entries:
        break;
    }
    Json rows = Json::array();
    for (Index r = 0; r < spec.entries.rows(); ++r) {
        Json row = Json::array();
        for (Index c = 0; c < spec.entries.cols(); ++c) {
            row.push_back(complex_json(spec.entries(r, c)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

Json observable_json(const ObservableSpec &spec) {
    Json classes = Json::array();
    for (const ClassSpec &c : spec.classes) {
        classes.push_back(Json{{"label", c.label}, {"value", c.value}, {"members", c.members}});
    }
    return Json{{"basis", matrix_json(spec.basis)}, {"classes", std::move(classes)}};
}

void state_json(Json &into, const StateSpec &s) {
    if (!s.vector.empty()) {
        into["state"] = complex_list_json(s.vector);
        return;
    }
    Json product = Json::object();
    for (const auto &[label, v] : s.product) {
        product[label] = complex_list_json(v);
    }
    into["product"] = std::move(product);
}

std::string_view to_string(EventKind kind) {
    switch (kind) {
    case EventKind::unitary:
        return "unitary";
    case EventKind::couple:
        return "couple";
    case EventKind::reverse:
        return "reverse";
    case EventKind::register_memory:
        return "register";
    case EventKind::observe:
        return "observe";
    }
    return "unitary";
}

Json event_json(const EventSpec &e) {
    Json j;
    j["time"] = e.time;
    if (e.seq) {
        j["seq"] = *e.seq;
    }
    j["kind"] = std::string(to_string(e.kind));
    switch (e.kind) {
    case EventKind::unitary:
        j["factors"] = e.factors;
        j["matrix"] = matrix_json(e.matrix);
        break;
    case EventKind::couple:
        j["probe"] = e.probe;
        j["targets"] = e.targets;
        j["partition"] = observable_json(e.partition);
        if (e.completion == Completion::transposition) {
            j["completion"] = "transposition";
        }
        break;
    case EventKind::reverse:
        j["probe"] = e.probe;
        break;
    case EventKind::register_memory:
        j["memory"] = e.memory;
        j["probe"] = e.probe;
        break;
    case EventKind::observe:
        j["name"] = e.name;
        j["factors"] = e.factors;
        j["observable"] = observable_json(e.observable);
        break;
    }
    return j;
}

// ---------------------------------------------------------------------------
// semantic validation

Vector state_vector(const CompositeSpace &space, const StateSpec &s, const std::string &path) {
    if (!s.vector.empty()) {
        if (s.vector.size() != space.dim()) {
            fail(ErrorCode::dimension_mismatch, at_key(path, "state"),
                 "state has " + std::to_string(s.vector.size()) + " entries, composite dimension is " +
                     std::to_string(space.dim()));
        }
        return Eigen::Map<const Vector>(s.vector.data(), static_cast<Index>(s.vector.size()));
    }
    std::map<std::string, Vector> parts;
    for (const auto &[label, v] : s.product) {
        const std::string p = at_key(at_key(path, "product"), label.c_str());
        if (parts.count(label)) {
            fail(ErrorCode::duplicate_label, p, "factor '" + label + "' listed twice");
        }
        const std::size_t k = located(p, [&] { return space.index_of(label); });
        if (v.size() != space.dims()[k]) {
            fail(ErrorCode::dimension_mismatch, p, "state for factor '" + label + "' needs " +
                                                       std::to_string(space.dims()[k]) + " entries");
        }
        parts[label] = Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
    }
    return space.product_state(parts);
}

InitialState build_initial(const CompositeSpace &space, const InitialSpec &init) {
    const std::string base = "initial";
    std::vector<InitialState::Component> components;
    double total = 0.0;
    for (std::size_t k = 0; k < init.components.size(); ++k) {
        const auto &[w, s] = init.components[k];
        const std::string p = init.mixture ? at_index(at_key(base, "mixture"), k) : base;
        if (!(w > 0.0 && w <= 1.0)) {
            fail(ErrorCode::invalid_state, at_key(p, "weight"), "mixture weight " + fmt(w) + " outside (0, 1]");
        }
        Vector v = state_vector(space, s, p);
        const double dev = std::abs(v.norm() - 1.0);
        if (!(dev <= kStateTolerance)) {
            fail(ErrorCode::invalid_state, p, "state not normalized, deviation " + fmt(dev));
        }
        total += w;
        components.push_back({w, std::move(v)});
    }
    if (!(std::abs(total - 1.0) <= kStateTolerance)) {
        fail(ErrorCode::invalid_state, base, "mixture weights sum to " + fmt(total));
    }
    if (!init.mixture) {
        return InitialState::pure(std::move(components.front().state));
    }
    return InitialState::mixed(std::move(components));
}

std::size_t factor_dim(const CompositeSpace &space, const std::vector<std::string> &labels, const std::string &path) {
    if (labels.empty()) {
        schema(path, "factor list is empty");
    }
    return located(path, [&] { return space.dim_of(labels); });
}

std::vector<Complex> to_list(const Vector &v) { return {v.data(), v.data() + v.size()}; }

// Per-factor form of a product state; empty when the state is entangled.
std::optional<StateSpec> factorize(const CompositeSpace &space, const Vector &psi) {
    Index peak = 0;
    psi.cwiseAbs().maxCoeff(&peak);
    const auto digits = index_digits(static_cast<std::size_t>(peak), space.dims());
    std::vector<Vector> parts;
    for (std::size_t k = 0; k < space.size(); ++k) {
        Vector slice(static_cast<Index>(space.dims()[k]));
        auto d = digits;
        for (std::size_t j = 0; j < space.dims()[k]; ++j) {
            d[k] = j;
            slice(static_cast<Index>(j)) = psi(static_cast<Index>(compose_index(d, space.dims())));
        }
        parts.push_back(slice.normalized());
    }
    Vector product = parts.front();
    for (std::size_t k = 1; k < parts.size(); ++k) {
        product = tensor_product(product, parts[k]);
    }
    const Complex overlap = product.dot(psi);
    parts.front() *= overlap / std::abs(overlap);
    if ((overlap / std::abs(overlap) * product - psi).norm() > 1e-13) {
        return std::nullopt;
    }
    StateSpec spec;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        const Vector ground = basis_vector(space.dims()[k], 0);
        if ((parts[k] - ground).norm() > 1e-15) {
            spec.product.emplace_back(space.factors()[k].label, to_list(parts[k]));
        }
    }
    return spec;
}

StateSpec state_spec(const CompositeSpace &space, const Vector &psi) {
    if (auto spec = factorize(space, psi)) {
        return *spec;
    }
    StateSpec spec;
    spec.vector = to_list(psi);
    return spec;
}

} // namespace

ScenarioDocument to_document(const Protocol &protocol, std::string name, QuerySpec query) {
    ScenarioDocument doc;
    doc.name = std::move(name);
    doc.factors = protocol.space.factors();
    const auto &components = protocol.initial.components();
    doc.initial.mixture = !protocol.initial.is_pure();
    doc.initial.components.clear();
    for (const auto &c : components) {
        doc.initial.components.emplace_back(c.weight, state_spec(protocol.space, c.state));
    }
    for (const Event &e : protocol.events) {
        doc.events.push_back(to_event_spec(e, protocol.space));
    }
    doc.query = std::move(query);
    return doc;
}

std::string_view to_string(QueryKind kind) noexcept {
    switch (kind) {
    case QueryKind::joint_distribution:
        return "joint_distribution";
    case QueryKind::return_probability:
        return "return_probability";
    case QueryKind::histories_check:
        return "histories_check";
    }
    return "joint_distribution";
}

std::string_view to_string(EngineSelection engine) noexcept {
    switch (engine) {
    case EngineSelection::feynman:
        return "feynman";
    case EngineSelection::evolution:
        return "evolution";
    case EngineSelection::both:
        return "both";
    }
    return "both";
}

EngineSelection parse_engine(std::string_view text) {
    if (text == "feynman") {
        return EngineSelection::feynman;
    }
    if (text == "evolution") {
        return EngineSelection::evolution;
    }
    if (text == "both") {
        return EngineSelection::both;
    }
    throw Error(ErrorCode::schema_error, "unknown engine '" + std::string(text) + "'");
}

Operator resolve(const MatrixSpec &spec, std::size_t dim) {
    auto need = [&](std::size_t n, const char *name) {
        if (dim != n) {
            throw Error(ErrorCode::dimension_mismatch, std::string(name) + " is " + std::to_string(n) + "x" +
                                                           std::to_string(n) + ", factors need " +
                                                           std::to_string(dim));
        }
    };
    switch (spec.kind) {
    case MatrixSpec::Kind::identity:
        return identity(dim);
    case MatrixSpec::Kind::hadamard:
        need(2, "hadamard");
        return hadamard();
    case MatrixSpec::Kind::pauli_x:
        need(2, "pauli_x");
        return pauli_x();
    case MatrixSpec::Kind::rotation:
        need(2, "rotation");
        return rotation(spec.theta);
    case MatrixSpec::Kind::haar:
        return haar_random_unitary(dim, spec.seed);
    case MatrixSpec::Kind::explicit_entries:
        break;
    }
    need(static_cast<std::size_t>(spec.entries.rows()), "matrix");
    return spec.entries;
}

Observable resolve(const ObservableSpec &spec, std::size_t dim) {
    constexpr std::size_t unset = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> assignment(dim, unset);
    std::vector<EigenClass> classes;
    for (std::size_t c = 0; c < spec.classes.size(); ++c) {
        const ClassSpec &cs = spec.classes[c];
        if (cs.members.empty()) {
            throw Error(ErrorCode::invalid_observable, "class '" + cs.label + "' has no members");
        }
        for (const std::size_t n : cs.members) {
            if (n >= dim) {
                throw Error(ErrorCode::invalid_observable, "class '" + cs.label + "' lists basis index " +
                                                               std::to_string(n) + " of a " + std::to_string(dim) +
                                                               "-dim space");
            }
            if (assignment[n] != unset) {
                throw Error(ErrorCode::invalid_observable,
                            "basis index " + std::to_string(n) + " appears in two classes");
            }
            assignment[n] = c;
        }
        classes.push_back({cs.label, cs.value});
    }
    for (std::size_t n = 0; n < dim; ++n) {
        if (assignment[n] == unset) {
            throw Error(ErrorCode::invalid_observable,
                        "incomplete partition: basis index " + std::to_string(n) + " is in no class");
        }
    }
    return Observable(resolve(spec.basis, dim), std::move(assignment), std::move(classes));
}

ScenarioDocument parse_scenario(std::string_view text) {
    Json j;
    try {
        j = Json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error &e) {
        std::size_t line = 1;
        std::size_t column = 1;
        const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t k = 0; k < end; ++k) {
            if (text[k] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw Error(ErrorCode::syntax_error, "invalid JSON at line " + std::to_string(line) + ", column " +
                                                 std::to_string(column) + " (byte " + std::to_string(e.byte) + ")");
    }
    require_object(j, "");

    ScenarioDocument doc;
    doc.format_version = static_cast<int>(get_integer(field(j, "format_version", ""), "format_version"));
    if (doc.format_version != kFormatVersion) {
        fail(ErrorCode::unsupported_version, "format_version",
             "unsupported format_version " + std::to_string(doc.format_version));
    }
    check_keys(j,
               {"format_version", "name", "description", "factors", "initial", "events", "query", "options",
                "projector_families", "expect"},
               "");
    doc.name = get_string(field(j, "name", ""), "name");
    if (const Json *d = optional_field(j, "description")) {
        doc.description = get_string(*d, "description");
    }

    const Json &factors = require_array(field(j, "factors", ""), "factors");
    for (std::size_t k = 0; k < factors.size(); ++k) {
        const std::string p = at_index("factors", k);
        const Json &f = require_object(factors[k], p);
        check_keys(f, {"label", "dim", "role"}, p);
        Factor factor;
        factor.label = get_string(field(f, "label", p), at_key(p, "label"));
        factor.dim = get_count(field(f, "dim", p), at_key(p, "dim"));
        factor.role = Role::system;
        if (const Json *r = optional_field(f, "role")) {
            factor.role = parse_role(*r, at_key(p, "role"));
        }
        doc.factors.push_back(std::move(factor));
    }
    doc.initial = parse_initial(field(j, "initial", ""), "initial");
    const Json &events = require_array(field(j, "events", ""), "events");
    for (std::size_t k = 0; k < events.size(); ++k) {
        doc.events.push_back(parse_event(events[k], at_index("events", k)));
    }
    if (const Json *q = optional_field(j, "query")) {
        doc.query = parse_query(*q, "query");
    }
    if (const Json *o = optional_field(j, "options")) {
        doc.options = parse_options(*o, "options");
    }
    if (const Json *pf = optional_field(j, "projector_families")) {
        require_object(*pf, "projector_families");
        std::vector<std::pair<std::string, ObservableSpec>> families;
        for (const auto &item : pf->items()) {
            families.emplace_back(item.key(), parse_observable_spec(item.value(), at_key("projector_families",
                                                                                         item.key().c_str())));
        }
        doc.projector_families = std::move(families);
    }
    if (const Json *x = optional_field(j, "expect")) {
        doc.expect = parse_expect(*x, "expect");
    }

    // semantic checks
    const Protocol protocol = to_protocol(doc);
    const auto names = observation_names(protocol);
    auto observation_index = [&](const std::string &name, const std::string &path) {
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) {
            fail(ErrorCode::unknown_label, path, "no observation named '" + name + "'");
        }
        return static_cast<std::size_t>(it - names.begin());
    };
    std::vector<const ObserveStep *> observes;
    for (const Event &e : protocol.events) {
        if (const auto *o = std::get_if<ObserveStep>(&e.action)) {
            observes.push_back(o);
        }
    }
    if (doc.query.kind == QueryKind::return_probability) {
        const std::size_t k = observation_index(doc.query.observation, "query.observation");
        if (!observes[k]->observable.find_class(doc.query.label)) {
            fail(ErrorCode::unknown_label, "query.label",
                 "observation '" + doc.query.observation + "' has no class '" + doc.query.label + "'");
        }
    }
    if (doc.query.kind == QueryKind::histories_check && !doc.projector_families) {
        fail(ErrorCode::missing_projector_families, "projector_families",
             "histories_check needs a projector_families section");
    }
    if (doc.projector_families) {
        std::set<std::string> seen;
        for (const auto &[name, spec] : *doc.projector_families) {
            const std::string p = at_key("projector_families", name.c_str());
            if (!seen.insert(name).second) {
                fail(ErrorCode::duplicate_label, p, "projector family '" + name + "' given twice");
            }
            const std::size_t k = observation_index(name, p);
            located(p, [&] { return resolve(spec, observes[k]->observable.dim()); });
        }
    }
    if (doc.expect) {
        for (std::size_t k = 0; k < doc.expect->entries.size(); ++k) {
            const std::string p = at_key(at_index("expect.entries", k), "outcome");
            const auto &outcome = doc.expect->entries[k].outcome;
            const std::size_t want = doc.query.kind == QueryKind::return_probability ? 1 : observes.size();
            if (outcome.size() != want) {
                fail(ErrorCode::dimension_mismatch, p, "expected outcome needs " + std::to_string(want) + " labels");
            }
            for (std::size_t i = 0; i < outcome.size(); ++i) {
                const Observable &obs = doc.query.kind == QueryKind::return_probability
                                            ? observes[observation_index(doc.query.observation, p)]->observable
                                            : observes[i]->observable;
                if (!obs.find_class(outcome[i])) {
                    fail(ErrorCode::unknown_label, at_index(p, i), "unknown outcome label '" + outcome[i] + "'");
                }
            }
        }
    }
    return doc;
}

std::string serialize_scenario(const ScenarioDocument &doc) {
    Json j;
    j["format_version"] = doc.format_version;
    j["name"] = doc.name;
    if (!doc.description.empty()) {
        j["description"] = doc.description;
    }
    Json factors = Json::array();
    for (const Factor &f : doc.factors) {
        factors.push_back(Json{{"label", f.label}, {"dim", f.dim}, {"role", std::string(to_string(f.role))}});
    }
    j["factors"] = std::move(factors);

    Json initial = Json::object();
    if (doc.initial.mixture) {
        Json mix = Json::array();
        for (const auto &[w, s] : doc.initial.components) {
            Json c;
            c["weight"] = w;
            state_json(c, s);
            mix.push_back(std::move(c));
        }
        initial["mixture"] = std::move(mix);
    } else {
        state_json(initial, doc.initial.components.front().second);
    }
    j["initial"] = std::move(initial);

    Json events = Json::array();
    for (const EventSpec &e : doc.events) {
        events.push_back(event_json(e));
    }
    j["events"] = std::move(events);

    Json query{{"kind", std::string(to_string(doc.query.kind))}};
    if (doc.query.kind == QueryKind::return_probability) {
        query["observation"] = doc.query.observation;
        query["label"] = doc.query.label;
    }
    j["query"] = std::move(query);
    j["options"] = Json{{"tolerance", doc.options.tolerance}, {"engine", std::string(to_string(doc.options.engine))}};
    if (doc.projector_families) {
        Json pf = Json::object();
        for (const auto &[name, spec] : *doc.projector_families) {
            pf[name] = observable_json(spec);
        }
        j["projector_families"] = std::move(pf);
    }
    if (doc.expect) {
        Json entries = Json::array();
        for (const auto &e : doc.expect->entries) {
            entries.push_back(Json{{"outcome", e.outcome}, {"probability", e.probability}});
        }
        j["expect"] = Json{{"entries", std::move(entries)}, {"tolerance", doc.expect->tolerance}};
    }
    return j.dump(2) + "\n";
}

ScenarioDocument load_scenario(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::io_error, "cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw Error(ErrorCode::io_error, "cannot read '" + path + "'");
    }
    return parse_scenario(buf.str());
}

Protocol to_protocol(const ScenarioDocument &doc) {
    if (doc.factors.empty()) {
        schema("factors", "at least one factor is required");
    }
    for (std::size_t k = 0; k < doc.factors.size(); ++k) {
        if (doc.factors[k].dim < 2) {
            fail(ErrorCode::dimension_mismatch, at_key(at_index("factors", k), "dim"),
                 "factor '" + doc.factors[k].label + "' must have dimension >= 2");
        }
    }
    CompositeSpace space = located("factors", [&] { return CompositeSpace(doc.factors); });
    InitialState initial = build_initial(space, doc.initial);

    Protocol protocol{space, std::move(initial), {}, 0.0};
    std::map<std::string, CouplingSpec> last_coupling;
    std::set<std::string> names;
    std::optional<double> last_observe;
    for (std::size_t k = 0; k < doc.events.size(); ++k) {
        const EventSpec &e = doc.events[k];
        const std::string path = at_index("events", k);
        if (k > 0) {
            const EventSpec &prev = doc.events[k - 1];
            if (e.time < prev.time) {
                fail(ErrorCode::unordered_events, path, "event time " + fmt(e.time) + " precedes " + fmt(prev.time));
            }
            if (e.time == prev.time) {
                if (!e.seq || !prev.seq) {
                    fail(ErrorCode::time_collision, path,
                         "events share time " + fmt(e.time) + " without explicit seq indices");
                }
                if (*e.seq == *prev.seq) {
                    fail(ErrorCode::time_collision, path, "events share time " + fmt(e.time) + " and seq " +
                                                              std::to_string(*e.seq));
                }
                if (*e.seq < *prev.seq) {
                    fail(ErrorCode::unordered_events, path, "seq " + std::to_string(*e.seq) + " follows seq " +
                                                                std::to_string(*prev.seq) + " at equal time");
                }
            }
        }
        if (!(e.time > 0.0)) {
            fail(ErrorCode::unordered_events, at_key(path, "time"), "events must come after the preparation at t = 0");
        }
        Event event{e.time, e.seq.value_or(0), UnitaryStep{}};
        switch (e.kind) {
        case EventKind::unitary: {
            const std::size_t d = factor_dim(space, e.factors, at_key(path, "factors"));
            Operator m = located(at_key(path, "matrix"), [&] { return resolve(e.matrix, d); });
            const double dev = unitarity_deviation(m);
            if (!(dev < kUnitarityTolerance)) {
                fail(ErrorCode::non_unitary, at_key(path, "matrix"), "unitarity violation, max deviation " + fmt(dev));
            }
            event.action = UnitaryStep{e.factors, std::move(m)};
            break;
        }
        case EventKind::couple: {
            const std::size_t d = factor_dim(space, e.targets, at_key(path, "targets"));
            Observable partition =
                located(at_key(path, "partition"), [&] { return resolve(e.partition, d); });
            CouplingSpec spec{e.probe, e.targets, std::move(partition), e.time, e.completion};
            located(path, [&] { return local_coupling(space, spec); });
            last_coupling.insert_or_assign(e.probe, spec);
            event.action = CoupleStep{std::move(spec)};
            break;
        }
        case EventKind::reverse: {
            located(at_key(path, "probe"), [&] { return space.index_of(e.probe); });
            const auto it = last_coupling.find(e.probe);
            if (it == last_coupling.end()) {
                fail(ErrorCode::invalid_event, path, "probe '" + e.probe + "' has no earlier coupling to reverse");
            }
            event.action = ReverseStep{it->second};
            break;
        }
        case EventKind::register_memory:
            located(path, [&] { return local_registration(space, e.memory, e.probe); });
            event.action = RegisterStep{e.memory, e.probe};
            break;
        case EventKind::observe: {
            if (!names.insert(e.name).second) {
                fail(ErrorCode::duplicate_label, at_key(path, "name"), "observation '" + e.name + "' declared twice");
            }
            if (last_observe && *last_observe == e.time) {
                fail(ErrorCode::time_collision, at_key(path, "time"),
                     "two observations at time " + fmt(e.time));
            }
            last_observe = e.time;
            const std::size_t d = factor_dim(space, e.factors, at_key(path, "factors"));
            Observable obs = located(at_key(path, "observable"), [&] { return resolve(e.observable, d); });
            event.action = ObserveStep{e.name, e.factors, std::move(obs)};
            break;
        }
        }
        protocol.events.push_back(std::move(event));
    }
    if (names.empty()) {
        schema("events", "at least one observe event is required");
    }
    return protocol;
}

HistoryFamily to_family(const ScenarioDocument &doc) {
    if (!doc.projector_families) {
        throw Error(ErrorCode::missing_projector_families, "histories_check needs a projector_families section",
                    "projector_families");
    }
    const Protocol protocol = to_protocol(doc);
    const MeasurementChain chain = build_chain(protocol);
    HistoryFamily family = located("initial", [&] { return family_from_chain(chain); });
    const auto names = observation_names(protocol);
    std::vector<const ObserveStep *> observes;
    for (const Event &e : protocol.events) {
        if (const auto *o = std::get_if<ObserveStep>(&e.action)) {
            observes.push_back(o);
        }
    }
    for (const auto &[name, spec] : *doc.projector_families) {
        const std::string p = at_key("projector_families", name.c_str());
        const auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) {
            fail(ErrorCode::unknown_label, p, "no observation named '" + name + "'");
        }
        const auto k = static_cast<std::size_t>(it - names.begin());
        const Observable local = located(p, [&] { return resolve(spec, observes[k]->observable.dim()); });
        family.projector_sets[k] =
            lift_observable(local, protocol.space.indices_of(observes[k]->factors), protocol.space.dims());
    }
    return family;
}

MatrixSpec to_matrix_spec(const Operator &op) {
    MatrixSpec spec;
    if (op.rows() == op.cols() && op.isIdentity(0.0)) {
        spec.kind = MatrixSpec::Kind::identity;
    } else if (op.rows() == 2 && op == hadamard()) {
        spec.kind = MatrixSpec::Kind::hadamard;
    } else if (op.rows() == 2 && op == pauli_x()) {
        spec.kind = MatrixSpec::Kind::pauli_x;
    } else {
        spec.kind = MatrixSpec::Kind::explicit_entries;
        spec.entries = op;
    }
    return spec;
}

ObservableSpec to_observable_spec(const Observable &obs) {
    ObservableSpec spec;
    spec.basis = to_matrix_spec(obs.basis());
    for (std::size_t m = 0; m < obs.num_classes(); ++m) {
        spec.classes.push_back({obs.eigen_class(m).label, obs.eigen_class(m).value, obs.members(m)});
    }
    return spec;
}

EventSpec to_event_spec(const Event &event, const CompositeSpace &space) {
    EventSpec e;
    e.time = event.time;
    e.seq = event.seq;
    std::visit(
        [&](const auto &step) {
            using T = std::decay_t<decltype(step)>;
            if constexpr (std::is_same_v<T, UnitaryStep>) {
                e.kind = EventKind::unitary;
                e.factors = step.factors;
                e.matrix = to_matrix_spec(step.matrix);
            } else if constexpr (std::is_same_v<T, CoupleStep>) {
                e.kind = EventKind::couple;
                e.probe = step.coupling.probe;
                e.targets = step.coupling.targets;
                e.partition = to_observable_spec(step.coupling.partition);
                e.completion = step.coupling.completion;
            } else if constexpr (std::is_same_v<T, ReverseStep>) {
                e.kind = EventKind::reverse;
                e.probe = step.coupling.probe;
            } else if constexpr (std::is_same_v<T, RegisterStep>) {
                e.kind = EventKind::register_memory;
                e.memory = step.memory;
                e.probe = step.probe;
            } else {
                e.kind = EventKind::observe;
                e.name = step.name;
                e.factors = step.factors;
                e.observable = to_observable_spec(step.observable);
            }
        },
        event.action);
    (void)space;
    return e;
}

} // namespace qchain
