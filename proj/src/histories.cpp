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

#include "qchain/histories.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace qchain {

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

// Pi_m v
Vector project(const Observable &obs, std::size_t m, const Vector &v) {
    const auto &members = obs.members(m);
    if (obs.is_computational()) {
        Vector out = Vector::Zero(v.size());
        for (const std::size_t n : members) {
            out(static_cast<Index>(n)) = v(static_cast<Index>(n));
        }
        return out;
    }
    Vector out = Vector::Zero(v.size());
    for (const std::size_t n : members) {
        const auto q = obs.basis().col(static_cast<Index>(n));
        out += q.dot(v) * q;
    }
    return out;
}

std::vector<std::size_t> set_counts(const HistoryFamily &family) {
    std::vector<std::size_t> counts;
    for (const Observable &o : family.projector_sets) {
        counts.push_back(o.num_classes());
    }
    return counts;
}

std::string unused_label(const Observable &obs, std::string label) {
    while (obs.find_class(label)) {
        label += "_";
    }
    return label;
}

// Projector set on (mu, d, s) or (d, s) for a witnessed time.
Observable witnessed_set(const Observable &bare, bool with_memory, std::size_t &unrecorded) {
    const std::size_t levels = bare.num_classes() + 1;
    const std::size_t n = bare.dim();
    const std::size_t tags = with_memory ? levels * levels : levels;
    unrecorded = bare.num_classes();

    std::vector<std::size_t> assignment(tags * n);
    for (std::size_t t = 0; t < tags; ++t) {
        const std::size_t mu = with_memory ? t / levels : 0;
        const std::size_t d = t % levels;
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t c = bare.class_of(k);
            const bool recorded = d == c + 1 && (!with_memory || mu == c + 1);
            assignment[t * n + k] = recorded ? c : unrecorded;
        }
    }
    std::vector<EigenClass> classes = bare.classes();
    double top = classes.front().value;
    for (const auto &c : classes) {
        top = std::max(top, c.value);
    }
    classes.push_back({unused_label(bare, "unrecorded"), top + 1.0});
    const auto dim = static_cast<Index>(tags * n);
    Operator basis = bare.is_computational() ? Operator(Operator::Identity(dim, dim))
                                             : Operator(tensor_product(Operator(Operator::Identity(
                                                                           static_cast<Index>(tags),
                                                                           static_cast<Index>(tags))),
                                                                       bare.basis()));
    return Observable(std::move(basis), std::move(assignment), std::move(classes));
}

} // namespace

void validate_family(const HistoryFamily &family) {
    if (family.length() == 0) {
        throw Error(ErrorCode::schema_error, "history family needs at least one time");
    }
    if (family.projector_sets.size() != family.length()) {
        throw Error(ErrorCode::missing_projector_families, "history family needs one projector set per time");
    }
    if (family.times.size() != family.length() + 1) {
        throw Error(ErrorCode::schema_error, "history family needs L + 1 times");
    }
    for (std::size_t k = 1; k < family.times.size(); ++k) {
        if (!(family.times[k] > family.times[k - 1])) {
            throw Error(ErrorCode::time_collision, "non-increasing times at index " + std::to_string(k));
        }
    }
    const double dev = std::abs(family.initial.norm() - 1.0);
    if (!(dev <= kStateTolerance)) {
        throw Error(ErrorCode::invalid_state, "initial state not normalized, deviation " + fmt(dev));
    }
    for (std::size_t l = 0; l < family.length(); ++l) {
        const Operator &u = family.unitaries[l];
        if (static_cast<std::size_t>(u.rows()) != family.dim() || family.projector_sets[l].dim() != family.dim()) {
            throw Error(ErrorCode::dimension_mismatch, "history family dimension mismatch at time " +
                                                           std::to_string(l + 1));
        }
        const double udev = unitarity_deviation(u);
        if (!(udev < kUnitarityTolerance)) {
            throw Error(ErrorCode::non_unitary, "unitarity violation, max deviation " + fmt(udev));
        }
    }
}

HistoryFamily make_family(Vector initial, std::vector<Operator> unitaries, std::vector<Observable> projector_sets) {
    HistoryFamily f;
    f.initial = std::move(initial);
    f.unitaries = std::move(unitaries);
    f.projector_sets = std::move(projector_sets);
    for (std::size_t k = 0; k <= f.unitaries.size(); ++k) {
        f.times.push_back(static_cast<double>(k));
    }
    validate_family(f);
    return f;
}

HistoryFamily family_from_chain(const MeasurementChain &chain) {
    HistoryFamily f;
    f.initial = chain.initial.pure_state();
    f.times = chain.times;
    f.unitaries = chain.unitaries;
    f.projector_sets = chain.observables;
    return f;
}

MeasurementChain chain_from_family(const HistoryFamily &family) {
    MeasurementChain chain;
    chain.times = family.times;
    chain.unitaries = family.unitaries;
    chain.observables = family.projector_sets;
    chain.initial = InitialState::pure(family.initial);
    return chain;
}

Vector branch_state(const HistoryFamily &family, const OutcomeSequence &outcomes) {
    if (outcomes.size() != family.length()) {
        throw Error(ErrorCode::dimension_mismatch, "history length differs from the family length");
    }
    Vector v = family.initial;
    for (std::size_t l = 0; l < family.length(); ++l) {
        const Observable &set = family.projector_sets[l];
        if (outcomes[l] >= set.num_classes()) {
            throw Error(ErrorCode::index_out_of_range, "history class out of range at time " +
                                                           std::to_string(l + 1));
        }
        v = project(set, outcomes[l], family.unitaries[l] * v);
    }
    return v;
}

DecoherenceMatrix decoherence_matrix(const HistoryFamily &family) {
    if (family.projector_sets.size() != family.length() || family.length() == 0) {
        throw Error(ErrorCode::missing_projector_families, "history family needs one projector set per time");
    }
    const auto counts = set_counts(family);
    DecoherenceMatrix out;
    out.histories = all_sequences(counts);
    Operator branches(static_cast<Index>(family.dim()), static_cast<Index>(out.histories.size()));

    // depth-first, sharing prefixes; visits histories in lexicographic order
    Index column = 0;
    std::function<void(std::size_t, const Vector &)> walk = [&](std::size_t l, const Vector &v) {
        if (l == family.length()) {
            branches.col(column++) = v;
            return;
        }
        const Vector evolved = family.unitaries[l] * v;
        for (std::size_t m = 0; m < counts[l]; ++m) {
            walk(l + 1, project(family.projector_sets[l], m, evolved));
        }
    };
    walk(0, family.initial);
    out.gram = branches.adjoint() * branches;
    return out;
}

ConsistencyVerdict consistency_check(const DecoherenceMatrix &matrix, double tol) {
    ConsistencyVerdict v;
    const Index n = matrix.gram.rows();
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            if (i == j) {
                continue;
            }
            const double mag = std::abs(matrix.gram(i, j));
            if (!v.worst || mag > v.max_off_diagonal) {
                v.max_off_diagonal = mag;
                v.worst = std::make_pair(matrix.histories[static_cast<std::size_t>(i)],
                                         matrix.histories[static_cast<std::size_t>(j)]);
            }
        }
    }
    v.consistent = v.max_off_diagonal < tol;
    return v;
}

ConsistencyVerdict consistency_check(const HistoryFamily &family, double tol) {
    return consistency_check(decoherence_matrix(family), tol);
}

Distribution history_probabilities(const DecoherenceMatrix &matrix) {
    Distribution d;
    for (std::size_t k = 0; k < matrix.histories.size(); ++k) {
        d[matrix.histories[k]] = matrix.gram(static_cast<Index>(k), static_cast<Index>(k)).real();
    }
    return d;
}

std::vector<Witness> default_witnesses(std::size_t length) {
    std::vector<Witness> w(length, Witness::probe_and_memory);
    if (!w.empty()) {
        w.back() = Witness::none;
    }
    return w;
}

AugmentedFamily augment_with_observers(const HistoryFamily &bare, std::span<const Witness> witnesses) {
    validate_family(bare);
    const std::size_t length = bare.length();
    if (witnesses.size() != length) {
        throw Error(ErrorCode::dimension_mismatch, "need one witness entry per time (" + std::to_string(length) +
                                                       "), got " + std::to_string(witnesses.size()));
    }
    auto mu_label = [](std::size_t l) { return "mu" + std::to_string(l + 1); };
    auto d_label = [](std::size_t l) { return "d" + std::to_string(l + 1); };

    std::vector<Factor> factors;
    for (std::size_t l = length; l-- > 0;) {
        if (witnesses[l] == Witness::probe_and_memory) {
            factors.push_back({mu_label(l), bare.projector_sets[l].num_classes() + 1, Role::memory});
        }
    }
    for (std::size_t l = length; l-- > 0;) {
        if (witnesses[l] != Witness::none) {
            factors.push_back({d_label(l), bare.projector_sets[l].num_classes() + 1, Role::probe});
        }
    }
    factors.push_back({"s", bare.dim(), Role::system});

    AugmentedFamily out;
    out.space = CompositeSpace(std::move(factors));
    out.witnesses.assign(witnesses.begin(), witnesses.end());
    out.unrecorded_class.assign(length, std::nullopt);

    Protocol protocol{out.space, InitialState::pure(out.space.product_state({{"s", bare.initial}})), {}, bare.times[0]};
    for (std::size_t l = 0; l < length; ++l) {
        const double t = bare.times[l + 1];
        const Observable &set = bare.projector_sets[l];
        protocol.events.push_back(Event{t, 0, UnitaryStep{{"s"}, bare.unitaries[l]}});
        if (witnesses[l] == Witness::none) {
            protocol.events.push_back(Event{t, 3, ObserveStep{"t" + std::to_string(l + 1), {"s"}, set}});
            continue;
        }
        protocol.events.push_back(Event{t, 1, CoupleStep{CouplingSpec{d_label(l), {"s"}, set, t}}});
        const bool memory = witnesses[l] == Witness::probe_and_memory;
        std::vector<std::string> on{d_label(l), "s"};
        if (memory) {
            protocol.events.push_back(Event{t, 2, RegisterStep{mu_label(l), d_label(l)}});
            on.insert(on.begin(), mu_label(l));
        }
        std::size_t extra = 0;
        Observable observed = witnessed_set(set, memory, extra);
        out.unrecorded_class[l] = extra;
        protocol.events.push_back(Event{t, 3, ObserveStep{"t" + std::to_string(l + 1), on, std::move(observed)}});
    }
    out.family = family_from_chain(build_chain(protocol));
    return out;
}

Distribution final_only_distribution(const HistoryFamily &family) {
    if (family.length() == 0) {
        throw Error(ErrorCode::schema_error, "history family needs at least one time");
    }
    Vector v = family.initial;
    for (const Operator &u : family.unitaries) {
        v = u * v;
    }
    const Observable &last = family.projector_sets.back();
    Distribution dist;
    for (std::size_t m = 0; m < last.num_classes(); ++m) {
        dist[OutcomeSequence{{m}}] = project(last, m, v).squaredNorm();
    }
    return dist;
}

double marginal_check(const Distribution &full, const Distribution &last) {
    if (full.empty()) {
        return max_abs_difference(full, last);
    }
    const std::size_t final_pos = full.begin()->first.size() - 1;
    const std::size_t keep[] = {final_pos};
    return max_abs_difference(marginal(full, keep), last);
}

} // namespace qchain
