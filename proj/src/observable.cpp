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

#include "qchain/observable.hpp"

#include <set>

namespace qchain {

namespace {
constexpr double kBasisTolerance = 1e-10;
}

Observable::Observable(Operator basis, std::vector<std::size_t> assignment,
                       std::vector<EigenClass> classes)
    : Observable(std::move(basis), std::move(assignment), std::move(classes), true) {}

Observable::Observable(Operator basis, std::vector<std::size_t> assignment,
                       std::vector<EigenClass> classes, bool check_basis)
    : basis_(std::move(basis)), assignment_(std::move(assignment)), classes_(std::move(classes)) {
    const auto n = static_cast<std::size_t>(basis_.rows());
    if (basis_.rows() != basis_.cols() || n == 0) {
        throw Error(ErrorCode::invalid_observable, "observable basis must be a non-empty square matrix");
    }
    check_capacity(n, "observable dimension");
    if (assignment_.size() != n) {
        throw Error(ErrorCode::invalid_observable,
                    "class assignment has " + std::to_string(assignment_.size()) +
                        " entries for dimension " + std::to_string(n));
    }
    if (classes_.empty() || classes_.size() > n) {
        throw Error(ErrorCode::invalid_observable, "observable needs between 1 and dim classes");
    }
    computational_ = basis_.isIdentity(0.0);
    if (check_basis && !computational_) {
        const double dev = unitarity_deviation(basis_);
        if (!(dev < kBasisTolerance)) {
            throw Error(ErrorCode::invalid_observable,
                        "observable basis is not orthonormal, max deviation " + std::to_string(dev));
        }
    }
    std::set<std::string> labels;
    std::set<double> values;
    for (const auto &c : classes_) {
        if (!labels.insert(c.label).second) {
            throw Error(ErrorCode::invalid_observable, "repeated eigenvalue label '" + c.label + "'");
        }
        if (!values.insert(c.value).second) {
            throw Error(ErrorCode::invalid_observable,
                        "repeated eigenvalue value for label '" + c.label + "'");
        }
    }
    members_.assign(classes_.size(), {});
    for (std::size_t k = 0; k < n; ++k) {
        if (assignment_[k] >= classes_.size()) {
            throw Error(ErrorCode::invalid_observable,
                        "basis vector " + std::to_string(k) + " assigned to a missing class");
        }
        members_[assignment_[k]].push_back(k);
    }
    for (std::size_t m = 0; m < classes_.size(); ++m) {
        if (members_[m].empty()) {
            throw Error(ErrorCode::invalid_observable,
                        "eigenvalue class '" + classes_[m].label + "' has no basis vectors");
        }
    }
}

Observable Observable::computational(std::size_t dim, std::vector<std::size_t> assignment,
                                     std::vector<EigenClass> classes) {
    return Observable(identity(dim), std::move(assignment), std::move(classes));
}

Observable Observable::nondegenerate(Operator basis) {
    const auto n = static_cast<std::size_t>(basis.rows());
    std::vector<std::size_t> assignment(n);
    std::vector<EigenClass> classes(n);
    for (std::size_t k = 0; k < n; ++k) {
        assignment[k] = k;
        classes[k] = {std::to_string(k), static_cast<double>(k)};
    }
    return Observable(std::move(basis), std::move(assignment), std::move(classes));
}

Observable Observable::trivial(std::size_t dim, std::string label) {
    return computational(dim, std::vector<std::size_t>(dim, 0), {{std::move(label), 0.0}});
}

std::optional<std::size_t> Observable::find_class(const std::string &label) const {
    for (std::size_t m = 0; m < classes_.size(); ++m) {
        if (classes_[m].label == label) {
            return m;
        }
    }
    return std::nullopt;
}

Operator Observable::projector(std::size_t m) const {
    if (m >= classes_.size()) {
        throw Error(ErrorCode::index_out_of_range,
                    "eigenvalue class " + std::to_string(m) + " out of range");
    }
    const auto n = static_cast<Index>(dim());
    Operator p = Operator::Zero(n, n);
    for (const std::size_t k : members_[m]) {
        if (computational_) {
            p(static_cast<Index>(k), static_cast<Index>(k)) = 1.0;
        } else {
            const auto col = basis_.col(static_cast<Index>(k));
            p.noalias() += col * col.adjoint();
        }
    }
    return p;
}

Operator Observable::matrix() const {
    const auto n = static_cast<Index>(dim());
    Operator q = Operator::Zero(n, n);
    for (std::size_t m = 0; m < classes_.size(); ++m) {
        q += classes_[m].value * projector(m);
    }
    return q;
}

Observable lift_observable(const Observable &local, std::span<const std::size_t> factors,
                           std::span<const std::size_t> dims) {
    const FactorSplit split(factors, dims);
    if (split.local_dim() != local.dim()) {
        throw Error(ErrorCode::dimension_mismatch,
                    "observable dimension " + std::to_string(local.dim()) +
                        " does not match the selected factors (" +
                        std::to_string(split.local_dim()) + ")");
    }
    const std::size_t total = split.local_dim() * split.rest_dim();
    check_capacity(total);
    std::vector<std::size_t> assignment(total);
    for (std::size_t r = 0; r < split.rest_dim(); ++r) {
        for (std::size_t l = 0; l < split.local_dim(); ++l) {
            assignment[static_cast<std::size_t>(split.at(r, l))] = local.class_of(l);
        }
    }
    // an embedded orthonormal basis is orthonormal; skip the O(n^3) recheck
    Operator basis = local.is_computational() ? Operator(identity(total))
                                              : Operator(embed(local.basis(), factors, dims));
    return Observable(std::move(basis), std::move(assignment), local.classes(), false);
}

} // namespace qchain
