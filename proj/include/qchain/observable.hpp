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
#include <optional>
#include <string>
#include <vector>

#include "qchain/hilbert.hpp"

namespace qchain {

/// One eigenvalue of an observable: its reported label and real value.
struct EigenClass {
    std::string label;
    double value = 0.0;
};

/**
 * A Hermitian quantity given by an orthonormal eigenbasis (columns of
 * `basis`) and an explicit assignment of every basis vector to exactly one
 * eigenvalue class. Degeneracy is structural: two basis vectors share an
 * eigenvalue iff they are assigned to the same class, regardless of how the
 * values compare numerically.
 */
class Observable {
  public:
    /// Throws invalid_observable on a non-orthonormal basis (tolerance 1e-10),
    /// an assignment that is not total and surjective, or repeated labels or
    /// values.
    Observable(Operator basis, std::vector<std::size_t> assignment, std::vector<EigenClass> classes);

    /// Computational basis with the given class assignment.
    static Observable computational(std::size_t dim, std::vector<std::size_t> assignment,
                                    std::vector<EigenClass> classes);
    /// Non-degenerate observable whose eigenvectors are the columns of `basis`;
    /// classes are labelled "0", "1", ... with values 0, 1, ...
    static Observable nondegenerate(Operator basis);
    /// A single class containing every basis vector.
    static Observable trivial(std::size_t dim, std::string label = "any");

    std::size_t dim() const noexcept { return assignment_.size(); }
    std::size_t num_classes() const noexcept { return classes_.size(); }
    const Operator &basis() const noexcept { return basis_; }
    Vector basis_vector(std::size_t n) const { return basis_.col(static_cast<Index>(n)); }
    std::size_t class_of(std::size_t n) const { return assignment_.at(n); }
    const std::vector<std::size_t> &assignment() const noexcept { return assignment_; }
    const std::vector<std::size_t> &members(std::size_t m) const { return members_.at(m); }
    const EigenClass &eigen_class(std::size_t m) const { return classes_.at(m); }
    const std::vector<EigenClass> &classes() const noexcept { return classes_; }
    bool is_computational() const noexcept { return computational_; }
    bool is_nondegenerate() const noexcept { return classes_.size() == assignment_.size(); }
    std::optional<std::size_t> find_class(const std::string &label) const;

    /// Sum over members n of class m of |q_n><q_n|. Throws index_out_of_range.
    Operator projector(std::size_t m) const;
    /// Sum over classes of value * projector.
    Operator matrix() const;

  private:
    Observable(Operator basis, std::vector<std::size_t> assignment, std::vector<EigenClass> classes,
               bool check_basis);
    friend Observable lift_observable(const Observable &, std::span<const std::size_t>,
                                      std::span<const std::size_t>);

    Operator basis_;
    std::vector<std::size_t> assignment_;
    std::vector<EigenClass> classes_;
    std::vector<std::vector<std::size_t>> members_;
    bool computational_ = false;
};

/// Free-function spelling of Observable::projector.
inline Operator projector(const Observable &obs, std::size_t m) { return obs.projector(m); }

/**
 * Lifts an observable on an ordered subset of factors to the composite: the
 * basis becomes embed(basis, factors, dims) and each composite basis vector
 * inherits the class of its local digit.
 */
Observable lift_observable(const Observable &local, std::span<const std::size_t> factors,
                           std::span<const std::size_t> dims);

} // namespace qchain
