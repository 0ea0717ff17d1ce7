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
 * Dense complex linear algebra over small composite Hilbert spaces.
 *
 * Tensor index convention (used everywhere in the library): for factors with
 * dimensions (d_0, d_1, ..., d_{k-1}) the composite basis index of the digit
 * tuple (i_0, ..., i_{k-1}) is
 *
 *     i_0 * (d_1 ... d_{k-1}) + i_1 * (d_2 ... d_{k-1}) + ... + i_{k-1},
 *
 * i.e. the left-most factor is the slowest (most significant) digit. This is
 * the convention of the Kronecker product, so |a>|b> == tensor_product(a, b).
 */

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>

#include "qchain/error.hpp"

namespace qchain {

template <typename Scalar = double>
using CVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar = double>
using COperator = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

using Complex = std::complex<double>;
using Vector = CVector<double>;
using Operator = COperator<double>;
using Index = Eigen::Index;

inline constexpr std::size_t kDefaultDimensionCap = 4096;

/// Largest composite dimension any constructor will produce. Defaults to 4096;
/// the QCHAIN_DIM_CAP environment variable overrides it.
std::size_t dimension_cap();

/// Throws capacity_exceeded when `dim` is above dimension_cap().
void check_capacity(std::size_t dim, const char *what = "composite dimension");

/// Product of factor dimensions, checked against the capacity cap.
std::size_t composite_dimension(std::span<const std::size_t> dims);

/// Kronecker product; the left operand is the slow index. Both operands must
/// be column vectors or both operators.
template <typename DerivedA, typename DerivedB>
auto tensor_product(const Eigen::MatrixBase<DerivedA> &a, const Eigen::MatrixBase<DerivedB> &b) {
    constexpr bool a_is_vector = DerivedA::ColsAtCompileTime == 1;
    constexpr bool b_is_vector = DerivedB::ColsAtCompileTime == 1;
    static_assert(a_is_vector == b_is_vector,
                  "tensor_product operands must both be vectors or both be operators");
    using Scalar = typename Eigen::ScalarBinaryOpTraits<typename DerivedA::Scalar,
                                                        typename DerivedB::Scalar>::ReturnType;
    using Result = std::conditional_t<a_is_vector, Eigen::Matrix<Scalar, Eigen::Dynamic, 1>,
                                      Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>>;

    const Index br = b.rows();
    const Index bc = b.cols();
    check_capacity(static_cast<std::size_t>(a.rows() * br), "tensor product dimension");
    Result out(a.rows() * br, a.cols() * bc);
    for (Index i = 0; i < a.rows(); ++i) {
        for (Index j = 0; j < a.cols(); ++j) {
            out.block(i * br, j * bc, br, bc) = a(i, j) * b;
        }
    }
    return out;
}

/// Splits a composite basis index into per-factor digits.
std::vector<std::size_t> index_digits(std::size_t index, std::span<const std::size_t> dims);

/// Inverse of index_digits.
std::size_t compose_index(std::span<const std::size_t> digits, std::span<const std::size_t> dims);

/**
 * Composite basis indices grouped by the digits of a chosen ordered subset of
 * factors: `at(rest, local)` is the composite index whose digits on the chosen
 * factors spell `local` (in the chosen order) and whose remaining digits spell
 * `rest` (in composite order).
 */
class FactorSplit {
  public:
    FactorSplit(std::span<const std::size_t> factors, std::span<const std::size_t> dims);

    std::size_t local_dim() const noexcept { return local_dim_; }
    std::size_t rest_dim() const noexcept { return rest_dim_; }
    Index at(std::size_t rest, std::size_t local) const noexcept {
        return table_[rest * local_dim_ + local];
    }

  private:
    std::size_t local_dim_ = 1;
    std::size_t rest_dim_ = 1;
    std::vector<Index> table_;
};

/// Operator acting as `op` on the listed factors (in listed order) and as the
/// identity on every other factor.
template <typename Derived>
auto embed(const Eigen::MatrixBase<Derived> &op, std::span<const std::size_t> factors,
           std::span<const std::size_t> dims) {
    using Scalar = typename Derived::Scalar;
    const FactorSplit split(factors, dims);
    if (static_cast<std::size_t>(op.rows()) != split.local_dim() || op.rows() != op.cols()) {
        throw Error(ErrorCode::dimension_mismatch, "embedded operator does not match factor dims");
    }
    const Index total = static_cast<Index>(split.local_dim() * split.rest_dim());
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(total, total);
    for (std::size_t r = 0; r < split.rest_dim(); ++r) {
        for (std::size_t i = 0; i < split.local_dim(); ++i) {
            for (std::size_t j = 0; j < split.local_dim(); ++j) {
                out(split.at(r, i), split.at(r, j)) = op(static_cast<Index>(i), static_cast<Index>(j));
            }
        }
    }
    return out;
}

/// Single-factor form of embed().
template <typename Derived>
auto embed_operator(const Eigen::MatrixBase<Derived> &op, std::size_t factor_index,
                    std::span<const std::size_t> dims) {
    if (factor_index >= dims.size()) {
        throw Error(ErrorCode::index_out_of_range, "factor index out of range");
    }
    const std::size_t factors[] = {factor_index};
    return embed(op, std::span<const std::size_t>(factors), dims);
}

/**
 * In place `target <- embed(op, factors, dims) * target` without forming the
 * embedded operator. Costs O(total * local_dim * cols).
 */
template <typename DerivedOp, typename DerivedTarget>
void apply_local(const Eigen::MatrixBase<DerivedOp> &op, std::span<const std::size_t> factors,
                 std::span<const std::size_t> dims, Eigen::MatrixBase<DerivedTarget> &target) {
    using Scalar = typename DerivedTarget::Scalar;
    const FactorSplit split(factors, dims);
    const auto dl = static_cast<Index>(split.local_dim());
    if (op.rows() != dl || op.cols() != dl ||
        static_cast<std::size_t>(target.rows()) != split.local_dim() * split.rest_dim()) {
        throw Error(ErrorCode::dimension_mismatch, "local operator does not match factor dims");
    }
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> block(dl, target.cols());
    for (std::size_t r = 0; r < split.rest_dim(); ++r) {
        for (Index l = 0; l < dl; ++l) {
            block.row(l) = target.row(split.at(r, static_cast<std::size_t>(l)));
        }
        block = op * block;
        for (Index l = 0; l < dl; ++l) {
            target.row(split.at(r, static_cast<std::size_t>(l))) = block.row(l);
        }
    }
}

/// max |U^dagger U - I| over entries; +inf for a non-square input.
template <typename Derived>
double unitarity_deviation(const Eigen::MatrixBase<Derived> &u) {
    if (u.rows() != u.cols()) {
        return std::numeric_limits<double>::infinity();
    }
    const auto gram = (u.adjoint() * u).eval();
    using Plain = std::remove_cv_t<std::remove_reference_t<decltype(gram)>>;
    return static_cast<double>(
        (gram - Plain::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff());
}

/// True iff max |U^dagger U - I| < tol.
template <typename Derived>
bool adjoint_check(const Eigen::MatrixBase<Derived> &u, double tol) {
    return unitarity_deviation(u) < tol;
}

/// max |A - A^dagger| over entries.
template <typename Derived>
double hermiticity_deviation(const Eigen::MatrixBase<Derived> &a) {
    if (a.rows() != a.cols()) {
        return std::numeric_limits<double>::infinity();
    }
    return static_cast<double>((a - a.adjoint()).cwiseAbs().maxCoeff());
}

/**
 * Haar-distributed unitary: complex Ginibre matrix from a seeded mt19937_64,
 * Householder QR, and the column phases fixed by the diagonal of R. The same
 * (dim, seed) always yields the same matrix.
 */
template <typename Scalar = double>
COperator<Scalar> haar_random_unitary(std::size_t dim, std::uint64_t seed) {
    if (dim == 0) {
        throw Error(ErrorCode::dimension_mismatch, "haar_random_unitary needs dim >= 1");
    }
    check_capacity(dim, "random unitary dimension");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const auto n = static_cast<Index>(dim);
    COperator<Scalar> z(n, n);
    for (Index j = 0; j < n; ++j) {
        for (Index i = 0; i < n; ++i) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            z(i, j) = std::complex<Scalar>(static_cast<Scalar>(re), static_cast<Scalar>(im));
        }
    }
    Eigen::HouseholderQR<COperator<Scalar>> qr(z);
    COperator<Scalar> q = qr.householderQ() * COperator<Scalar>::Identity(n, n);
    const COperator<Scalar> &r = qr.matrixQR();
    for (Index j = 0; j < n; ++j) {
        const std::complex<Scalar> d = r(j, j);
        const Scalar mag = std::abs(d);
        q.col(j) *= mag > Scalar(0) ? d / mag : std::complex<Scalar>(1);
    }
    return q;
}

/// Haar-random normalized vector (first column of a Haar unitary).
template <typename Scalar = double>
CVector<Scalar> haar_random_state(std::size_t dim, std::uint64_t seed) {
    return haar_random_unitary<Scalar>(dim, seed).col(0);
}

template <typename Scalar = double>
CVector<Scalar> basis_vector(std::size_t dim, std::size_t index) {
    if (index >= dim) {
        throw Error(ErrorCode::index_out_of_range, "basis index out of range");
    }
    CVector<Scalar> v = CVector<Scalar>::Zero(static_cast<Index>(dim));
    v(static_cast<Index>(index)) = std::complex<Scalar>(1);
    return v;
}

template <typename Scalar = double>
COperator<Scalar> identity(std::size_t dim) {
    return COperator<Scalar>::Identity(static_cast<Index>(dim), static_cast<Index>(dim));
}

template <typename Scalar = double>
COperator<Scalar> hadamard() {
    const Scalar h = Scalar(1) / std::sqrt(Scalar(2));
    COperator<Scalar> m(2, 2);
    m << h, h, h, -h;
    return m;
}

/// Real rotation [[cos t, -sin t], [sin t, cos t]].
template <typename Scalar = double>
COperator<Scalar> rotation(Scalar theta) {
    COperator<Scalar> m(2, 2);
    m << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    return m;
}

template <typename Scalar = double>
COperator<Scalar> pauli_x() {
    COperator<Scalar> m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

/// |a><b|
template <typename DerivedA, typename DerivedB>
auto outer(const Eigen::MatrixBase<DerivedA> &a, const Eigen::MatrixBase<DerivedB> &b) {
    return (a * b.adjoint()).eval();
}

} // namespace qchain
