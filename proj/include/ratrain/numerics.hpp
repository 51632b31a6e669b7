// SPDX-License-Identifier: Apache-2.0
//
// ratrain: channel estimation and orientation design for rotatable-antenna arrays
// Copyright (C) 2026 The ratrain authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

/// \file
/// Dense complex linear algebra: matrices, Kronecker/Hadamard products,
/// a cyclic Jacobi eigensolver for Hermitian matrices, and least squares
/// through the normal equations.

#pragma once

#include "ratrain/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <sstream>
#include <vector>

namespace ratrain
{

using cd = std::complex<double>;
using CVector = std::vector<cd>;
using RVector = std::vector<double>;

/// Row-major dense complex matrix.
class ComplexMatrix
{
  public:
    ComplexMatrix() = default;

    ComplexMatrix(std::size_t rows, std::size_t cols, cd fill = cd{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cd> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries))
    {
        if (data_.size() != rows_ * cols_)
            throw dimension_error("ComplexMatrix: entry count does not equal rows*cols");
    }

    static ComplexMatrix identity(std::size_t n)
    {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = 1.0;
        return m;
    }

    // Single column matrix holding v.
    static ComplexMatrix column(std::span<const cd> v)
    {
        return ComplexMatrix(v.size(), 1, std::vector<cd>(v.begin(), v.end()));
    }

    static ComplexMatrix diagonal(std::span<const cd> v)
    {
        ComplexMatrix m(v.size(), v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            m(i, i) = v[i];
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return data_.empty(); }
    bool is_square() const { return rows_ == cols_; }

    cd &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cd &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const cd> data() const { return data_; }
    std::span<cd> data() { return data_; }

    CVector col(std::size_t c) const
    {
        CVector out(rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            out[r] = (*this)(r, c);
        return out;
    }

    void set_col(std::size_t c, std::span<const cd> v)
    {
        if (v.size() != rows_)
            throw dimension_error("ComplexMatrix::set_col: length mismatch");
        for (std::size_t r = 0; r < rows_; ++r)
            (*this)(r, c) = v[r];
    }

    // Columns [first, first + count).
    ComplexMatrix cols_range(std::size_t first, std::size_t count) const
    {
        if (first + count > cols_)
            throw dimension_error("ComplexMatrix::cols_range: out of range");
        ComplexMatrix out(rows_, count);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < count; ++c)
                out(r, c) = (*this)(r, first + c);
        return out;
    }

    ComplexMatrix adjoint() const
    {
        ComplexMatrix out(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c)
                out(c, r) = std::conj((*this)(r, c));
        return out;
    }

    bool all_finite() const
    {
        return std::all_of(data_.begin(), data_.end(),
                           [](const cd &z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
    }

    ComplexMatrix &operator+=(const ComplexMatrix &o)
    {
        require_same_shape(o, "operator+=");
        for (std::size_t i = 0; i < data_.size(); ++i)
            data_[i] += o.data_[i];
        return *this;
    }

    ComplexMatrix &operator-=(const ComplexMatrix &o)
    {
        require_same_shape(o, "operator-=");
        for (std::size_t i = 0; i < data_.size(); ++i)
            data_[i] -= o.data_[i];
        return *this;
    }

    ComplexMatrix &operator*=(cd s)
    {
        for (auto &z : data_)
            z *= s;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix &b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix &b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, cd s) { return a *= s; }
    friend ComplexMatrix operator*(cd s, ComplexMatrix a) { return a *= s; }

    friend ComplexMatrix operator*(const ComplexMatrix &a, const ComplexMatrix &b)
    {
        if (a.cols_ != b.rows_)
            throw dimension_error("matrix product: inner dimensions differ");
        ComplexMatrix out(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k)
            {
                const cd aik = a(i, k);
                if (aik == cd{})
                    continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    out(i, j) += aik * b(k, j);
            }
        return out;
    }

    friend CVector operator*(const ComplexMatrix &a, std::span<const cd> x)
    {
        if (a.cols_ != x.size())
            throw dimension_error("matrix-vector product: length mismatch");
        CVector out(a.rows_);
        for (std::size_t i = 0; i < a.rows_; ++i)
        {
            cd acc{};
            for (std::size_t k = 0; k < a.cols_; ++k)
                acc += a(i, k) * x[k];
            out[i] = acc;
        }
        return out;
    }

  private:
    void require_same_shape(const ComplexMatrix &o, const char *op) const
    {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw dimension_error(std::string("ComplexMatrix::") + op + ": shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cd> data_;
};

inline double frobenius_norm(const ComplexMatrix &a)
{
    double s = 0.0;
    for (const auto &z : a.data())
        s += std::norm(z);
    return std::sqrt(s);
}

inline double max_abs(const ComplexMatrix &a)
{
    double m = 0.0;
    for (const auto &z : a.data())
        m = std::max(m, std::abs(z));
    return m;
}

inline double norm2(std::span<const cd> v)
{
    double s = 0.0;
    for (const auto &z : v)
        s += std::norm(z);
    return std::sqrt(s);
}

inline double squared_norm(std::span<const cd> v)
{
    double s = 0.0;
    for (const auto &z : v)
        s += std::norm(z);
    return s;
}

// Hermitian inner product a^H b.
inline cd inner(std::span<const cd> a, std::span<const cd> b)
{
    if (a.size() != b.size())
        throw dimension_error("inner: length mismatch");
    cd s{};
    for (std::size_t i = 0; i < a.size(); ++i)
        s += std::conj(a[i]) * b[i];
    return s;
}

inline ComplexMatrix kron(const ComplexMatrix &a, const ComplexMatrix &b)
{
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t ia = 0; ia < a.rows(); ++ia)
        for (std::size_t ja = 0; ja < a.cols(); ++ja)
        {
            const cd s = a(ia, ja);
            for (std::size_t ib = 0; ib < b.rows(); ++ib)
                for (std::size_t jb = 0; jb < b.cols(); ++jb)
                    out(ia * b.rows() + ib, ja * b.cols() + jb) = s * b(ib, jb);
        }
    return out;
}

// Kronecker product of column vectors; entry a_i b_j sits at i*|b| + j.
inline CVector kron(std::span<const cd> a, std::span<const cd> b)
{
    CVector out(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            out[i * b.size() + j] = a[i] * b[j];
    return out;
}

inline ComplexMatrix hadamard(const ComplexMatrix &a, const ComplexMatrix &b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw dimension_error("hadamard: shape mismatch");
    ComplexMatrix out(a.rows(), a.cols());
    auto o = out.data();
    auto x = a.data();
    auto y = b.data();
    for (std::size_t i = 0; i < o.size(); ++i)
        o[i] = x[i] * y[i];
    return out;
}

inline CVector hadamard(std::span<const cd> a, std::span<const cd> b)
{
    if (a.size() != b.size())
        throw dimension_error("hadamard: length mismatch");
    CVector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = a[i] * b[i];
    return out;
}

/// Eigenvalues sorted descending; column j of `vectors` pairs with values[j].
struct EigenDecomposition
{
    RVector values;
    ComplexMatrix vectors;
};

struct JacobiOptions
{
    double relative_tolerance = 1e-12; // off-diagonal Frobenius norm vs ||A||_F
    int max_sweeps = 100;
    double hermitian_tolerance = 1e-8; // max |A - A^H| accepted on input
};

/// Hermitian eigendecomposition by cyclic Jacobi rotations.
///
/// The input is symmetrized as (A + A^H)/2 before factorization. Each
/// rotation first removes the phase of the pivot a_pq with a diagonal unitary,
/// then applies the classical real Jacobi rotation to the 2x2 block.
inline EigenDecomposition hermitian_eig(const ComplexMatrix &a, const JacobiOptions &opt = {})
{
    if (!a.is_square())
        throw dimension_error("hermitian_eig: matrix is not square");
    const std::size_t n = a.rows();

    double asym = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
            asym = std::max(asym, std::abs(a(i, j) - std::conj(a(j, i))));
    if (asym > opt.hermitian_tolerance)
    {
        std::ostringstream msg;
        msg << "hermitian_eig: input is not Hermitian (max |A - A^H| = " << asym << ")";
        throw domain_error(msg.str());
    }

    ComplexMatrix w(n, n);
    for (std::size_t i = 0; i < n; ++i)
    {
        w(i, i) = a(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j)
        {
            const cd h = 0.5 * (a(i, j) + std::conj(a(j, i)));
            w(i, j) = h;
            w(j, i) = std::conj(h);
        }
    }
    ComplexMatrix v = ComplexMatrix::identity(n);

    const double scale = frobenius_norm(w);
    const double threshold = opt.relative_tolerance * scale;

    auto off_norm = [&]() {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j)
                    s += std::norm(w(i, j));
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < opt.max_sweeps && scale > 0.0; ++sweep)
    {
        if (off_norm() <= threshold)
            break;
        for (std::size_t p = 0; p + 1 < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
            {
                const double mag = std::abs(w(p, q));
                if (mag == 0.0 || mag < 1e-300)
                    continue;
                const cd phase = w(p, q) / mag; // a_pq = mag * phase
                const double app = w(p, p).real();
                const double aqq = w(q, q).real();

                const double theta = (aqq - app) / (2.0 * mag);
                double t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                if (theta < 0.0)
                    t = -t;
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                // J = D * R with D = diag(1, conj(phase)) on (p, q) and
                // R = [[c, s], [-s, c]].
                const cd jpp = c;
                const cd jpq = s;
                const cd jqp = -s * std::conj(phase);
                const cd jqq = c * std::conj(phase);

                // W <- W J (columns p, q)
                for (std::size_t k = 0; k < n; ++k)
                {
                    const cd wkp = w(k, p);
                    const cd wkq = w(k, q);
                    w(k, p) = wkp * jpp + wkq * jqp;
                    w(k, q) = wkp * jpq + wkq * jqq;
                }
                // W <- J^H W (rows p, q)
                for (std::size_t k = 0; k < n; ++k)
                {
                    const cd wpk = w(p, k);
                    const cd wqk = w(q, k);
                    w(p, k) = std::conj(jpp) * wpk + std::conj(jqp) * wqk;
                    w(q, k) = std::conj(jpq) * wpk + std::conj(jqq) * wqk;
                }
                w(p, q) = 0.0;
                w(q, p) = 0.0;
                w(p, p) = w(p, p).real();
                w(q, q) = w(q, q).real();

                for (std::size_t k = 0; k < n; ++k)
                {
                    const cd vkp = v(k, p);
                    const cd vkq = v(k, q);
                    v(k, p) = vkp * jpp + vkq * jqp;
                    v(k, q) = vkp * jpq + vkq * jqq;
                }
            }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return w(i, i).real() > w(j, j).real(); });

    EigenDecomposition out{RVector(n), ComplexMatrix(n, n)};
    for (std::size_t j = 0; j < n; ++j)
    {
        out.values[j] = w(order[j], order[j]).real();
        for (std::size_t k = 0; k < n; ++k)
            out.vectors(k, j) = v(k, order[j]);
    }
    return out;
}

/// Solves min ||y - X beta|| through the normal equations (X^H X) beta = X^H y
/// with a Cholesky factorization. Rank deficiency is reported as a
/// singularity_error carrying the eigenvalue ratio of X^H X.
inline CVector least_squares(const ComplexMatrix &x, std::span<const cd> y, double min_ratio = 1e-12)
{
    if (x.rows() != y.size())
        throw dimension_error("least_squares: design rows and observation length differ");
    if (x.cols() == 0 || x.rows() < x.cols())
        throw dimension_error("least_squares: design matrix must be tall with at least one column");
    const std::size_t k = x.cols();

    ComplexMatrix gram(k, k);
    CVector rhs(k);
    for (std::size_t i = 0; i < k; ++i)
    {
        for (std::size_t j = i; j < k; ++j)
        {
            cd s{};
            for (std::size_t r = 0; r < x.rows(); ++r)
                s += std::conj(x(r, i)) * x(r, j);
            gram(i, j) = s;
            gram(j, i) = std::conj(s);
        }
        gram(i, i) = gram(i, i).real();
        cd s{};
        for (std::size_t r = 0; r < x.rows(); ++r)
            s += std::conj(x(r, i)) * y[r];
        rhs[i] = s;
    }

    const auto eig = hermitian_eig(gram);
    const double largest = eig.values.front();
    const double smallest = eig.values.back();
    const double ratio = largest > 0.0 ? smallest / largest : 0.0;
    if (!(largest > 0.0) || ratio <= min_ratio)
    {
        std::ostringstream msg;
        msg << "least_squares: X^H X is singular (smallest/largest eigenvalue = " << ratio << ")";
        throw singularity_error(msg.str(), ratio);
    }

    double trace = 0.0;
    for (std::size_t i = 0; i < k; ++i)
        trace += gram(i, i).real();

    auto cholesky = [k](ComplexMatrix g, ComplexMatrix &l) {
        l = ComplexMatrix(k, k);
        for (std::size_t j = 0; j < k; ++j)
        {
            double d = g(j, j).real();
            for (std::size_t m = 0; m < j; ++m)
                d -= std::norm(l(j, m));
            if (!(d > 0.0))
                return false;
            l(j, j) = std::sqrt(d);
            for (std::size_t i = j + 1; i < k; ++i)
            {
                cd s = g(i, j);
                for (std::size_t m = 0; m < j; ++m)
                    s -= l(i, m) * std::conj(l(j, m));
                l(i, j) = s / l(j, j).real();
            }
        }
        return true;
    };

    ComplexMatrix l;
    if (!cholesky(gram, l))
    {
        ComplexMatrix jittered = gram;
        for (std::size_t i = 0; i < k; ++i)
            jittered(i, i) += 1e-14 * trace / static_cast<double>(k);
        if (!cholesky(jittered, l))
            throw singularity_error("least_squares: Cholesky failed after jitter", ratio);
    }

    // L z = rhs, then L^H beta = z.
    CVector z(k);
    for (std::size_t i = 0; i < k; ++i)
    {
        cd s = rhs[i];
        for (std::size_t m = 0; m < i; ++m)
            s -= l(i, m) * z[m];
        z[i] = s / l(i, i).real();
    }
    CVector beta(k);
    for (std::size_t ii = k; ii-- > 0;)
    {
        cd s = z[ii];
        for (std::size_t m = ii + 1; m < k; ++m)
            s -= std::conj(l(m, ii)) * beta[m];
        beta[ii] = s / l(ii, ii).real();
    }
    return beta;
}

} // namespace ratrain
