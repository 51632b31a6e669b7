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

#include "ratrain/numerics.hpp"
#include "ratrain/random.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace ratrain
{
namespace
{

ComplexMatrix random_matrix(std::size_t r, std::size_t c, Rng &rng)
{
    ComplexMatrix m(r, c);
    for (auto &z : m.data())
        z = rng.complex_normal(1.0);
    return m;
}

ComplexMatrix random_hermitian(std::size_t n, Rng &rng)
{
    const auto a = random_matrix(n, n, rng);
    return (a + a.adjoint()) * cd{0.5};
}

ComplexMatrix reconstruct(const EigenDecomposition &e)
{
    CVector lambda(e.values.begin(), e.values.end());
    return e.vectors * ComplexMatrix::diagonal(lambda) * e.vectors.adjoint();
}

double unitarity_error(const ComplexMatrix &v)
{
    return max_abs(v.adjoint() * v - ComplexMatrix::identity(v.cols()));
}

TEST(HermitianEig, IdentityHasUnitEigenvalues)
{
    const auto e = hermitian_eig(ComplexMatrix::identity(3));
    for (double l : e.values)
        EXPECT_DOUBLE_EQ(l, 1.0);
    EXPECT_LT(unitarity_error(e.vectors), 1e-12);
}

TEST(HermitianEig, DiagonalSortedDescending)
{
    const CVector d{1.0, 3.0, 2.0};
    const auto e = hermitian_eig(ComplexMatrix::diagonal(d));
    ASSERT_EQ(e.values.size(), 3u);
    EXPECT_DOUBLE_EQ(e.values[0], 3.0);
    EXPECT_DOUBLE_EQ(e.values[1], 2.0);
    EXPECT_DOUBLE_EQ(e.values[2], 1.0);
    // Eigenvectors are permuted identity columns.
    EXPECT_NEAR(std::abs(e.vectors(1, 0)), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(e.vectors(2, 1)), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(e.vectors(0, 2)), 1.0, 1e-14);
}

TEST(HermitianEig, TwoByTwoComplexClosedForm)
{
    // [[2, 1+i], [1-i, 3]]: eigenvalues (5 +- sqrt(1 + 8)) / 2 = 4, 1.
    ComplexMatrix a(2, 2, {cd{2, 0}, cd{1, 1}, cd{1, -1}, cd{3, 0}});
    const auto e = hermitian_eig(a);
    EXPECT_NEAR(e.values[0], 4.0, 1e-13);
    EXPECT_NEAR(e.values[1], 1.0, 1e-13);
}

TEST(HermitianEig, RandomReconstructionAndUnitarity)
{
    for (std::size_t n : {2u, 5u, 8u, 16u, 33u, 64u})
        for (std::uint64_t seed = 0; seed < 4; ++seed)
        {
            Rng rng(derive_seed(seed, {n}));
            const auto a = random_hermitian(n, rng);
            const auto e = hermitian_eig(a);
            EXPECT_LT(frobenius_norm(a - reconstruct(e)) / frobenius_norm(a), 1e-10) << "n=" << n;
            EXPECT_LT(unitarity_error(e.vectors), 1e-9) << "n=" << n;
            for (std::size_t i = 1; i < n; ++i)
                EXPECT_GE(e.values[i - 1], e.values[i]);
        }
}

TEST(HermitianEig, PsdInputHasNonNegativeEigenvalues)
{
    Rng rng(11);
    const auto b = random_matrix(12, 4, rng); // rank 4 Gram matrix
    const auto e = hermitian_eig(b * b.adjoint());
    for (double l : e.values)
        EXPECT_GE(l, -1e-9);
    EXPECT_LT(e.values[4], 1e-9 * e.values[0]);
}

TEST(HermitianEig, SymmetrizesSmallAsymmetry)
{
    Rng rng(3);
    auto a = random_hermitian(6, rng);
    a(0, 1) += cd{5e-9, 0.0};
    EXPECT_NO_THROW(hermitian_eig(a));
}

TEST(HermitianEig, Errors)
{
    EXPECT_THROW(hermitian_eig(ComplexMatrix(2, 3)), dimension_error);
    ComplexMatrix a = ComplexMatrix::identity(3);
    a(0, 2) = cd{0.0, 1.0};
    EXPECT_THROW(hermitian_eig(a), domain_error);
}

TEST(LeastSquares, IdentityDesignReturnsObservation)
{
    const CVector y{cd{1, 2}, cd{-3, 0.5}, cd{0, -1}};
    const auto beta = least_squares(ComplexMatrix::identity(3), y);
    for (std::size_t i = 0; i < 3; ++i)
        EXPECT_LT(std::abs(beta[i] - y[i]), 1e-14);
}

TEST(LeastSquares, OrthonormalColumnsGiveProjection)
{
    Rng rng(5);
    const auto e = hermitian_eig(random_hermitian(6, rng));
    const auto q = e.vectors.cols_range(0, 3);
    CVector y(6);
    for (auto &z : y)
        z = rng.complex_normal(1.0);
    const auto beta = least_squares(q, y);
    const auto expected = q.adjoint() * std::span<const cd>(y);
    for (std::size_t i = 0; i < 3; ++i)
        EXPECT_LT(std::abs(beta[i] - expected[i]), 1e-12);
}

TEST(LeastSquares, ConsistentSystemRecoversCoefficients)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        Rng rng(seed);
        const auto x = random_matrix(40, 5, rng);
        CVector beta0(5);
        for (auto &z : beta0)
            z = rng.complex_normal(1.0);
        const auto y = x * std::span<const cd>(beta0);
        const auto beta = least_squares(x, y);
        CVector diff(5);
        for (std::size_t i = 0; i < 5; ++i)
            diff[i] = beta[i] - beta0[i];
        EXPECT_LE(norm2(diff), 1e-10 * norm2(beta0));
    }
}

TEST(LeastSquares, ResidualOrthogonalToColumnSpace)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        Rng rng(100 + seed);
        const auto x = random_matrix(30, 4, rng);
        CVector y(30);
        for (auto &z : y)
            z = rng.complex_normal(1.0);
        const auto beta = least_squares(x, y);
        const auto fit = x * std::span<const cd>(beta);
        CVector resid(30);
        for (std::size_t i = 0; i < 30; ++i)
            resid[i] = y[i] - fit[i];
        const auto xh = x.adjoint();
        EXPECT_LE(norm2(xh * std::span<const cd>(resid)), 1e-8 * norm2(xh * std::span<const cd>(y)));
    }
}

TEST(LeastSquares, RankDeficientReportsRatio)
{
    ComplexMatrix x(4, 2);
    for (std::size_t r = 0; r < 4; ++r)
    {
        x(r, 0) = cd(static_cast<double>(r + 1), 1.0);
        x(r, 1) = 2.0 * x(r, 0);
    }
    const CVector y(4, cd{1.0});
    try
    {
        least_squares(x, y);
        FAIL() << "expected singularity_error";
    }
    catch (const singularity_error &e)
    {
        EXPECT_LE(e.conditioning_ratio, 1e-12);
        EXPECT_NE(std::string(e.what()).find("smallest/largest"), std::string::npos);
    }
}

TEST(LeastSquares, ShapeErrors)
{
    EXPECT_THROW(least_squares(ComplexMatrix(3, 2), CVector(4)), dimension_error);
    EXPECT_THROW(least_squares(ComplexMatrix(2, 3), CVector(2)), dimension_error);
}

TEST(Products, KronOfScalarIsIdentityMap)
{
    const CVector one{cd{1.0}};
    const CVector v{cd{1, 2}, cd{3, -1}};
    EXPECT_EQ(kron(one, v), v);
}

TEST(Products, HadamardWithOnes)
{
    Rng rng(9);
    const auto a = random_matrix(3, 4, rng);
    const auto out = hadamard(a, ComplexMatrix(3, 4, cd{1.0}));
    EXPECT_EQ(max_abs(out - a), 0.0);
}

TEST(Products, KronVectorsLexicographicOrder)
{
    const CVector a{cd{2.0}, cd{0, 1}};
    const CVector b{cd{1.0}, cd{-1.0}, cd{3, 3}};
    const auto k = kron(a, b);
    ASSERT_EQ(k.size(), 6u);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            EXPECT_EQ(k[idx++], a[i] * b[j]);
}

TEST(Products, AgreeWithNaiveLoopsOnAllSmallShapes)
{
    Rng rng(21);
    for (std::size_t ra = 1; ra <= 6; ++ra)
        for (std::size_t ca = 1; ca <= 6; ca += 2)
            for (std::size_t rb = 1; rb <= 6; rb += 3)
                for (std::size_t cb = 1; cb <= 6; cb += 2)
                {
                    const auto a = random_matrix(ra, ca, rng);
                    const auto b = random_matrix(rb, cb, rng);
                    const auto k = kron(a, b);
                    ASSERT_EQ(k.rows(), ra * rb);
                    ASSERT_EQ(k.cols(), ca * cb);
                    for (std::size_t i = 0; i < ra; ++i)
                        for (std::size_t j = 0; j < ca; ++j)
                            for (std::size_t p = 0; p < rb; ++p)
                                for (std::size_t q = 0; q < cb; ++q)
                                    ASSERT_EQ(k(i * rb + p, j * cb + q), a(i, j) * b(p, q));

                    const auto a2 = random_matrix(ra, ca, rng);
                    const auto h = hadamard(a, a2);
                    for (std::size_t i = 0; i < ra; ++i)
                        for (std::size_t j = 0; j < ca; ++j)
                            ASSERT_EQ(h(i, j), a(i, j) * a2(i, j));
                }
}

TEST(Products, HadamardShapeMismatch)
{
    EXPECT_THROW(hadamard(ComplexMatrix(2, 2), ComplexMatrix(2, 3)), dimension_error);
    EXPECT_THROW(ComplexMatrix(2, 2) * ComplexMatrix(3, 2), dimension_error);
}

} // namespace
} // namespace ratrain
