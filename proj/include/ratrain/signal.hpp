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
/// Pilot sequences, received snapshots Y = H S + N and the sample covariance.

#pragma once

#include "ratrain/channel.hpp"
#include "ratrain/numerics.hpp"
#include "ratrain/random.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace ratrain
{

enum class PilotKind
{
    random_phase, // sqrt(p_k) e^{j chi}, chi ~ U[0, 2 pi)
    orthogonal,   // rows of the T-point DFT matrix scaled by sqrt(p_k)
};

/// K x T pilot matrix; every entry of row k has modulus sqrt(powers[k]).
struct PilotMatrix
{
    ComplexMatrix symbols;
    RVector powers;

    std::size_t users() const { return symbols.rows(); }
    std::size_t slots() const { return symbols.cols(); }
};

inline PilotMatrix make_pilots(std::size_t k, std::size_t t, std::span<const double> powers, std::uint64_t seed,
                               PilotKind kind = PilotKind::random_phase)
{
    if (k < 1)
        throw config_error("make_pilots: need at least one user");
    if (t < k)
        throw config_error("make_pilots: pilot length T must be at least the number of users K");
    if (powers.size() != k)
        throw dimension_error("make_pilots: one power per user required");
    for (double p : powers)
        if (!(p > 0.0))
            throw config_error("make_pilots: powers must be positive");

    PilotMatrix out{ComplexMatrix(k, t), RVector(powers.begin(), powers.end())};
    Rng rng(seed);
    for (std::size_t row = 0; row < k; ++row)
    {
        const double amp = std::sqrt(powers[row]);
        for (std::size_t col = 0; col < t; ++col)
        {
            const double phase = kind == PilotKind::random_phase
                                     ? 2.0 * pi * rng.uniform()
                                     : 2.0 * pi * static_cast<double>(row * col % t) / static_cast<double>(t);
            out.symbols(row, col) = std::polar(amp, phase);
        }
    }
    return out;
}

/// One estimation sub-block: N x T snapshots and everything that produced them.
struct SnapshotBlock
{
    ComplexMatrix y;
    PilotMatrix pilots;
    double noise_power = 0.0;
    OrientationMatrix orientation;
    std::uint64_t seed = 0;
};

/// Y = [h_1 ... h_K] S + N with N i.i.d. CN(0, noise_power).
inline SnapshotBlock receive(std::span<const CVector> channels, const PilotMatrix &pilots, double noise_power,
                             std::uint64_t seed, OrientationMatrix orientation = {})
{
    if (channels.size() != pilots.users())
        throw dimension_error("receive: channel count differs from pilot rows");
    if (channels.empty())
        throw dimension_error("receive: no channels");
    if (!(noise_power >= 0.0))
        throw domain_error("receive: noise power must be non-negative");
    const std::size_t n = channels.front().size();
    for (const auto &h : channels)
        if (h.size() != n)
            throw dimension_error("receive: channel vectors differ in length");

    const std::size_t t = pilots.slots();
    ComplexMatrix y(n, t);
    for (std::size_t k = 0; k < channels.size(); ++k)
        for (std::size_t row = 0; row < n; ++row)
        {
            const cd h = channels[k][row];
            for (std::size_t col = 0; col < t; ++col)
                y(row, col) += h * pilots.symbols(k, col);
        }
    if (noise_power > 0.0)
    {
        Rng rng(seed);
        for (std::size_t row = 0; row < n; ++row)
            for (std::size_t col = 0; col < t; ++col)
                y(row, col) += rng.complex_normal(noise_power);
    }
    return {std::move(y), pilots, noise_power, std::move(orientation), seed};
}

/// R = (1/T) sum_t y(t) y(t)^H.
inline ComplexMatrix sample_covariance(const ComplexMatrix &y)
{
    const std::size_t n = y.rows();
    const std::size_t t = y.cols();
    if (t < 1)
        throw dimension_error("sample_covariance: need at least one snapshot");
    ComplexMatrix r(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j)
        {
            cd s{};
            for (std::size_t c = 0; c < t; ++c)
                s += y(i, c) * std::conj(y(j, c));
            s /= static_cast<double>(t);
            r(i, j) = s;
            r(j, i) = std::conj(s);
        }
    for (std::size_t i = 0; i < n; ++i)
        r(i, i) = r(i, i).real();
    return r;
}

inline ComplexMatrix sample_covariance(const SnapshotBlock &block) { return sample_covariance(block.y); }

/// Vectorizes Y column by column: entry t*N + n holds y_n(t).
inline CVector stack_snapshots(const ComplexMatrix &y)
{
    CVector out(y.rows() * y.cols());
    for (std::size_t col = 0; col < y.cols(); ++col)
        for (std::size_t row = 0; row < y.rows(); ++row)
            out[col * y.rows() + row] = y(row, col);
    return out;
}

} // namespace ratrain
