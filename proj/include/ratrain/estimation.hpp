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
/// Channel estimation for an array of rotatable antennas.
///
/// Angles of arrival come from a MUSIC pseudo-spectrum whose candidate
/// manifold b(t, f; Theta) = g(Theta) (.) a(t, f) includes the directional
/// gains of the current antenna orientations, evaluated toward the scanned
/// direction. Path gains follow from least squares on the stacked snapshots
/// with the manifold rebuilt at the estimated angles.

#pragma once

#include "ratrain/channel.hpp"
#include "ratrain/numerics.hpp"
#include "ratrain/signal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace ratrain
{

struct SubspaceSplit
{
    ComplexMatrix signal_basis; // N x K
    ComplexMatrix noise_basis;  // N x (N - K)
    RVector eigenvalues;        // descending
};

inline SubspaceSplit subspace_split(const ComplexMatrix &r, std::size_t k)
{
    if (!r.is_square())
        throw dimension_error("subspace_split: covariance is not square");
    if (k < 1 || k >= r.rows())
        throw config_error("subspace_split: need 1 <= K < N");
    auto eig = hermitian_eig(r);
    return {eig.vectors.cols_range(0, k), eig.vectors.cols_range(k, r.rows() - k), std::move(eig.values)};
}

struct Angle
{
    double elevation = 0.0; // radians
    double azimuth = 0.0;   // radians
};

/// Scan grid, in degrees. In 1D mode the azimuth is pinned to `azimuth_min`.
struct GridSpec
{
    double elevation_min = -90.0;
    double elevation_max = 90.0;
    double elevation_step = 0.1;
    double azimuth_min = 0.0;
    double azimuth_max = 180.0;
    double azimuth_step = 1.0;
    bool two_d = false;

    void validate() const
    {
        if (!(elevation_step > 0.0) || !(elevation_max >= elevation_min))
            throw config_error("GridSpec: elevation axis needs step > 0 and max >= min");
        if (two_d && (!(azimuth_step > 0.0) || !(azimuth_max >= azimuth_min)))
            throw config_error("GridSpec: azimuth axis needs step > 0 and max >= min");
    }

    static RVector axis(double lo, double hi, double step)
    {
        const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9)) + 1;
        RVector out(count);
        for (std::size_t i = 0; i < count; ++i)
            out[i] = deg2rad(lo + static_cast<double>(i) * step);
        return out;
    }

    RVector elevations() const { return axis(elevation_min, elevation_max, elevation_step); }
    RVector azimuths() const
    {
        return two_d ? axis(azimuth_min, azimuth_max, azimuth_step) : RVector{deg2rad(azimuth_min)};
    }
};

enum class SpectrumForm
{
    // 1 / (b^H E_n E_n^H b / b^H b): candidate vectors normalized to unit length.
    normalized,
    // 1 / (b^H E_n E_n^H b) with the raw gain-weighted candidate.
    gain_weighted,
};

struct SpectrumOptions
{
    SpectrumForm form = SpectrumForm::normalized;
    DirectionConvention convention = DirectionConvention::standard_spherical;
    double denominator_floor = 1e-12;
    // Directions whose mean antenna gain lies this far below g0 are treated
    // as invisible: reported as null points with value 0.
    double min_visible_gain_db = -30.0;
};

/// Pseudo-spectrum over an elevation x azimuth grid (row-major, azimuth fastest).
struct SpectrumGrid
{
    RVector elevations;
    RVector azimuths;
    RVector values;
    std::vector<std::uint8_t> null_point; // candidate vector (nearly) vanished; value reported as 0
    std::vector<std::uint8_t> saturated;  // denominator hit the floor
    bool has_null = false;

    std::size_t size() const { return values.size(); }
    std::size_t index(std::size_t ie, std::size_t ia) const { return ie * azimuths.size() + ia; }
    double at(std::size_t ie, std::size_t ia) const { return values[index(ie, ia)]; }
};

inline SpectrumGrid music_spectrum(const SubspaceSplit &split, const OrientationMatrix &orientation,
                                   const GainPattern &pattern, const ArrayConfig &cfg, const GridSpec &grid,
                                   const SpectrumOptions &opt = {})
{
    const std::size_t n = cfg.size();
    if (split.noise_basis.rows() != n || orientation.size() != n)
        throw dimension_error("music_spectrum: array size, orientation and subspace disagree");
    if (split.noise_basis.cols() == 0)
        throw config_error("music_spectrum: empty noise subspace");
    grid.validate();

    SpectrumGrid out;
    out.elevations = grid.elevations();
    out.azimuths = grid.azimuths();
    const std::size_t total = out.elevations.size() * out.azimuths.size();
    out.values.assign(total, 0.0);
    out.null_point.assign(total, 0);
    out.saturated.assign(total, 0);

    const ComplexMatrix en_h = split.noise_basis.adjoint();
    const auto bore = boresights(orientation);
    const double null_level = std::max(1e-24, std::pow(10.0, opt.min_visible_gain_db / 10.0)) * pattern.g0 *
                              static_cast<double>(n);

    for (std::size_t ie = 0; ie < out.elevations.size(); ++ie)
        for (std::size_t ia = 0; ia < out.azimuths.size(); ++ia)
        {
            const double el = out.elevations[ie];
            const double az = out.azimuths[ia];
            const auto g = radiation_vector(bore, direction_vector(el, az, opt.convention), pattern);
            auto b = array_response(el, az, cfg);
            for (std::size_t m = 0; m < n; ++m)
                b[m] *= g[m];

            const std::size_t idx = out.index(ie, ia);
            const double bb = squared_norm(b);
            if (!(bb > null_level))
            {
                out.null_point[idx] = 1;
                out.has_null = true;
                continue;
            }
            double den = squared_norm(en_h * std::span<const cd>(b));
            if (opt.form == SpectrumForm::normalized)
                den /= bb;
            if (den < opt.denominator_floor)
            {
                den = opt.denominator_floor;
                out.saturated[idx] = 1;
            }
            out.values[idx] = 1.0 / den;
        }
    return out;
}

struct PeakOptions
{
    // A local maximum counts as a resolved source when it stands this far
    // above the median of the spectrum.
    double min_peak_to_median_db = 3.0;
};

struct AoaEstimate
{
    std::vector<Angle> aoas; // ascending elevation
    bool degraded = false;   // fewer than K resolved peaks were found
};

namespace detail
{

inline double median(RVector v)
{
    if (v.empty())
        return 0.0;
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

// Vertex offset of the parabola through (-1, l), (0, c), (1, r), in steps.
inline double parabolic_offset(double l, double c, double r)
{
    const double curvature = l - 2.0 * c + r;
    if (!(curvature < 0.0))
        return 0.0;
    return std::clamp(0.5 * (l - r) / curvature, -0.5, 0.5);
}

inline double refine_axis(const RVector &axis, std::size_t i, double offset)
{
    if (axis.size() < 2)
        return axis[i];
    const double step = axis[1] - axis[0];
    return axis[i] + offset * step;
}

} // namespace detail

/// Top-K peak search with one three-point parabolic refinement per axis.
inline AoaEstimate estimate_aoas(const SpectrumGrid &spectrum, std::size_t k, const PeakOptions &opt = {})
{
    if (k < 1)
        throw config_error("estimate_aoas: K must be at least 1");
    const std::size_t ne = spectrum.elevations.size();
    const std::size_t na = spectrum.azimuths.size();
    if (spectrum.size() != ne * na || spectrum.size() == 0)
        throw dimension_error("estimate_aoas: malformed spectrum");

    auto value = [&](std::ptrdiff_t ie, std::ptrdiff_t ia) { return spectrum.at(static_cast<std::size_t>(ie), static_cast<std::size_t>(ia)); };

    std::vector<std::size_t> peaks;
    for (std::size_t ie = 1; ie + 1 < ne; ++ie)
        for (std::size_t ia = 0; ia < na; ++ia)
        {
            const std::size_t idx = spectrum.index(ie, ia);
            if (spectrum.null_point[idx])
                continue;
            const double c = spectrum.values[idx];
            bool is_peak = true;
            for (int de = -1; de <= 1 && is_peak; ++de)
                for (int da = -1; da <= 1; ++da)
                {
                    if (de == 0 && da == 0)
                        continue;
                    const auto je = static_cast<std::ptrdiff_t>(ie) + de;
                    const auto ja = static_cast<std::ptrdiff_t>(ia) + da;
                    if (ja < 0 || ja >= static_cast<std::ptrdiff_t>(na))
                        continue;
                    // bordering an invisible region is treated like a grid edge
                    if (spectrum.null_point[spectrum.index(static_cast<std::size_t>(je), static_cast<std::size_t>(ja))] ||
                        !(c > value(je, ja)))
                    {
                        is_peak = false;
                        break;
                    }
                }
            if (is_peak)
                peaks.push_back(idx);
        }

    RVector visible;
    for (std::size_t idx = 0; idx < spectrum.size(); ++idx)
        if (!spectrum.null_point[idx])
            visible.push_back(spectrum.values[idx]);
    const double floor_value = detail::median(std::move(visible)) * std::pow(10.0, opt.min_peak_to_median_db / 10.0);
    auto by_value = [&](std::size_t a, std::size_t b) {
        return spectrum.values[a] > spectrum.values[b] || (spectrum.values[a] == spectrum.values[b] && a < b);
    };
    std::sort(peaks.begin(), peaks.end(), by_value);

    std::vector<std::size_t> chosen;
    std::vector<std::uint8_t> taken(spectrum.size(), 0);
    std::vector<std::uint8_t> refine(spectrum.size(), 0);
    for (auto idx : peaks)
        if (chosen.size() < k && spectrum.values[idx] >= floor_value)
        {
            chosen.push_back(idx);
            taken[idx] = refine[idx] = 1;
        }

    AoaEstimate out;
    out.degraded = chosen.size() < k;
    for (auto idx : peaks)
        if (chosen.size() < k && !taken[idx])
        {
            chosen.push_back(idx);
            taken[idx] = refine[idx] = 1;
        }
    if (chosen.size() < k)
    {
        std::vector<std::size_t> rest;
        for (std::size_t idx = 0; idx < spectrum.size(); ++idx)
            if (!taken[idx] && !spectrum.null_point[idx])
                rest.push_back(idx);
        std::sort(rest.begin(), rest.end(), by_value);
        for (auto idx : rest)
        {
            if (chosen.size() >= k)
                break;
            chosen.push_back(idx);
        }
        if (chosen.size() < k)
            throw domain_error("estimate_aoas: spectrum has fewer usable points than sources");
    }

    for (auto idx : chosen)
    {
        const std::size_t ie = idx / na;
        const std::size_t ia = idx % na;
        Angle a{spectrum.elevations[ie], spectrum.azimuths[ia]};
        if (refine[idx] && !spectrum.saturated[idx])
        {
            const double c = spectrum.values[idx];
            const auto e = static_cast<std::ptrdiff_t>(ie);
            const auto z = static_cast<std::ptrdiff_t>(ia);
            a.elevation = detail::refine_axis(
                spectrum.elevations, ie, detail::parabolic_offset(value(e - 1, z), c, value(e + 1, z)));
            if (ia > 0 && ia + 1 < na)
                a.azimuth = detail::refine_axis(
                    spectrum.azimuths, ia, detail::parabolic_offset(value(e, z - 1), c, value(e, z + 1)));
        }
        out.aoas.push_back(a);
    }
    std::sort(out.aoas.begin(), out.aoas.end(), [](const Angle &a, const Angle &b) {
        return a.elevation < b.elevation || (a.elevation == b.elevation && a.azimuth < b.azimuth);
    });
    return out;
}

/// Candidate manifold B = G(Theta) (.) A(angles); column k pairs with angles[k].
inline ComplexMatrix effective_manifold(std::span<const Angle> angles, const OrientationMatrix &orientation,
                                        const GainPattern &pattern, const ArrayConfig &cfg,
                                        DirectionConvention convention = DirectionConvention::standard_spherical)
{
    const std::size_t n = cfg.size();
    if (orientation.size() != n)
        throw dimension_error("effective_manifold: orientation length differs from array size");
    const auto bore = boresights(orientation);
    ComplexMatrix b(n, angles.size());
    for (std::size_t k = 0; k < angles.size(); ++k)
    {
        const auto g = radiation_vector(bore, direction_vector(angles[k].elevation, angles[k].azimuth, convention),
                                        pattern);
        const auto a = array_response(angles[k].elevation, angles[k].azimuth, cfg);
        for (std::size_t m = 0; m < n; ++m)
            b(m, k) = g[m] * a[m];
    }
    return b;
}

/// Stacked design matrix X with rows t*N + n equal to B[n, :] diag(s(t)).
inline ComplexMatrix build_design_matrix(std::span<const Angle> angles, const OrientationMatrix &orientation,
                                         const GainPattern &pattern, const ArrayConfig &cfg, const PilotMatrix &pilots,
                                         DirectionConvention convention = DirectionConvention::standard_spherical)
{
    if (pilots.users() != angles.size())
        throw dimension_error("build_design_matrix: pilot rows differ from the number of angles");
    if (pilots.slots() < angles.size())
        throw config_error("build_design_matrix: need T >= K");
    const auto b = effective_manifold(angles, orientation, pattern, cfg, convention);
    const std::size_t n = b.rows();
    const std::size_t k = b.cols();
    const std::size_t t = pilots.slots();
    ComplexMatrix x(n * t, k);
    for (std::size_t slot = 0; slot < t; ++slot)
        for (std::size_t row = 0; row < n; ++row)
            for (std::size_t col = 0; col < k; ++col)
                x(slot * n + row, col) = b(row, col) * pilots.symbols(col, slot);
    return x;
}

inline CVector estimate_path_gains(const ComplexMatrix &x, std::span<const cd> y_stacked)
{
    return least_squares(x, y_stacked);
}

/// Estimated angles, path gains and environment-only CSI eta_k = beta_k a(angle_k).
struct ChannelEstimate
{
    std::vector<Angle> aoas;
    CVector gains;
    std::vector<CVector> eta;
};

inline ChannelEstimate assemble_estimate(std::span<const Angle> aoas, std::span<const cd> gains,
                                         const ArrayConfig &cfg)
{
    if (aoas.size() != gains.size())
        throw dimension_error("assemble_estimate: angle and gain counts differ");
    std::vector<std::size_t> order(aoas.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return aoas[a].elevation < aoas[b].elevation ||
               (aoas[a].elevation == aoas[b].elevation && aoas[a].azimuth < aoas[b].azimuth);
    });
    ChannelEstimate out;
    for (auto i : order)
    {
        out.aoas.push_back(aoas[i]);
        out.gains.push_back(gains[i]);
        auto eta = array_response(aoas[i].elevation, aoas[i].azimuth, cfg);
        for (auto &z : eta)
            z *= gains[i];
        out.eta.push_back(std::move(eta));
    }
    return out;
}

} // namespace ratrain
