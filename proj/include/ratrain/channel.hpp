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
/// Line-of-sight channel of a planar array of rotatable directional antennas:
/// pointing vectors, user directions, steering vectors, the cosine gain
/// pattern and per-user channel synthesis.

#pragma once

#include "ratrain/numerics.hpp"

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace ratrain
{

inline constexpr double pi = std::numbers::pi;

inline constexpr double deg2rad(double deg) { return deg * pi / 180.0; }
inline constexpr double rad2deg(double rad) { return rad * 180.0 / pi; }

struct Vec3
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(const Vec3 &a, const Vec3 &b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(const Vec3 &a, const Vec3 &b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, const Vec3 &v) { return {s * v.x, s * v.y, s * v.z}; }
    Vec3 &operator+=(const Vec3 &o)
    {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
};

inline double dot(const Vec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3 &v) { return std::sqrt(dot(v, v)); }

inline constexpr Vec3 boresight_axis{0.0, 0.0, 1.0};

// Unit 3-vector giving an antenna boresight.
using PointingVector = Vec3;

/// Zenith and azimuth deflection of one antenna boresight from +z.
/// Azimuth is wrapped into [0, 2pi); zenith must lie in [0, pi].
struct DeflectionAngles
{
    double zenith = 0.0;
    double azimuth = 0.0;

    static DeflectionAngles make(double zenith, double azimuth)
    {
        if (!(zenith >= 0.0 && zenith <= pi))
            throw domain_error("DeflectionAngles: zenith outside [0, pi]");
        double a = std::fmod(azimuth, 2.0 * pi);
        if (a < 0.0)
            a += 2.0 * pi;
        if (a >= 2.0 * pi)
            a = 0.0;
        return {zenith, a};
    }

    bool feasible(double theta_max, double tol = 1e-12) const { return zenith >= -tol && zenith <= theta_max + tol; }
};

using OrientationMatrix = std::vector<DeflectionAngles>;

inline OrientationMatrix reference_orientation(std::size_t n) { return OrientationMatrix(n); }

inline PointingVector pointing_vector(const DeflectionAngles &a)
{
    const double sz = std::sin(a.zenith);
    return {sz * std::cos(a.azimuth), sz * std::sin(a.azimuth), std::cos(a.zenith)};
}

// Inverse of pointing_vector for a unit vector.
inline DeflectionAngles deflection_angles(const PointingVector &f)
{
    const double z = std::clamp(f.z, -1.0, 1.0);
    const double az = (f.x == 0.0 && f.y == 0.0) ? 0.0 : std::atan2(f.y, f.x);
    return DeflectionAngles::make(std::acos(z), az);
}

/// Cosine pattern G(eps) = g0 cos^{2p}(eps) on the front hemisphere, zero behind.
struct GainPattern
{
    double p = 4.0;
    double g0 = 18.0;

    // g0 = 2(2p + 1) normalizes the pattern to unit average gain over the sphere.
    static GainPattern cosine(double p) { return {p, 2.0 * (2.0 * p + 1.0)}; }
    static GainPattern isotropic() { return {0.0, 1.0}; }

    void validate() const
    {
        if (!(p >= 0.0) || !(g0 > 0.0))
            throw config_error("GainPattern: need p >= 0 and g0 > 0");
    }
};

inline double directional_gain(const GainPattern &pattern, double cos_eps)
{
    if (!(cos_eps > 0.0))
        return 0.0;
    return pattern.g0 * std::pow(std::min(cos_eps, 1.0), 2.0 * pattern.p);
}

enum class DirectionConvention
{
    standard_spherical, // [sin t cos f, sin t sin f, cos t]; elevation measured from +z
    elevation_from_y,     // [sin t sin f, cos t, sin t cos f]
};

struct UserGeometry
{
    double distance = 100.0; // meters
    double elevation = 0.0;  // radians, [-pi/2, pi/2]
    double azimuth = 0.0;    // radians, [0, pi]

    void validate() const
    {
        if (!(distance > 0.0))
            throw config_error("UserGeometry: distance must be positive");
        if (!(elevation >= -pi / 2 - 1e-12 && elevation <= pi / 2 + 1e-12))
            throw config_error("UserGeometry: elevation outside [-90, 90] degrees");
        if (!(azimuth >= -1e-12 && azimuth <= pi + 1e-12))
            throw config_error("UserGeometry: azimuth outside [0, 180] degrees");
    }
};

inline Vec3 direction_vector(double elevation, double azimuth, DirectionConvention convention)
{
    const double st = std::sin(elevation);
    const double ct = std::cos(elevation);
    if (convention == DirectionConvention::elevation_from_y)
        return {st * std::sin(azimuth), ct, st * std::cos(azimuth)};
    return {st * std::cos(azimuth), st * std::sin(azimuth), ct};
}

inline Vec3 user_direction(const UserGeometry &u, DirectionConvention convention)
{
    return direction_vector(u.elevation, u.azimuth, convention);
}

struct ArrayConfig
{
    std::size_t n_x = 1;
    std::size_t n_y = 16;
    double spacing = 0.0625;    // meters
    double wavelength = 0.125;  // meters

    static ArrayConfig half_wavelength(std::size_t n_x, std::size_t n_y, double wavelength)
    {
        return {n_x, n_y, wavelength / 2.0, wavelength};
    }

    std::size_t size() const { return n_x * n_y; }

    void validate() const
    {
        if (n_x < 1 || n_y < 1)
            throw config_error("ArrayConfig: n_x and n_y must be at least 1");
        if (!(spacing > 0.0) || !(wavelength > 0.0))
            throw config_error("ArrayConfig: spacing and wavelength must be positive");
    }
};

/// ULA response [1, e^{j k psi}, ..., e^{j k (n-1) psi}] with k = 2 pi d / lambda.
inline CVector steering_1d(double psi, std::size_t n, const ArrayConfig &cfg)
{
    CVector out(n);
    const double k = 2.0 * pi * cfg.spacing / cfg.wavelength;
    for (std::size_t m = 0; m < n; ++m)
        out[m] = std::polar(1.0, k * static_cast<double>(m) * psi);
    return out;
}

/// UPA response e(cos f cos t, n_x) (x) e(cos f sin t, n_y).
inline CVector array_response(double elevation, double azimuth, const ArrayConfig &cfg)
{
    const double cf = std::cos(azimuth);
    const auto ex = steering_1d(cf * std::cos(elevation), cfg.n_x, cfg);
    const auto ey = steering_1d(cf * std::sin(elevation), cfg.n_y, cfg);
    return kron(ex, ey);
}

/// Per-antenna amplitude sqrt(G) toward unit direction q.
inline RVector radiation_vector(const OrientationMatrix &orientation, const Vec3 &q, const GainPattern &pattern)
{
    RVector g(orientation.size());
    for (std::size_t n = 0; n < orientation.size(); ++n)
        g[n] = std::sqrt(directional_gain(pattern, dot(pointing_vector(orientation[n]), q)));
    return g;
}

// Same as above for precomputed boresights.
inline RVector radiation_vector(std::span<const PointingVector> boresights, const Vec3 &q, const GainPattern &pattern)
{
    RVector g(boresights.size());
    for (std::size_t n = 0; n < boresights.size(); ++n)
        g[n] = std::sqrt(directional_gain(pattern, dot(boresights[n], q)));
    return g;
}

inline std::vector<PointingVector> boresights(const OrientationMatrix &orientation)
{
    std::vector<PointingVector> out(orientation.size());
    for (std::size_t n = 0; n < orientation.size(); ++n)
        out[n] = pointing_vector(orientation[n]);
    return out;
}

/// Free-space path gain lambda / (4 pi r) e^{-j 2 pi r / lambda}.
inline cd path_gain(const UserGeometry &u, double wavelength)
{
    if (!(u.distance > 0.0))
        throw domain_error("path_gain: distance must be positive");
    return std::polar(wavelength / (4.0 * pi * u.distance), -2.0 * pi * u.distance / wavelength);
}

/// h_k = beta_k g_k(Theta) (.) a_k.
inline CVector channel_vector(const UserGeometry &u, const OrientationMatrix &orientation, const GainPattern &pattern,
                              const ArrayConfig &cfg,
                              DirectionConvention convention = DirectionConvention::standard_spherical)
{
    if (orientation.size() != cfg.size())
        throw dimension_error("channel_vector: orientation length differs from array size");
    const cd beta = path_gain(u, cfg.wavelength);
    const auto g = radiation_vector(orientation, user_direction(u, convention), pattern);
    auto h = array_response(u.elevation, u.azimuth, cfg);
    for (std::size_t n = 0; n < h.size(); ++n)
        h[n] *= beta * g[n];
    return h;
}

/// gamma = sum_k ||h_k||^2.
inline double sum_channel_gain(std::span<const CVector> channels)
{
    if (channels.empty())
        throw domain_error("sum_channel_gain: no channels");
    double gamma = 0.0;
    for (const auto &h : channels)
        gamma += squared_norm(h);
    return gamma;
}

} // namespace ratrain
