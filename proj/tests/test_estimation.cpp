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

#include "ratrain/estimation.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace ratrain
{
namespace
{

struct Scene
{
    ArrayConfig cfg = ArrayConfig::half_wavelength(1, 16, 0.125);
    GainPattern pattern = GainPattern::cosine(4);
    std::vector<UserGeometry> users;
    OrientationMatrix orientation = reference_orientation(16);
    std::size_t slots = 10;

    std::vector<CVector> channels() const
    {
        std::vector<CVector> hs;
        for (const auto &u : users)
            hs.push_back(channel_vector(u, orientation, pattern, cfg));
        return hs;
    }

    // Noise power for a per-antenna isotropic SNR of snr_db.
    double noise_for(double snr_db) const
    {
        double b2 = 0;
        for (const auto &u : users)
            b2 += std::norm(path_gain(u, cfg.wavelength));
        return b2 / static_cast<double>(users.size()) / std::pow(10.0, snr_db / 10.0);
    }

    SnapshotBlock block(double noise_power, std::uint64_t seed) const
    {
        const std::vector<double> powers(users.size(), 1.0);
        const auto s = make_pilots(users.size(), slots, powers, derive_seed(seed, {1}));
        return receive(channels(), s, noise_power, derive_seed(seed, {2}), orientation);
    }
};

Scene reference_scene()
{
    Scene s;
    for (double t : {15.4, 30.7, 45.1})
        s.users.push_back({100.0, deg2rad(t), 0.0});
    return s;
}

TEST(Subspace, RankOneSplit)
{
    const CVector v{cd{1}, cd{0, 1}, cd{-1}, cd{0, -1}};
    const auto r = ComplexMatrix::column(v) * ComplexMatrix::column(v).adjoint();
    const auto split = subspace_split(r, 1);
    ASSERT_EQ(split.signal_basis.cols(), 1u);
    ASSERT_EQ(split.noise_basis.cols(), 3u);
    EXPECT_NEAR(split.eigenvalues[0], 4.0, 1e-12);
    EXPECT_NEAR(std::abs(inner(split.signal_basis.col(0), v)), 2.0, 1e-12);
    for (std::size_t c = 0; c < 3; ++c)
        EXPECT_NEAR(std::abs(inner(split.noise_basis.col(c), v)), 0.0, 1e-12);
}

TEST(Subspace, Errors)
{
    EXPECT_THROW(subspace_split(ComplexMatrix::identity(4), 0), config_error);
    EXPECT_THROW(subspace_split(ComplexMatrix::identity(4), 4), config_error);
    EXPECT_THROW(subspace_split(ComplexMatrix(3, 4), 1), dimension_error);
}

TEST(Grid, AxisLengths)
{
    GridSpec g;
    EXPECT_EQ(g.elevations().size(), 1801u);
    EXPECT_EQ(g.azimuths().size(), 1u);
    g.two_d = true;
    EXPECT_EQ(g.azimuths().size(), 181u);
    EXPECT_NEAR(g.elevations()[1000], deg2rad(10.0), 1e-12);
    g.elevation_step = 0.0;
    EXPECT_THROW(g.validate(), config_error);
}

TEST(Music, NoiselessRecoversAnglesAndGains)
{
    const auto s = reference_scene();
    const auto blk = s.block(0.0, 7);
    const auto split = subspace_split(sample_covariance(blk), 3);
    const auto spec = music_spectrum(split, s.orientation, s.pattern, s.cfg, GridSpec{});
    const auto est = estimate_aoas(spec, 3);
    ASSERT_EQ(est.aoas.size(), 3u);
    EXPECT_FALSE(est.degraded);
    for (std::size_t k = 0; k < 3; ++k)
        EXPECT_NEAR(rad2deg(est.aoas[k].elevation), rad2deg(s.users[k].elevation), 0.1);

    // LS at the true angles returns the path gains exactly.
    std::vector<Angle> truth;
    for (const auto &u : s.users)
        truth.push_back({u.elevation, u.azimuth});
    const auto x = build_design_matrix(truth, s.orientation, s.pattern, s.cfg, blk.pilots);
    const auto beta = estimate_path_gains(x, stack_snapshots(blk.y));
    for (std::size_t k = 0; k < 3; ++k)
    {
        const cd b = path_gain(s.users[k], s.cfg.wavelength);
        EXPECT_LT(std::abs(beta[k] - b) / std::abs(b), 1e-9);
    }
}

TEST(Music, ExactCovarianceOneToThreeSources)
{
    const double angles[] = {-20.0, 12.5, 41.3};
    for (std::size_t k = 1; k <= 3; ++k)
    {
        Scene s;
        for (std::size_t i = 0; i < k; ++i)
            s.users.push_back({100.0, deg2rad(angles[i]), 0.0});
        const auto hs = s.channels();
        ComplexMatrix r(16, 16);
        for (const auto &h : hs)
            r = r + ComplexMatrix::column(h) * ComplexMatrix::column(h).adjoint();
        const auto spec = music_spectrum(subspace_split(r, k), s.orientation, s.pattern, s.cfg, GridSpec{});
        const auto est = estimate_aoas(spec, k);
        ASSERT_EQ(est.aoas.size(), k);
        for (std::size_t i = 0; i < k; ++i)
            EXPECT_NEAR(rad2deg(est.aoas[i].elevation), angles[i], 0.1) << "K=" << k;
    }
}

TEST(Music, IsotropicPatternGivesClassicalSpectrum)
{
    auto s = reference_scene();
    s.pattern = GainPattern::isotropic();
    const auto blk = s.block(s.noise_for(5.0), 3);
    const auto split = subspace_split(sample_covariance(blk), 3);
    GridSpec g;
    g.elevation_step = 1.0;
    const auto spec = music_spectrum(split, s.orientation, s.pattern, s.cfg, g);
    const auto en = split.noise_basis;
    for (std::size_t ie = 1; ie + 1 < spec.elevations.size(); ++ie)
    {
        const auto a = array_response(spec.elevations[ie], 0.0, s.cfg);
        double den = 0;
        for (std::size_t c = 0; c < en.cols(); ++c)
            den += std::norm(inner(en.col(c), a));
        const double classical = 16.0 / den;
        EXPECT_NEAR(spec.at(ie, 0) / classical, 1.0, 1e-10) << "elevation index " << ie;
    }
}

TEST(Music, InvariantToNoiseBasisRotation)
{
    const auto s = reference_scene();
    const auto blk = s.block(s.noise_for(0.0), 5);
    auto split = subspace_split(sample_covariance(blk), 3);
    GridSpec g;
    g.elevation_step = 0.5;
    const auto before = music_spectrum(split, s.orientation, s.pattern, s.cfg, g);

    Rng rng(99);
    ComplexMatrix h(13, 13);
    for (auto &z : h.data())
        z = rng.complex_normal(1.0);
    const auto u = hermitian_eig((h + h.adjoint()) * cd{0.5}).vectors;
    split.noise_basis = split.noise_basis * u;
    const auto after = music_spectrum(split, s.orientation, s.pattern, s.cfg, g);
    for (std::size_t i = 0; i < before.size(); ++i)
    {
        EXPECT_EQ(before.null_point[i], after.null_point[i]);
        if (!before.null_point[i])
            EXPECT_NEAR(after.values[i] / before.values[i], 1.0, 1e-10);
    }
}

TEST(Music, GainWeightedDiffersOnlyByCandidateNorm)
{
    const auto s = reference_scene();
    const auto blk = s.block(s.noise_for(10.0), 8);
    const auto split = subspace_split(sample_covariance(blk), 3);
    GridSpec g;
    g.elevation_step = 2.0;
    SpectrumOptions weighted;
    weighted.form = SpectrumForm::gain_weighted;
    const auto a = music_spectrum(split, s.orientation, s.pattern, s.cfg, g);
    const auto b = music_spectrum(split, s.orientation, s.pattern, s.cfg, g, weighted);
    for (std::size_t ie = 0; ie < a.elevations.size(); ++ie)
    {
        if (a.null_point[ie])
            continue;
        const auto bv = effective_manifold(std::vector<Angle>{{a.elevations[ie], 0.0}}, s.orientation, s.pattern, s.cfg);
        const double bb = squared_norm(bv.col(0));
        EXPECT_NEAR(b.values[ie] * bb / a.values[ie], 1.0, 1e-9);
    }
}

TEST(Music, SinglePeakSpectrum)
{
    SpectrumGrid s;
    s.elevations = GridSpec::axis(-10, 10, 1);
    s.azimuths = {0.0};
    for (double e : s.elevations)
        s.values.push_back(1.0 / (1e-3 + (e - deg2rad(2.3)) * (e - deg2rad(2.3))));
    s.null_point.assign(s.values.size(), 0);
    s.saturated.assign(s.values.size(), 0);
    const auto est = estimate_aoas(s, 1);
    ASSERT_EQ(est.aoas.size(), 1u);
    EXPECT_FALSE(est.degraded);
    EXPECT_NEAR(rad2deg(est.aoas[0].elevation), 2.3, 0.5);
    // Asking for two sources from one peak is flagged.
    EXPECT_TRUE(estimate_aoas(s, 2).degraded);
}

TEST(Music, CloselySpacedUsersAtLowSnrAreFlagged)
{
    Scene s;
    s.users = {{100.0, deg2rad(20.0), 0.0}, {100.0, deg2rad(21.0), 0.0}};
    int degraded = 0;
    const int trials = 20;
    for (int t = 0; t < trials; ++t)
    {
        const auto blk = s.block(s.noise_for(-10.0), 1000 + t);
        const auto split = subspace_split(sample_covariance(blk), 2);
        const auto est = estimate_aoas(music_spectrum(split, s.orientation, s.pattern, s.cfg, GridSpec{}), 2);
        ASSERT_EQ(est.aoas.size(), 2u);
        degraded += est.degraded ? 1 : 0;
    }
    EXPECT_GE(degraded, trials / 2);
}

TEST(Music, ErrorShrinksWithSnr)
{
    const auto s = reference_scene();
    auto rmse = [&](double snr) {
        double se = 0;
        int count = 0;
        for (int t = 0; t < 50; ++t)
        {
            const auto blk = s.block(s.noise_for(snr), 500 + t);
            const auto split = subspace_split(sample_covariance(blk), 3);
            const auto est = estimate_aoas(music_spectrum(split, s.orientation, s.pattern, s.cfg, GridSpec{}), 3);
            for (std::size_t k = 0; k < 3; ++k)
            {
                const double d = rad2deg(est.aoas[k].elevation - s.users[k].elevation);
                se += d * d;
                ++count;
            }
        }
        return std::sqrt(se / count);
    };
    const double low = rmse(0.0);
    const double high = rmse(20.0);
    EXPECT_LE(high, low);
    EXPECT_LT(high, 0.5);
}

TEST(LeastSquaresStage, DesignMatrixIndexing)
{
    const auto s = reference_scene();
    std::vector<Angle> angles{{deg2rad(10), 0.0}, {deg2rad(25), 0.0}};
    const std::vector<double> powers{1.0, 2.0};
    const auto pilots = make_pilots(2, 4, powers, 1);
    const auto x = build_design_matrix(angles, s.orientation, s.pattern, s.cfg, pilots);
    ASSERT_EQ(x.rows(), 64u);
    ASSERT_EQ(x.cols(), 2u);
    for (std::size_t t = 0; t < 4; ++t)
        for (std::size_t n = 0; n < 16; ++n)
            for (std::size_t k = 0; k < 2; ++k)
            {
                const double el = angles[k].elevation;
                const double g = std::sqrt(18.0 * std::pow(std::cos(el), 8));
                const cd b = g * std::polar(1.0, pi * n * std::sin(el));
                EXPECT_NEAR(std::abs(x(t * 16 + n, k) - b * pilots.symbols(k, t)), 0.0, 1e-12);
            }
    EXPECT_THROW(build_design_matrix(angles, s.orientation, s.pattern, s.cfg, make_pilots(3, 4, std::vector<double>(3, 1.0), 1)),
                 dimension_error);
}

TEST(LeastSquaresStage, CoincidentAnglesAreSingular)
{
    const auto s = reference_scene();
    std::vector<Angle> angles{{deg2rad(10), 0.0}, {deg2rad(10), 0.0}};
    const auto pilots = make_pilots(2, 10, std::vector<double>(2, 1.0), 1, PilotKind::orthogonal);
    const auto x = build_design_matrix(angles, s.orientation, s.pattern, s.cfg, pilots);
    // Distinct orthogonal pilots keep the columns independent even for equal angles.
    EXPECT_NO_THROW(estimate_path_gains(x, CVector(x.rows(), cd{1.0})));
    const auto same = make_pilots(2, 10, std::vector<double>(2, 1.0), 1, PilotKind::random_phase);
    PilotMatrix dup = same;
    for (std::size_t t = 0; t < 10; ++t)
        dup.symbols(1, t) = dup.symbols(0, t);
    EXPECT_THROW(estimate_path_gains(build_design_matrix(angles, s.orientation, s.pattern, s.cfg, dup),
                                     CVector(160, cd{1.0})),
                 singularity_error);
}

TEST(Assemble, SortsByElevationAndFormsEta)
{
    const ArrayConfig cfg = ArrayConfig::half_wavelength(1, 4, 0.125);
    const std::vector<Angle> aoas{{0.5, 0.0}, {-0.2, 0.0}};
    const CVector gains{cd{1, 1}, cd{2, 0}};
    const auto est = assemble_estimate(aoas, gains, cfg);
    EXPECT_DOUBLE_EQ(est.aoas[0].elevation, -0.2);
    EXPECT_EQ(est.gains[0], cd(2, 0));
    for (std::size_t n = 0; n < 4; ++n)
    {
        EXPECT_NEAR(std::abs(est.eta[0][n] - 2.0 * std::polar(1.0, pi * n * std::sin(-0.2))), 0.0, 1e-14);
        EXPECT_NEAR(std::abs(est.eta[1][n] - cd(1, 1) * std::polar(1.0, pi * n * std::sin(0.5))), 0.0, 1e-14);
    }
    const std::vector<Angle> swapped{aoas[1], aoas[0]};
    const CVector swapped_gains{gains[1], gains[0]};
    const auto again = assemble_estimate(swapped, swapped_gains, cfg);
    EXPECT_EQ(again.gains, est.gains);
    EXPECT_EQ(again.eta, est.eta);
    EXPECT_THROW(assemble_estimate(aoas, CVector{cd{1}}, cfg), dimension_error);
}

} // namespace
} // namespace ratrain
