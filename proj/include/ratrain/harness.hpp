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
/// Training-period protocol, benchmark schemes, NMSE scoring and Monte-Carlo
/// sweeps.
///
/// A training period has M blocks. Each block collects T_E / M pilot
/// snapshots under the current orientation, estimates angles (MUSIC) and
/// path gains (least squares), and then lets the scheme pick the orientation
/// for the next block. Orientation changes consume no pilot slots.
///
/// Randomness is derived from (root seed, trial, block, stream) and never from
/// the scheme, so every scheme sees identical pilots and noise at the same
/// trial and block.

#pragma once

#include "ratrain/channel.hpp"
#include "ratrain/config.hpp"
#include "ratrain/estimation.hpp"
#include "ratrain/optimizer.hpp"
#include "ratrain/random.hpp"
#include "ratrain/signal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <thread>
#include <vector>

namespace ratrain
{

struct TrainingSchedule
{
    std::vector<std::size_t> estimation_slots; // T_m^E
    std::vector<std::size_t> adjustment_slots; // T_m^P, pilot slots spent rotating (zero)
};

inline TrainingSchedule make_schedule(const ScenarioConfig &cfg)
{
    TrainingSchedule s;
    s.estimation_slots.assign(cfg.blocks, cfg.slots_per_block());
    s.adjustment_slots.assign(cfg.blocks, 0);
    return s;
}

// sigma^2 for a given SNR under the configured reference.
inline double noise_power(const ScenarioConfig &cfg, double snr_db)
{
    double p_mean = 0.0;
    double beta2 = 0.0;
    for (const auto &u : cfg.users)
    {
        p_mean += u.power();
        beta2 += std::norm(path_gain(u.geometry(), cfg.wavelength_m));
    }
    p_mean /= static_cast<double>(cfg.users.size());
    beta2 /= static_cast<double>(cfg.users.size());
    const double rho = std::pow(10.0, snr_db / 10.0);
    return cfg.snr_reference == SnrReference::transmit ? p_mean / rho : p_mean * beta2 / rho;
}

// Users ordered by ascending elevation (the association order used for scoring).
inline std::vector<UserConfig> sorted_users(const ScenarioConfig &cfg)
{
    auto u = cfg.users;
    std::stable_sort(u.begin(), u.end(), [](const UserConfig &a, const UserConfig &b) {
        return a.elevation_deg < b.elevation_deg ||
               (a.elevation_deg == b.elevation_deg && a.azimuth_deg < b.azimuth_deg);
    });
    return u;
}

/// eta_k = beta_k a(theta_k, phi_k) for every user, ascending elevation.
inline std::vector<CVector> true_eta(const ScenarioConfig &cfg, const ArrayConfig &array)
{
    std::vector<CVector> out;
    for (const auto &u : sorted_users(cfg))
    {
        const auto g = u.geometry();
        auto a = array_response(g.elevation, g.azimuth, array);
        const cd beta = path_gain(g, cfg.wavelength_m);
        for (auto &z : a)
            z *= beta;
        out.push_back(std::move(a));
    }
    return out;
}

inline GainPattern scheme_pattern(const ScenarioConfig &cfg, Scheme scheme)
{
    return scheme == Scheme::isotropic ? GainPattern::isotropic() : cfg.pattern();
}

struct BlockTrace
{
    std::size_t block = 0;
    OrientationMatrix orientation; // in force while the block's pilots were received
    std::vector<Angle> aoas;
    CVector gains;
    double true_sum_gain = 0.0; // gamma under this orientation
    bool failed = false;
    bool degraded = false;
};

struct TrainingResult
{
    ChannelEstimate estimate; // from the final block
    OrientationMatrix final_orientation;
    std::vector<BlockTrace> trace;
    SpectrumGrid final_spectrum;
    bool failed = false;
    bool degraded = false;
};

/// Runs one channel training period for `scheme`.
inline TrainingResult run_training_period(const ScenarioConfig &cfg, Scheme scheme, std::uint64_t trial_seed,
                                          double snr_db, const ArrayConfig &array)
{
    const std::size_t n = array.size();
    const std::size_t k = cfg.users.size();
    if (k >= n)
        throw config_error("run_training_period: need fewer users than antennas");
    const auto users = sorted_users(cfg);
    const GainPattern pattern = scheme_pattern(cfg, scheme);
    const double sigma2 = noise_power(cfg, snr_db);
    const auto schedule = make_schedule(cfg);
    const auto spectrum_opt = cfg.spectrum_options();
    const PeakOptions peak_opt{cfg.min_peak_to_median_db};

    RVector powers;
    for (const auto &u : users)
        powers.push_back(u.power());

    TrainingResult out;
    OrientationMatrix orientation = reference_orientation(n);
    ComplexMatrix covariance_sum;
    double covariance_weight = 0.0;

    for (std::size_t m = 0; m < cfg.blocks; ++m)
    {
        BlockTrace bt;
        bt.block = m;
        bt.orientation = orientation;

        const auto pilots = make_pilots(k, schedule.estimation_slots[m], powers,
                                        derive_seed(trial_seed, {stream::pilots, m}), cfg.pilots);
        std::vector<CVector> channels;
        for (const auto &u : users)
            channels.push_back(channel_vector(u.geometry(), orientation, pattern, array, cfg.convention));
        bt.true_sum_gain = sum_channel_gain(channels);
        const auto block = receive(channels, pilots, sigma2, derive_seed(trial_seed, {stream::noise, m}), orientation);

        ComplexMatrix r = sample_covariance(block);
        if (cfg.accumulate_covariance)
        {
            const auto t = static_cast<double>(pilots.slots());
            if (covariance_sum.empty())
                covariance_sum = r * t;
            else
                covariance_sum += r * t;
            covariance_weight += t;
            r = covariance_sum * (1.0 / covariance_weight);
        }

        const auto split = subspace_split(r, k);
        auto spectrum = music_spectrum(split, orientation, pattern, array, cfg.grid, spectrum_opt);
        const auto aoa = estimate_aoas(spectrum, k, peak_opt);
        bt.aoas = aoa.aoas;
        bt.degraded = aoa.degraded;

        std::optional<ChannelEstimate> est;
        try
        {
            const auto x = build_design_matrix(aoa.aoas, orientation, pattern, array, pilots, cfg.convention);
            const auto beta = estimate_path_gains(x, stack_snapshots(block.y));
            est = assemble_estimate(aoa.aoas, beta, array);
            bt.gains = est->gains;
        }
        catch (const singularity_error &)
        {
            bt.failed = true;
        }

        const bool last = m + 1 == cfg.blocks;
        if (last)
        {
            out.failed = bt.failed;
            out.degraded = bt.degraded;
            if (est)
                out.estimate = *est;
            out.final_spectrum = std::move(spectrum);
        }
        out.trace.push_back(std::move(bt));
        if (last)
            break;

        switch (scheme)
        {
        case Scheme::proposed:
            if (est)
            {
                OrientationProblem problem;
                for (std::size_t i = 0; i < k; ++i)
                {
                    problem.directions.push_back(
                        direction_vector(est->aoas[i].elevation, est->aoas[i].azimuth, cfg.convention));
                    problem.weights.push_back(std::norm(est->gains[i]) * pattern.g0);
                }
                problem.p = pattern.p;
                problem.theta_max = cfg.theta_max();
                const auto sol = optimize_all(problem, cfg.optimizer(derive_seed(trial_seed, {stream::optimizer, m})),
                                              orientation, cfg.antenna_mode);
                orientation = sol.angles;
            }
            break;
        case Scheme::random_orientation:
        {
            Rng rng(derive_seed(trial_seed, {stream::orientation, m}));
            for (auto &a : orientation)
            {
                const double z = rng.uniform(0.0, cfg.theta_max());
                const double az = rng.uniform(0.0, 2.0 * pi);
                a = DeflectionAngles::make(z, az);
            }
            break;
        }
        case Scheme::no_adjustment:
        case Scheme::isotropic: break;
        }
    }
    out.final_orientation = orientation;
    return out;
}

inline TrainingResult run_training_period(const ScenarioConfig &cfg, Scheme scheme, std::uint64_t trial_seed,
                                          double snr_db)
{
    return run_training_period(cfg, scheme, trial_seed, snr_db, cfg.array());
}

/// sum_k ||eta_k - eta_hat_k||^2 / sum_k ||eta_k||^2 for one trial.
inline double nmse(std::span<const CVector> truth, std::span<const CVector> estimate)
{
    if (truth.size() != estimate.size())
        throw dimension_error("nmse: user counts differ");
    double err = 0.0;
    double ref = 0.0;
    for (std::size_t k = 0; k < truth.size(); ++k)
    {
        if (truth[k].size() != estimate[k].size())
            throw dimension_error("nmse: vector lengths differ");
        for (std::size_t i = 0; i < truth[k].size(); ++i)
            err += std::norm(truth[k][i] - estimate[k][i]);
        ref += squared_norm(truth[k]);
    }
    if (!(ref > 0.0))
        throw domain_error("nmse: true CSI has zero norm");
    return err / ref;
}

inline double nmse(std::span<const CVector> truth, const ChannelEstimate &est) { return nmse(truth, est.eta); }

/// Greedy nearest-direction association of estimates to users (for 2D grids):
/// returns, for every user index, the estimate index assigned to it.
inline std::vector<std::size_t> associate_users(std::span<const Angle> truth, std::span<const Angle> est)
{
    if (truth.size() != est.size())
        throw dimension_error("associate_users: counts differ");
    struct Pair
    {
        double dist;
        std::size_t t, e;
    };
    std::vector<Pair> pairs;
    for (std::size_t t = 0; t < truth.size(); ++t)
        for (std::size_t e = 0; e < est.size(); ++e)
        {
            const auto a = direction_vector(truth[t].elevation, truth[t].azimuth, DirectionConvention::standard_spherical);
            const auto b = direction_vector(est[e].elevation, est[e].azimuth, DirectionConvention::standard_spherical);
            pairs.push_back({std::acos(std::clamp(dot(a, b), -1.0, 1.0)), t, e});
        }
    std::stable_sort(pairs.begin(), pairs.end(), [](const Pair &a, const Pair &b) { return a.dist < b.dist; });
    std::vector<std::size_t> assign(truth.size(), truth.size());
    std::vector<bool> used(est.size(), false);
    for (const auto &p : pairs)
        if (assign[p.t] == truth.size() && !used[p.e])
        {
            assign[p.t] = p.e;
            used[p.e] = true;
        }
    return assign;
}

/// NMSE of a training result against the configured users, using ascending
/// elevation order in 1D and greedy direction matching on 2D grids.
inline double score_trial(const ScenarioConfig &cfg, const ArrayConfig &array, const TrainingResult &result)
{
    const auto truth = true_eta(cfg, array);
    if (!cfg.grid.two_d)
        return nmse(truth, result.estimate);
    std::vector<Angle> true_angles;
    for (const auto &u : sorted_users(cfg))
        true_angles.push_back({deg2rad(u.elevation_deg), deg2rad(u.azimuth_deg)});
    const auto assign = associate_users(true_angles, result.estimate.aoas);
    std::vector<CVector> matched;
    for (auto e : assign)
        matched.push_back(result.estimate.eta[e]);
    return nmse(truth, matched);
}

// Runs fn(i) for i in [0, count) on `threads` workers (0 = hardware concurrency).
inline void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)> &fn)
{
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    if (threads <= 1)
    {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(threads);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            try
            {
                for (std::size_t i = next++; i < count; i = next++)
                    fn(i);
            }
            catch (...)
            {
                errors[w] = std::current_exception();
                next = count;
            }
        });
    for (auto &t : pool)
        t.join();
    for (auto &e : errors)
        if (e)
            std::rethrow_exception(e);
}

inline std::uint64_t trial_seed(std::uint64_t root, std::size_t trial) { return derive_seed(root, {stream::trial, trial}); }

enum class SweepKind
{
    snr,
    antennas,
};

inline std::string to_string(SweepKind k) { return k == SweepKind::snr ? "snr_db" : "antennas"; }

struct NMSEPoint
{
    Scheme scheme = Scheme::proposed;
    double sweep_value = 0.0;
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t trials = 0;   // successful trials
    std::size_t failures = 0;
    std::size_t degraded = 0; // successful trials whose final block lacked K resolved peaks
    bool failed = false;      // every trial failed
};

struct NMSEReport
{
    SweepKind kind = SweepKind::snr;
    std::vector<NMSEPoint> points; // sweep point major, scheme minor
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
    std::size_t configured_trials = 0;

    const NMSEPoint &at(Scheme s, double value) const
    {
        for (const auto &p : points)
            if (p.scheme == s && p.sweep_value == value)
                return p;
        throw std::out_of_range("NMSEReport: no such point");
    }
};

/// Monte-Carlo NMSE over an SNR sweep or an antenna-count sweep.
inline NMSEReport run_sweep(const ScenarioConfig &cfg, SweepKind kind)
{
    cfg.validate();
    RVector sweep;
    if (kind == SweepKind::snr)
        sweep = cfg.snr_sweep_db;
    else
        for (auto n : cfg.antenna_counts)
            sweep.push_back(static_cast<double>(n));

    const std::size_t ns = cfg.schemes.size();
    const std::size_t jobs = sweep.size() * ns * cfg.trials;
    struct Outcome
    {
        double nmse = 0.0;
        bool failed = false;
        bool degraded = false;
    };
    std::vector<Outcome> outcomes(jobs);

    parallel_for(jobs, cfg.threads, [&](std::size_t job) {
        const std::size_t trial = job % cfg.trials;
        const std::size_t s = (job / cfg.trials) % ns;
        const std::size_t point = job / (cfg.trials * ns);
        const ArrayConfig array = kind == SweepKind::snr ? cfg.array()
                                                         : cfg.array_for_count(static_cast<std::size_t>(sweep[point]));
        const double snr = kind == SweepKind::snr ? sweep[point] : cfg.antenna_sweep_snr_db;
        const auto res = run_training_period(cfg, cfg.schemes[s], trial_seed(cfg.seed, trial), snr, array);
        Outcome &o = outcomes[job];
        o.failed = res.failed;
        o.degraded = res.degraded;
        if (!res.failed)
            o.nmse = score_trial(cfg, array, res);
    });

    NMSEReport report;
    report.kind = kind;
    report.config_hash = config_hash(cfg);
    report.seed = cfg.seed;
    report.configured_trials = cfg.trials;
    for (std::size_t point = 0; point < sweep.size(); ++point)
        for (std::size_t s = 0; s < ns; ++s)
        {
            NMSEPoint p;
            p.scheme = cfg.schemes[s];
            p.sweep_value = sweep[point];
            double sum = 0.0;
            const std::size_t base = (point * ns + s) * cfg.trials;
            for (std::size_t t = 0; t < cfg.trials; ++t)
            {
                const auto &o = outcomes[base + t];
                if (o.failed)
                {
                    ++p.failures;
                    continue;
                }
                ++p.trials;
                p.degraded += o.degraded ? 1 : 0;
                sum += o.nmse;
            }
            p.failed = p.trials == 0;
            if (p.trials > 0)
            {
                p.mean = sum / static_cast<double>(p.trials);
                double ss = 0.0;
                for (std::size_t t = 0; t < cfg.trials; ++t)
                {
                    const auto &o = outcomes[base + t];
                    if (!o.failed)
                        ss += (o.nmse - p.mean) * (o.nmse - p.mean);
                }
                if (p.trials > 1)
                    p.std_error = std::sqrt(ss / static_cast<double>(p.trials - 1) / static_cast<double>(p.trials));
            }
            report.points.push_back(p);
        }
    return report;
}

/// Trial-averaged pseudo-spectrum per scheme, normalized to a 0 dB peak.
struct SpectrumTable
{
    RVector angles_deg;
    std::vector<Scheme> schemes;
    std::vector<RVector> db; // db[s][i]
    double snr_db = 0.0;
    std::size_t trials = 0;
    std::uint64_t config_hash = 0;
    std::uint64_t seed = 0;
};

inline constexpr double spectrum_floor_db = -300.0;

/// Averages each scheme's final-block spectrum over cfg.trials training
/// periods. Every trial's spectrum is scaled to unit peak before averaging.
inline SpectrumTable emit_spectrum(const ScenarioConfig &cfg, std::span<const Scheme> schemes, std::uint64_t seed)
{
    cfg.validate();
    if (cfg.grid.two_d)
        throw config_error("emit_spectrum: requires a 1D elevation grid");
    SpectrumTable table;
    for (double e : cfg.grid.elevations())
        table.angles_deg.push_back(rad2deg(e));
    table.schemes.assign(schemes.begin(), schemes.end());
    table.snr_db = cfg.spectrum_snr_db;
    table.trials = cfg.trials;
    table.config_hash = config_hash(cfg);
    table.seed = seed;

    const std::size_t points = table.angles_deg.size();
    std::vector<RVector> per_trial(schemes.size() * cfg.trials);
    parallel_for(per_trial.size(), cfg.threads, [&](std::size_t job) {
        const std::size_t s = job / cfg.trials;
        const std::size_t trial = job % cfg.trials;
        const auto res = run_training_period(cfg, schemes[s], trial_seed(seed, trial), cfg.spectrum_snr_db);
        RVector v = res.final_spectrum.values;
        const double peak = *std::max_element(v.begin(), v.end());
        if (peak > 0.0)
            for (auto &x : v)
                x /= peak;
        per_trial[job] = std::move(v);
    });

    for (std::size_t s = 0; s < schemes.size(); ++s)
    {
        RVector avg(points, 0.0);
        for (std::size_t t = 0; t < cfg.trials; ++t)
            for (std::size_t i = 0; i < points; ++i)
                avg[i] += per_trial[s * cfg.trials + t][i];
        const double peak = *std::max_element(avg.begin(), avg.end());
        RVector db(points, spectrum_floor_db);
        for (std::size_t i = 0; i < points; ++i)
            if (avg[i] > 0.0 && peak > 0.0)
                db[i] = std::max(spectrum_floor_db, 10.0 * std::log10(avg[i] / peak));
        table.db.push_back(std::move(db));
    }
    return table;
}

struct SpectrumPeak
{
    double angle_deg = 0.0;
    double level_db = 0.0;
    double width_deg = 0.0; // -3 dB width relative to the peak's own level
};

/// The `k` highest strict local maxima of a dB curve (edges excluded), with
/// their -3 dB widths found by linear interpolation of the crossings.
inline std::vector<SpectrumPeak> spectrum_peaks(std::span<const double> angles_deg, std::span<const double> db,
                                                std::size_t k)
{
    std::vector<std::size_t> idx;
    for (std::size_t i = 1; i + 1 < db.size(); ++i)
        if (db[i] > db[i - 1] && db[i] > db[i + 1])
            idx.push_back(i);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return db[a] > db[b]; });
    if (idx.size() > k)
        idx.resize(k);

    std::vector<SpectrumPeak> out;
    for (auto i : idx)
    {
        const double level = db[i] - 3.0;
        auto crossing = [&](int dir) {
            std::size_t j = i;
            while (true)
            {
                const std::size_t next = dir < 0 ? j - 1 : j + 1;
                if ((dir < 0 && j == 0) || (dir > 0 && j + 1 >= db.size()))
                    return angles_deg[j];
                if (db[next] < level)
                {
                    const double frac = (db[j] - level) / (db[j] - db[next]);
                    return angles_deg[j] + frac * (angles_deg[next] - angles_deg[j]);
                }
                j = next;
            }
        };
        out.push_back({angles_deg[i], db[i], crossing(+1) - crossing(-1)});
    }
    std::sort(out.begin(), out.end(),
              [](const SpectrumPeak &a, const SpectrumPeak &b) { return a.angle_deg < b.angle_deg; });
    return out;
}

} // namespace ratrain
