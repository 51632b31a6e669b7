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
/// Orientation design: maximize L(f) = sum_k mu_k max(f^T q_k, 0)^{2p} over
/// unit boresights f inside the cap f^T e >= cos(theta_max), by projected
/// gradient ascent with backtracking and multiple starts.
///
/// The sum channel gain separates over antennas and every antenna sees the
/// same per-antenna objective, so one solve can be shared by all of them.

#pragma once

#include "ratrain/channel.hpp"
#include "ratrain/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace ratrain
{

struct OrientationProblem
{
    std::vector<Vec3> directions; // unit user directions q_k
    RVector weights;              // mu_k = |beta_k|^2 g0
    double p = 4.0;
    double theta_max = pi / 6.0;

    void validate() const
    {
        if (directions.size() != weights.size())
            throw dimension_error("OrientationProblem: one weight per direction required");
        for (double w : weights)
            if (!(w >= 0.0))
                throw config_error("OrientationProblem: weights must be non-negative");
        for (const auto &q : directions)
            if (std::abs(norm(q) - 1.0) > 1e-9)
                throw config_error("OrientationProblem: directions must be unit vectors");
        if (!(theta_max >= 0.0 && theta_max <= pi / 2.0))
            throw config_error("OrientationProblem: theta_max outside [0, pi/2]");
        if (!(p >= 0.0))
            throw config_error("OrientationProblem: p must be non-negative");
    }

    double max_weight() const { return weights.empty() ? 0.0 : *std::max_element(weights.begin(), weights.end()); }
};

enum class ProjectionRule
{
    shift_then_clamp, // shift along e onto the cap plane, normalize, fall back to `exact` if still outside
    exact, // normalize, then clamp the zenith to theta_max keeping the azimuth
};

enum class AntennaMode
{
    broadcast,   // solve once, give every antenna the same boresight
    per_antenna, // independent solve from each antenna's own start
};

struct OptimizerConfig
{
    double step = 0.0; // initial step; 0 selects 0.1 / max_k mu_k
    std::size_t max_iters = 500;
    double tol = 1e-12; // stop when the improvement falls below tol * |L|
    std::size_t restarts = 8; // total starts, including f0 and the user directions
    std::size_t max_halvings = 20;
    ProjectionRule rule = ProjectionRule::shift_then_clamp;
    std::uint64_t seed = 0;

    void validate() const
    {
        if (!(step >= 0.0))
            throw config_error("OptimizerConfig: step must be positive (or 0 for automatic)");
        if (!(tol >= 0.0))
            throw config_error("OptimizerConfig: tol must be non-negative");
    }
};

inline double objective(const OrientationProblem &problem, const PointingVector &f)
{
    double total = 0.0;
    for (std::size_t k = 0; k < problem.directions.size(); ++k)
    {
        const double c = dot(f, problem.directions[k]);
        if (c > 0.0)
            total += problem.weights[k] * std::pow(c, 2.0 * problem.p);
    }
    return total;
}

inline Vec3 gradient(const OrientationProblem &problem, const PointingVector &f)
{
    Vec3 g;
    if (problem.p == 0.0)
        return g;
    for (std::size_t k = 0; k < problem.directions.size(); ++k)
    {
        const double c = dot(f, problem.directions[k]);
        if (c > 0.0)
            g += (2.0 * problem.p * problem.weights[k] * std::pow(c, 2.0 * problem.p - 1.0)) * problem.directions[k];
    }
    return g;
}

struct Projection
{
    PointingVector f;
    bool degenerate = false; // input had (near) zero length; boresight returned
};

inline Projection project_feasible(const Vec3 &f, double theta_max, ProjectionRule rule = ProjectionRule::shift_then_clamp)
{
    const double len = norm(f);
    if (len < 1e-12)
        return {boresight_axis, true};

    const double cap = std::cos(theta_max);
    auto exact = [&](const Vec3 &v) {
        const Vec3 u = (1.0 / norm(v)) * v;
        if (u.z >= cap)
            return u;
        const double az = (u.x == 0.0 && u.y == 0.0) ? 0.0 : std::atan2(u.y, u.x);
        return pointing_vector({theta_max, az});
    };

    if (rule == ProjectionRule::exact)
        return {exact(f)};

    Vec3 shifted = f;
    if (f.z < cap)
        shifted = f - (f.z - cap) * boresight_axis;
    const double shifted_len = norm(shifted);
    if (shifted_len < 1e-12)
        return {exact(f)};
    const Vec3 u = (1.0 / shifted_len) * shifted;
    if (u.z >= cap - 1e-9)
        return {u};
    return {exact(u)};
}

struct AntennaSolution
{
    PointingVector f;
    double objective = 0.0;
    std::size_t iterations = 0;
    RVector trajectory; // objective after every accepted step, starting with L(f0)
    std::vector<PointingVector> iterates; // f after every accepted step, starting with f0
};

/// Projected gradient ascent from one start; halves the step until the
/// projected step increases the objective.
inline AntennaSolution optimize_antenna(const OrientationProblem &problem, const OptimizerConfig &cfg,
                                        const PointingVector &f0)
{
    AntennaSolution sol{f0, objective(problem, f0), 0, {}, {}};
    sol.trajectory.push_back(sol.objective);
    sol.iterates.push_back(f0);
    const double mu_max = problem.max_weight();
    if (!(mu_max > 0.0))
        return sol;
    const double step0 = cfg.step > 0.0 ? cfg.step : 0.1 / mu_max;

    for (std::size_t it = 0; it < cfg.max_iters; ++it)
    {
        const Vec3 g = gradient(problem, sol.f);
        if (norm(g) == 0.0)
            break;
        double step = step0;
        bool accepted = false;
        PointingVector next;
        double next_value = 0.0;
        for (std::size_t h = 0; h <= cfg.max_halvings; ++h, step *= 0.5)
        {
            next = project_feasible(sol.f + step * g, problem.theta_max, cfg.rule).f;
            next_value = objective(problem, next);
            if (next_value > sol.objective)
            {
                accepted = true;
                break;
            }
        }
        if (!accepted)
            break;
        const double gain = next_value - sol.objective;
        sol.f = next;
        sol.objective = next_value;
        sol.trajectory.push_back(next_value);
        sol.iterates.push_back(next);
        ++sol.iterations;
        if (gain <= cfg.tol * std::abs(next_value))
            break;
    }
    return sol;
}

namespace detail
{

inline PointingVector random_cap_point(Rng &rng, double theta_max)
{
    const double z = rng.uniform(std::cos(theta_max), 1.0);
    const double az = rng.uniform(0.0, 2.0 * pi);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {s * std::cos(az), s * std::sin(az), z};
}

// Extra starts shared by every antenna: user directions by descending weight,
// then uniform random cap points.
inline std::vector<PointingVector> shared_starts(const OrientationProblem &problem, const OptimizerConfig &cfg)
{
    std::vector<std::size_t> order(problem.directions.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return problem.weights[a] > problem.weights[b]; });
    std::vector<PointingVector> starts;
    for (auto k : order)
        starts.push_back(project_feasible(problem.directions[k], problem.theta_max, ProjectionRule::exact).f);
    const std::size_t used = 1 + starts.size();
    for (std::size_t r = used; r < cfg.restarts; ++r)
    {
        Rng rng(derive_seed(cfg.seed, {stream::optimizer, r}));
        starts.push_back(random_cap_point(rng, problem.theta_max));
    }
    return starts;
}

inline AntennaSolution best_of(const OrientationProblem &problem, const OptimizerConfig &cfg,
                               const PointingVector &f0, const std::vector<PointingVector> &starts)
{
    AntennaSolution best = optimize_antenna(problem, cfg, f0);
    for (const auto &s : starts)
    {
        auto cand = optimize_antenna(problem, cfg, s);
        if (cand.objective > best.objective)
            best = std::move(cand);
    }
    return best;
}

} // namespace detail

struct OrientationSolution
{
    std::vector<PointingVector> f;
    OrientationMatrix angles;
    RVector antenna_objective;
    double objective = 0.0; // sum over antennas
    std::size_t iterations = 0;
    RVector trajectory; // of the winning start of antenna 0
};

/// Solves every antenna's subproblem and converts the boresights back to
/// deflection angles.
inline OrientationSolution optimize_all(const OrientationProblem &problem, const OptimizerConfig &cfg,
                                        const OrientationMatrix &initial, AntennaMode mode = AntennaMode::broadcast)
{
    problem.validate();
    cfg.validate();
    if (initial.empty())
        throw dimension_error("optimize_all: empty orientation matrix");
    const auto starts = detail::shared_starts(problem, cfg);
    const auto f0 = boresights(initial);

    std::vector<AntennaSolution> per(f0.size());
    if (mode == AntennaMode::broadcast)
    {
        auto all_starts = starts;
        for (std::size_t n = 1; n < f0.size(); ++n)
            all_starts.push_back(f0[n]);
        const auto best = detail::best_of(problem, cfg, f0[0], all_starts);
        std::fill(per.begin(), per.end(), best);
    }
    else
    {
        for (std::size_t n = 0; n < f0.size(); ++n)
            per[n] = detail::best_of(problem, cfg, f0[n], starts);
    }

    OrientationSolution out;
    for (const auto &s : per)
    {
        out.f.push_back(s.f);
        auto a = deflection_angles(s.f);
        a.zenith = std::min(a.zenith, problem.theta_max);
        out.angles.push_back(a);
        out.antenna_objective.push_back(s.objective);
        out.objective += s.objective;
        out.iterations += s.iterations;
    }
    out.trajectory = per.front().trajectory;
    return out;
}

} // namespace ratrain
