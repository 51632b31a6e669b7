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
/// Scenario configuration and its strict JSON representation.

#pragma once

#include "ratrain/channel.hpp"
#include "ratrain/estimation.hpp"
#include "ratrain/optimizer.hpp"
#include "ratrain/signal.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace ratrain
{

enum class Scheme
{
    proposed,
    random_orientation,
    no_adjustment,
    isotropic,
};

inline constexpr Scheme all_schemes[] = {Scheme::proposed, Scheme::random_orientation, Scheme::no_adjustment,
                                         Scheme::isotropic};

inline std::string to_string(Scheme s)
{
    switch (s)
    {
    case Scheme::proposed: return "proposed";
    case Scheme::random_orientation: return "random-orientation";
    case Scheme::no_adjustment: return "no-adjustment";
    case Scheme::isotropic: return "isotropic";
    }
    return "?";
}

inline Scheme scheme_from_string(const std::string &s)
{
    for (auto v : all_schemes)
        if (to_string(v) == s)
            return v;
    throw config_error("unknown scheme '" + s + "'");
}

// How the SNR in the configuration maps to a noise power.
enum class SnrReference
{
    transmit,          // rho = p / sigma^2
    isotropic_receive, // rho = p |beta|^2 / sigma^2, the per-element SNR of an isotropic antenna
};

// How an antenna count N is laid out in the antenna sweep.
enum class ArrayLayout
{
    column,      // n_x = 1, n_y = N
    row,         // n_x = N, n_y = 1
    near_square, // n_x * n_y = N with n_x <= n_y as close as possible
};

struct UserConfig
{
    double distance_m = 100.0;
    double elevation_deg = 0.0;
    double azimuth_deg = 0.0;
    double power_db = 0.0;

    UserGeometry geometry() const { return {distance_m, deg2rad(elevation_deg), deg2rad(azimuth_deg)}; }
    double power() const { return std::pow(10.0, power_db / 10.0); }
};

struct ScenarioConfig
{
    // array
    std::size_t n_x = 1;
    std::size_t n_y = 16;
    double wavelength_m = 0.125;
    double spacing_m = 0.0; // 0 selects lambda / 2

    std::vector<UserConfig> users = {{100.0, 15.4, 0.0, 0.0}, {100.0, 30.7, 0.0, 0.0}, {100.0, 45.1, 0.0, 0.0}};

    // pattern
    double pattern_p = 4.0;
    double pattern_g0 = 0.0; // 0 selects 2(2p + 1)

    double theta_max_deg = 30.0;

    // training period
    std::size_t training_slots = 60;
    std::size_t blocks = 6;
    bool accumulate_covariance = false;

    GridSpec grid{};

    SnrReference snr_reference = SnrReference::isotropic_receive;
    RVector snr_sweep_db = {-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0};
    double spectrum_snr_db = 5.0;

    std::vector<std::size_t> antenna_counts = {4, 8, 16, 36, 64};
    ArrayLayout antenna_layout = ArrayLayout::column;
    double antenna_sweep_snr_db = 5.0;

    std::size_t trials = 200;
    std::uint64_t seed = 1;
    DirectionConvention convention = DirectionConvention::standard_spherical;
    std::vector<Scheme> schemes = {std::begin(all_schemes), std::end(all_schemes)};
    PilotKind pilots = PilotKind::random_phase;

    SpectrumForm spectrum_form = SpectrumForm::normalized;
    double min_peak_to_median_db = 3.0;
    double min_visible_gain_db = -30.0;

    std::size_t optimizer_max_iters = 500;
    double optimizer_tol = 1e-12;
    std::size_t optimizer_restarts = 8;
    ProjectionRule projection = ProjectionRule::shift_then_clamp;
    AntennaMode antenna_mode = AntennaMode::broadcast;

    std::size_t threads = 0; // 0 = hardware concurrency; never changes results

    std::size_t users_count() const { return users.size(); }
    double theta_max() const { return deg2rad(theta_max_deg); }

    ArrayConfig array() const { return array_with(n_x, n_y); }

    ArrayConfig array_with(std::size_t nx, std::size_t ny) const
    {
        return {nx, ny, spacing_m > 0.0 ? spacing_m : wavelength_m / 2.0, wavelength_m};
    }

    ArrayConfig array_for_count(std::size_t n) const
    {
        switch (antenna_layout)
        {
        case ArrayLayout::column: return array_with(1, n);
        case ArrayLayout::row: return array_with(n, 1);
        case ArrayLayout::near_square:
        {
            std::size_t nx = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
            while (nx > 1 && n % nx != 0)
                --nx;
            return array_with(nx, n / nx);
        }
        }
        return array_with(1, n);
    }

    GainPattern pattern() const { return pattern_g0 > 0.0 ? GainPattern{pattern_p, pattern_g0} : GainPattern::cosine(pattern_p); }

    std::size_t slots_per_block() const { return blocks == 0 ? 0 : training_slots / blocks; }

    SpectrumOptions spectrum_options() const { return {spectrum_form, convention, 1e-12, min_visible_gain_db}; }

    OptimizerConfig optimizer(std::uint64_t seed_value) const
    {
        OptimizerConfig c;
        c.max_iters = optimizer_max_iters;
        c.tol = optimizer_tol;
        c.restarts = optimizer_restarts;
        c.rule = projection;
        c.seed = seed_value;
        return c;
    }

    void validate() const
    {
        array().validate();
        if (users.empty())
            throw config_error("config: at least one user required");
        for (const auto &u : users)
        {
            u.geometry().validate();
            if (!std::isfinite(u.power_db))
                throw config_error("config: user power must be finite");
        }
        if (users.size() >= array().size())
            throw config_error("config: need fewer users than antennas (K < N)");
        pattern().validate();
        if (!(theta_max_deg >= 0.0 && theta_max_deg <= 90.0))
            throw config_error("config: theta_max_deg outside [0, 90]");
        if (blocks < 1 || training_slots % blocks != 0)
            throw config_error("config: training_slots must split evenly into blocks");
        if (slots_per_block() < users.size())
            throw config_error("config: slots per block must be at least the number of users");
        grid.validate();
        if (trials < 1)
            throw config_error("config: trials must be at least 1");
        if (schemes.empty())
            throw config_error("config: no schemes selected");
        for (auto n : antenna_counts)
            if (n <= users.size())
                throw config_error("config: every antenna count must exceed the number of users");
        for (double s : snr_sweep_db)
            if (!std::isfinite(s))
                throw config_error("config: SNR values must be finite");
        if (!(wavelength_m > 0.0) || spacing_m < 0.0)
            throw config_error("config: wavelength must be positive and spacing non-negative");
        if (pattern_g0 < 0.0)
            throw config_error("config: g0 must be positive or \"auto\"");
    }

    static ScenarioConfig defaults() { return {}; }
};

namespace detail
{

using nlohmann::json;

template <typename E>
struct EnumNames;

template <>
struct EnumNames<SnrReference>
{
    static constexpr std::pair<SnrReference, const char *> values[] = {
        {SnrReference::transmit, "transmit"}, {SnrReference::isotropic_receive, "isotropic_receive"}};
};
template <>
struct EnumNames<ArrayLayout>
{
    static constexpr std::pair<ArrayLayout, const char *> values[] = {
        {ArrayLayout::column, "column"}, {ArrayLayout::row, "row"}, {ArrayLayout::near_square, "near_square"}};
};
template <>
struct EnumNames<DirectionConvention>
{
    static constexpr std::pair<DirectionConvention, const char *> values[] = {
        {DirectionConvention::standard_spherical, "standard_spherical"},
        {DirectionConvention::elevation_from_y, "elevation_from_y"}};
};
template <>
struct EnumNames<PilotKind>
{
    static constexpr std::pair<PilotKind, const char *> values[] = {{PilotKind::random_phase, "random_phase"},
                                                                    {PilotKind::orthogonal, "orthogonal"}};
};
template <>
struct EnumNames<SpectrumForm>
{
    static constexpr std::pair<SpectrumForm, const char *> values[] = {{SpectrumForm::normalized, "normalized"},
                                                                       {SpectrumForm::gain_weighted, "gain_weighted"}};
};
template <>
struct EnumNames<ProjectionRule>
{
    static constexpr std::pair<ProjectionRule, const char *> values[] = {{ProjectionRule::shift_then_clamp, "shift_then_clamp"},
                                                                         {ProjectionRule::exact, "exact"}};
};
template <>
struct EnumNames<AntennaMode>
{
    static constexpr std::pair<AntennaMode, const char *> values[] = {{AntennaMode::broadcast, "broadcast"},
                                                                      {AntennaMode::per_antenna, "per_antenna"}};
};

template <typename E>
std::string enum_name(E v)
{
    for (const auto &[e, name] : EnumNames<E>::values)
        if (e == v)
            return name;
    return "?";
}

template <typename E>
E enum_value(const json &j, const std::string &key)
{
    if (!j.is_string())
        throw config_error("config: '" + key + "' must be a string");
    const auto s = j.get<std::string>();
    for (const auto &[e, name] : EnumNames<E>::values)
        if (s == name)
            return e;
    throw config_error("config: invalid value '" + s + "' for '" + key + "'");
}

// Object reader that rejects unknown keys.
class Strict
{
  public:
    Strict(const json &j, std::string where) : j_(j), where_(std::move(where))
    {
        if (!j_.is_object())
            throw config_error("config: '" + where_ + "' must be an object");
    }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key()))
                throw config_error("config: unknown key '" + prefix() + it.key() + "'");
    }

    const json *get(const std::string &key)
    {
        seen_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    template <typename T>
    void read(const std::string &key, T &out)
    {
        if (const json *v = get(key))
        {
            try
            {
                if constexpr (std::is_same_v<T, bool>)
                {
                    if (!v->is_boolean())
                        throw config_error("expected a boolean");
                }
                else if constexpr (std::is_unsigned_v<T>)
                {
                    if (!v->is_number_unsigned())
                        throw config_error("expected a non-negative integer");
                }
                else if constexpr (std::is_floating_point_v<T>)
                {
                    if (!v->is_number())
                        throw config_error("expected a number");
                }
                out = v->get<T>();
            }
            catch (const std::exception &e)
            {
                throw config_error("config: bad value for '" + prefix() + key + "': " + e.what());
            }
        }
    }

    template <typename E>
    void read_enum(const std::string &key, E &out)
    {
        if (const json *v = get(key))
            out = enum_value<E>(*v, prefix() + key);
    }

    // Number, or the string "auto" meaning 0.
    void read_auto(const std::string &key, double &out)
    {
        if (const json *v = get(key))
        {
            if (v->is_string() && v->get<std::string>() == "auto")
                out = 0.0;
            else if (v->is_number())
                out = v->get<double>();
            else
                throw config_error("config: '" + prefix() + key + "' must be a number or \"auto\"");
        }
    }

  private:
    std::string prefix() const { return where_.empty() ? "" : where_ + "."; }

    const json &j_;
    std::string where_;
    std::set<std::string> seen_;
};

} // namespace detail

inline nlohmann::json to_json(const ScenarioConfig &c)
{
    using detail::enum_name;
    nlohmann::json j;
    j["array"] = {{"n_x", c.n_x},
                  {"n_y", c.n_y},
                  {"wavelength_m", c.wavelength_m},
                  {"spacing_m", c.spacing_m > 0.0 ? nlohmann::json(c.spacing_m) : nlohmann::json("auto")}};
    j["users"] = nlohmann::json::array();
    for (const auto &u : c.users)
        j["users"].push_back({{"distance_m", u.distance_m},
                              {"elevation_deg", u.elevation_deg},
                              {"azimuth_deg", u.azimuth_deg},
                              {"power_db", u.power_db}});
    j["pattern"] = {{"p", c.pattern_p},
                    {"g0", c.pattern_g0 > 0.0 ? nlohmann::json(c.pattern_g0) : nlohmann::json("auto")}};
    j["theta_max_deg"] = c.theta_max_deg;
    j["training"] = {{"total_slots", c.training_slots},
                     {"blocks", c.blocks},
                     {"accumulate_covariance", c.accumulate_covariance}};
    j["grid"] = {{"elevation_min_deg", c.grid.elevation_min}, {"elevation_max_deg", c.grid.elevation_max},
                 {"elevation_step_deg", c.grid.elevation_step}, {"azimuth_min_deg", c.grid.azimuth_min},
                 {"azimuth_max_deg", c.grid.azimuth_max},       {"azimuth_step_deg", c.grid.azimuth_step},
                 {"two_d", c.grid.two_d}};
    j["snr"] = {{"reference", enum_name(c.snr_reference)},
                {"sweep_db", c.snr_sweep_db},
                {"spectrum_db", c.spectrum_snr_db}};
    j["antenna_sweep"] = {{"counts", c.antenna_counts},
                          {"layout", enum_name(c.antenna_layout)},
                          {"snr_db", c.antenna_sweep_snr_db}};
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    j["convention"] = enum_name(c.convention);
    j["schemes"] = nlohmann::json::array();
    for (auto s : c.schemes)
        j["schemes"].push_back(to_string(s));
    j["pilots"] = enum_name(c.pilots);
    j["estimator"] = {{"spectrum_form", enum_name(c.spectrum_form)},
                      {"min_peak_to_median_db", c.min_peak_to_median_db},
                      {"min_visible_gain_db", c.min_visible_gain_db}};
    j["optimizer"] = {{"max_iters", c.optimizer_max_iters},
                      {"tol", c.optimizer_tol},
                      {"restarts", c.optimizer_restarts},
                      {"projection", enum_name(c.projection)},
                      {"mode", enum_name(c.antenna_mode)}};
    j["threads"] = c.threads;
    return j;
}

/// Parses a configuration document. Missing keys keep their defaults; unknown
/// keys and ill-typed values raise config_error.
inline ScenarioConfig config_from_json(const nlohmann::json &j)
{
    ScenarioConfig c;
    {
        detail::Strict root(j, "");
        if (const auto *a = root.get("array"))
        {
            detail::Strict s(*a, "array");
            s.read("n_x", c.n_x);
            s.read("n_y", c.n_y);
            s.read("wavelength_m", c.wavelength_m);
            s.read_auto("spacing_m", c.spacing_m);
            s.finish();
        }
        if (const auto *u = root.get("users"))
        {
            if (!u->is_array())
                throw config_error("config: 'users' must be an array");
            c.users.clear();
            for (const auto &entry : *u)
            {
                UserConfig uc;
                detail::Strict s(entry, "users[]");
                s.read("distance_m", uc.distance_m);
                s.read("elevation_deg", uc.elevation_deg);
                s.read("azimuth_deg", uc.azimuth_deg);
                s.read("power_db", uc.power_db);
                s.finish();
                c.users.push_back(uc);
            }
        }
        if (const auto *p = root.get("pattern"))
        {
            detail::Strict s(*p, "pattern");
            s.read("p", c.pattern_p);
            s.read_auto("g0", c.pattern_g0);
            s.finish();
        }
        root.read("theta_max_deg", c.theta_max_deg);
        if (const auto *t = root.get("training"))
        {
            detail::Strict s(*t, "training");
            s.read("total_slots", c.training_slots);
            s.read("blocks", c.blocks);
            s.read("accumulate_covariance", c.accumulate_covariance);
            s.finish();
        }
        if (const auto *g = root.get("grid"))
        {
            detail::Strict s(*g, "grid");
            s.read("elevation_min_deg", c.grid.elevation_min);
            s.read("elevation_max_deg", c.grid.elevation_max);
            s.read("elevation_step_deg", c.grid.elevation_step);
            s.read("azimuth_min_deg", c.grid.azimuth_min);
            s.read("azimuth_max_deg", c.grid.azimuth_max);
            s.read("azimuth_step_deg", c.grid.azimuth_step);
            s.read("two_d", c.grid.two_d);
            s.finish();
        }
        if (const auto *n = root.get("snr"))
        {
            detail::Strict s(*n, "snr");
            s.read_enum("reference", c.snr_reference);
            s.read("sweep_db", c.snr_sweep_db);
            s.read("spectrum_db", c.spectrum_snr_db);
            s.finish();
        }
        if (const auto *a = root.get("antenna_sweep"))
        {
            detail::Strict s(*a, "antenna_sweep");
            s.read("counts", c.antenna_counts);
            s.read_enum("layout", c.antenna_layout);
            s.read("snr_db", c.antenna_sweep_snr_db);
            s.finish();
        }
        root.read("trials", c.trials);
        root.read("seed", c.seed);
        root.read_enum("convention", c.convention);
        if (const auto *s = root.get("schemes"))
        {
            if (!s->is_array())
                throw config_error("config: 'schemes' must be an array of names");
            c.schemes.clear();
            for (const auto &name : *s)
            {
                if (!name.is_string())
                    throw config_error("config: scheme names must be strings");
                c.schemes.push_back(scheme_from_string(name.get<std::string>()));
            }
        }
        root.read_enum("pilots", c.pilots);
        if (const auto *e = root.get("estimator"))
        {
            detail::Strict s(*e, "estimator");
            s.read_enum("spectrum_form", c.spectrum_form);
            s.read("min_peak_to_median_db", c.min_peak_to_median_db);
            s.read("min_visible_gain_db", c.min_visible_gain_db);
            s.finish();
        }
        if (const auto *o = root.get("optimizer"))
        {
            detail::Strict s(*o, "optimizer");
            s.read("max_iters", c.optimizer_max_iters);
            s.read("tol", c.optimizer_tol);
            s.read("restarts", c.optimizer_restarts);
            s.read_enum("projection", c.projection);
            s.read_enum("mode", c.antenna_mode);
            s.finish();
        }
        root.read("threads", c.threads);
        root.finish();
    }
    c.validate();
    return c;
}

inline ScenarioConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw config_error("config: cannot open '" + path + "'");
    nlohmann::json j;
    try
    {
        in >> j;
    }
    catch (const nlohmann::json::parse_error &e)
    {
        throw config_error(std::string("config: parse error: ") + e.what());
    }
    return config_from_json(j);
}

/// FNV-1a over the canonical JSON form (threads excluded: they never change results).
inline std::uint64_t config_hash(const ScenarioConfig &c)
{
    auto j = to_json(c);
    j.erase("threads");
    const std::string s = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s)
    {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v)
{
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << v;
    return os.str();
}

} // namespace ratrain
