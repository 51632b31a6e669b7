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
/// CSV and JSON renderings of sweep reports, spectra and training traces.
/// Numbers are printed with a fixed format so reruns are byte-identical.

#pragma once

#include "ratrain/config.hpp"
#include "ratrain/harness.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace ratrain
{

inline std::string fmt_num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

// Embedded config without the thread count, which never affects results.
inline nlohmann::json provenance_config(const ScenarioConfig &cfg)
{
    auto j = to_json(cfg);
    j.erase("threads");
    return j;
}

inline std::string report_csv(const NMSEReport &r)
{
    std::ostringstream os;
    os << "scheme," << to_string(r.kind) << ",nmse_mean,nmse_stderr,trials,failures,degraded\n";
    for (const auto &p : r.points)
    {
        os << to_string(p.scheme) << ',' << fmt_num(p.sweep_value) << ',';
        if (p.failed)
            os << "nan,nan,";
        else
            os << fmt_num(p.mean) << ',' << fmt_num(p.std_error) << ',';
        os << p.trials << ',' << p.failures << ',' << p.degraded << '\n';
    }
    return os.str();
}

inline nlohmann::json report_json(const NMSEReport &r, const ScenarioConfig &cfg)
{
    nlohmann::json j;
    j["sweep"] = to_string(r.kind);
    j["config_hash"] = hex64(r.config_hash);
    j["seed"] = r.seed;
    j["configured_trials"] = r.configured_trials;
    j["config"] = provenance_config(cfg);
    j["points"] = nlohmann::json::array();
    for (const auto &p : r.points)
    {
        nlohmann::json e{{"scheme", to_string(p.scheme)},
                         {"sweep_value", p.sweep_value},
                         {"trials", p.trials},
                         {"failures", p.failures},
                         {"degraded", p.degraded},
                         {"failed", p.failed}};
        if (!p.failed)
        {
            e["nmse_mean"] = p.mean;
            e["nmse_stderr"] = p.std_error;
        }
        j["points"].push_back(e);
    }
    return j;
}

inline std::string spectrum_csv(const SpectrumTable &t)
{
    std::ostringstream os;
    os << "angle_deg";
    for (auto s : t.schemes)
        os << ',' << to_string(s) << "_db";
    os << '\n';
    for (std::size_t i = 0; i < t.angles_deg.size(); ++i)
    {
        os << fmt_num(t.angles_deg[i]);
        for (std::size_t s = 0; s < t.schemes.size(); ++s)
            os << ',' << fmt_num(t.db[s][i]);
        os << '\n';
    }
    return os.str();
}

inline nlohmann::json spectrum_json(const SpectrumTable &t, const ScenarioConfig &cfg)
{
    nlohmann::json j;
    j["config_hash"] = hex64(t.config_hash);
    j["seed"] = t.seed;
    j["snr_db"] = t.snr_db;
    j["trials"] = t.trials;
    j["config"] = provenance_config(cfg);
    j["angles_deg"] = t.angles_deg;
    j["spectra"] = nlohmann::json::object();
    for (std::size_t s = 0; s < t.schemes.size(); ++s)
        j["spectra"][to_string(t.schemes[s])] = t.db[s];
    return j;
}

inline std::string trial_csv(const TrainingResult &r)
{
    std::ostringstream os;
    os << "block,user,elevation_deg,azimuth_deg,gain_re,gain_im,true_sum_gain,failed,degraded\n";
    for (const auto &b : r.trace)
        for (std::size_t k = 0; k < b.aoas.size(); ++k)
        {
            os << b.block << ',' << k << ',' << fmt_num(rad2deg(b.aoas[k].elevation)) << ','
               << fmt_num(rad2deg(b.aoas[k].azimuth)) << ',';
            if (k < b.gains.size())
                os << fmt_num(b.gains[k].real()) << ',' << fmt_num(b.gains[k].imag()) << ',';
            else
                os << "nan,nan,";
            os << fmt_num(b.true_sum_gain) << ',' << (b.failed ? 1 : 0) << ',' << (b.degraded ? 1 : 0) << '\n';
        }
    return os.str();
}

inline nlohmann::json trial_json(const TrainingResult &r, const ScenarioConfig &cfg, Scheme scheme,
                                 std::uint64_t seed, double snr_db, std::optional<double> nmse_value)
{
    auto angles = [](const OrientationMatrix &o) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto &d : o)
            a.push_back({rad2deg(d.zenith), rad2deg(d.azimuth)});
        return a;
    };
    nlohmann::json j;
    j["scheme"] = to_string(scheme);
    j["seed"] = seed;
    j["snr_db"] = snr_db;
    j["config_hash"] = hex64(config_hash(cfg));
    j["failed"] = r.failed;
    j["degraded"] = r.degraded;
    if (nmse_value)
        j["nmse"] = *nmse_value;
    j["blocks"] = nlohmann::json::array();
    for (const auto &b : r.trace)
    {
        nlohmann::json e;
        e["block"] = b.block;
        e["orientation_deg"] = angles(b.orientation);
        e["true_sum_gain"] = b.true_sum_gain;
        e["failed"] = b.failed;
        e["degraded"] = b.degraded;
        e["aoas_deg"] = nlohmann::json::array();
        for (const auto &a : b.aoas)
            e["aoas_deg"].push_back({rad2deg(a.elevation), rad2deg(a.azimuth)});
        e["gains"] = nlohmann::json::array();
        for (const auto &g : b.gains)
            e["gains"].push_back({g.real(), g.imag()});
        j["blocks"].push_back(e);
    }
    j["final_orientation_deg"] = angles(r.final_orientation);
    return j;
}

inline void write_text(const std::string &path, const std::string &text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

} // namespace ratrain
