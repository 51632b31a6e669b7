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

// Command-line front end.
//
//   ratrain spectrum        averaged MUSIC spectra at the spectrum SNR
//   ratrain nmse-snr        NMSE versus SNR
//   ratrain nmse-n          NMSE versus number of antennas
//   ratrain trial           one training period with its block trace
//   ratrain validate-config parse and check a configuration
//
// Exit codes: 0 success, 1 internal error, 2 configuration or usage error,
// 3 every trial failed.

#include "ratrain/ratrain.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace
{

using namespace ratrain;

constexpr int exit_config = 2;
constexpr int exit_failed = 3;

struct Options
{
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::size_t> threads;
    std::optional<double> snr_db;
    std::string scheme;
    std::string out;
    std::string format = "csv";
};

void add_common(CLI::App *cmd, Options &o)
{
    cmd->add_option("--config", o.config, "JSON scenario file (defaults when omitted)")->check(CLI::ExistingFile);
    cmd->add_option("--seed", o.seed, "root seed (overrides the config)");
    cmd->add_option("--trials", o.trials, "Monte-Carlo trials (overrides the config)")->check(CLI::PositiveNumber);
    cmd->add_option("--scheme", o.scheme, "scheme id or 'all'");
    cmd->add_option("--out", o.out, "output directory (stdout when omitted)");
    cmd->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--threads", o.threads, "worker threads, 0 = all cores (results do not depend on it)");
}

ScenarioConfig resolve(const Options &o, const std::string &default_scheme)
{
    auto cfg = o.config.empty() ? ScenarioConfig::defaults() : load_config(o.config);
    if (o.seed)
        cfg.seed = *o.seed;
    if (o.trials)
        cfg.trials = *o.trials;
    if (o.threads)
        cfg.threads = *o.threads;
    const std::string scheme = o.scheme.empty() ? default_scheme : o.scheme;
    if (scheme == "all")
        cfg.schemes.assign(std::begin(all_schemes), std::end(all_schemes));
    else if (!scheme.empty())
        cfg.schemes = {scheme_from_string(scheme)};
    cfg.validate();
    return cfg;
}

void emit(const Options &o, const std::string &stem, const std::string &text)
{
    if (o.out.empty())
    {
        std::cout << text;
        return;
    }
    std::filesystem::create_directories(o.out);
    const auto path = (std::filesystem::path(o.out) / (stem + "." + o.format)).string();
    write_text(path, text);
    std::cerr << "wrote " << path << '\n';
}

int run_sweep_command(const Options &o, SweepKind kind, const std::string &stem)
{
    const auto cfg = resolve(o, "");
    const auto report = run_sweep(cfg, kind);
    emit(o, stem, o.format == "json" ? report_json(report, cfg).dump(2) + "\n" : report_csv(report));
    const bool all_failed =
        std::all_of(report.points.begin(), report.points.end(), [](const NMSEPoint &p) { return p.failed; });
    if (all_failed)
    {
        std::cerr << "error: every trial failed at every sweep point\n";
        return exit_failed;
    }
    return 0;
}

int run_spectrum(const Options &o)
{
    const auto cfg = resolve(o, "");
    const auto table = emit_spectrum(cfg, cfg.schemes, cfg.seed);
    emit(o, "spectrum", o.format == "json" ? spectrum_json(table, cfg).dump(2) + "\n" : spectrum_csv(table));
    return 0;
}

int run_trial(const Options &o)
{
    const auto cfg = resolve(o, "proposed");
    const double snr = o.snr_db ? *o.snr_db : cfg.spectrum_snr_db;
    const auto seed = trial_seed(cfg.seed, 0);
    bool any_ok = false;
    for (auto scheme : cfg.schemes)
    {
        const auto r = run_training_period(cfg, scheme, seed, snr);
        std::optional<double> score;
        if (!r.failed)
        {
            score = score_trial(cfg, cfg.array(), r);
            any_ok = true;
        }
        const std::string stem = "trial_" + to_string(scheme);
        emit(o, stem, o.format == "json" ? trial_json(r, cfg, scheme, cfg.seed, snr, score).dump(2) + "\n"
                                         : trial_csv(r));
        std::cerr << to_string(scheme) << ": nmse " << (score ? fmt_num(*score) : std::string("failed")) << '\n';
    }
    if (!any_ok)
    {
        std::cerr << "error: training failed for every scheme\n";
        return exit_failed;
    }
    return 0;
}

int run_validate(const Options &o)
{
    const auto cfg = resolve(o, "");
    std::cout << "ok " << hex64(config_hash(cfg)) << '\n';
    if (o.format == "json")
        std::cout << to_json(cfg).dump(2) << '\n';
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Channel training and orientation design for rotatable-antenna arrays"};
    app.require_subcommand(1);

    Options o;
    auto *spectrum = app.add_subcommand("spectrum", "trial-averaged MUSIC spectra per scheme");
    auto *nmse_snr = app.add_subcommand("nmse-snr", "NMSE versus SNR");
    auto *nmse_n = app.add_subcommand("nmse-n", "NMSE versus number of antennas");
    auto *trial = app.add_subcommand("trial", "single training period with full block trace");
    auto *validate = app.add_subcommand("validate-config", "parse and validate a configuration");
    for (auto *cmd : {spectrum, nmse_snr, nmse_n, trial, validate})
        add_common(cmd, o);
    trial->add_option("--snr", o.snr_db, "SNR in dB (default: the config's spectrum SNR)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_config;
    }

    try
    {
        if (*spectrum)
            return run_spectrum(o);
        if (*nmse_snr)
            return run_sweep_command(o, SweepKind::snr, "nmse_snr");
        if (*nmse_n)
            return run_sweep_command(o, SweepKind::antennas, "nmse_n");
        if (*trial)
            return run_trial(o);
        return run_validate(o);
    }
    catch (const config_error &e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return exit_config;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
