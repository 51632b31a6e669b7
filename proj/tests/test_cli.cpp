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

#include <json.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace
{

namespace fs = std::filesystem;

struct Run
{
    int code = -1;
    std::string out;
};

Run run(const std::string &args)
{
    const std::string cmd = std::string(RATRAIN_CLI_PATH) + " " + args + " 2>/dev/null";
    Run r;
    FILE *p = popen(cmd.c_str(), "r");
    if (!p)
        return r;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0)
        r.out.append(buf, n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

fs::path scratch(const std::string &name)
{
    auto dir = fs::temp_directory_path() / ("ratrain_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

fs::path write_config(const fs::path &dir, const nlohmann::json &j)
{
    const auto path = dir / "config.json";
    std::ofstream(path) << j.dump(2);
    return path;
}

const std::string smoke = std::string(RATRAIN_SOURCE_DIR) + "/configs/smoke.json";

TEST(Cli, ValidateConfigAcceptsShippedConfigs)
{
    for (const char *name : {"default.json", "smoke.json"})
    {
        const auto r = run("validate-config --config " + std::string(RATRAIN_SOURCE_DIR) + "/configs/" + name);
        EXPECT_EQ(r.code, 0) << name;
        EXPECT_EQ(r.out.substr(0, 3), "ok ");
    }
}

TEST(Cli, UnknownKeyIsConfigError)
{
    const auto dir = scratch("unknown");
    const auto path = write_config(dir, {{"trials", 2}, {"bogus", 1}});
    EXPECT_EQ(run("validate-config --config " + path.string()).code, 2);
}

TEST(Cli, BadUsageIsNonzero)
{
    EXPECT_NE(run("").code, 0);
    EXPECT_NE(run("nmse-snr --format xml").code, 0);
    EXPECT_NE(run("nmse-snr --scheme oracle --config " + smoke).code, 0);
    EXPECT_NE(run("frobnicate").code, 0);
}

TEST(Cli, NmseSnrCsvHasOneRowPerSchemeAndPoint)
{
    const auto r = run("nmse-snr --config " + smoke + " --scheme all");
    ASSERT_EQ(r.code, 0);
    std::istringstream in(r.out);
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "scheme,snr_db,nmse_mean,nmse_stderr,trials,failures,degraded");
    int rows = 0;
    while (std::getline(in, line))
        ++rows;
    // smoke.json sweeps two SNR values
    EXPECT_EQ(rows, 2 * 4);
}

TEST(Cli, JsonMirrorCarriesProvenance)
{
    const auto r = run("nmse-n --config " + smoke + " --scheme proposed --seed 99 --format json");
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["seed"], 99);
    EXPECT_EQ(j["config_hash"].get<std::string>().size(), 16u);
    EXPECT_EQ(j["sweep"], "antennas");
    for (const auto &p : j["points"])
        EXPECT_EQ(p["scheme"], "proposed");
}

TEST(Cli, OutputDirectoryRerunsAreByteIdentical)
{
    const auto a = scratch("rerun_a");
    const auto b = scratch("rerun_b");
    ASSERT_EQ(run("nmse-snr --config " + smoke + " --out " + a.string()).code, 0);
    ASSERT_EQ(run("nmse-snr --config " + smoke + " --threads 1 --out " + b.string()).code, 0);
    const auto x = slurp(a / "nmse_snr.csv");
    EXPECT_FALSE(x.empty());
    EXPECT_EQ(x, slurp(b / "nmse_snr.csv"));
}

TEST(Cli, SeedChangesResults)
{
    const auto a = run("nmse-snr --config " + smoke + " --seed 1");
    const auto b = run("nmse-snr --config " + smoke + " --seed 2");
    ASSERT_EQ(a.code, 0);
    ASSERT_EQ(b.code, 0);
    EXPECT_NE(a.out, b.out);
}

TEST(Cli, SpectrumCsvColumns)
{
    const auto r = run("spectrum --config " + smoke + " --scheme all");
    ASSERT_EQ(r.code, 0);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')),
              "angle_deg,proposed_db,random-orientation_db,no-adjustment_db,isotropic_db");
}

TEST(Cli, TrialWritesBlockTrace)
{
    const auto dir = scratch("trial");
    ASSERT_EQ(run("trial --config " + smoke + " --format json --out " + dir.string()).code, 0);
    const auto j = nlohmann::json::parse(slurp(dir / "trial_proposed.json"));
    EXPECT_EQ(j["scheme"], "proposed");
    EXPECT_EQ(j["blocks"].size(), 6u);
    EXPECT_TRUE(j.contains("nmse"));
    EXPECT_EQ(j["blocks"][0]["aoas_deg"].size(), 3u);
}

} // namespace
