// Copyright 2026 The ansim Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// test_cli.cpp                                                   -*-C++-*-
#include <json.hpp>

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct Outcome {
    int         code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Outcome cli(const std::string& args, const std::string& env = "")
{
    static int counter = 0;
    const std::string base = ::testing::TempDir() + "an_sim_cli_" +
                             std::to_string(++counter);
    const std::string out = base + ".out";
    const std::string err = base + ".err";
    const std::string cmd = "env -u AN_SIM_SEED " + env + " " ANSIM_CLI " " +
                            args + " >" + out + " 2>" + err;
    Outcome o;
    const int status = std::system(cmd.c_str());
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    o.out = slurp(out);
    o.err = slurp(err);
    std::remove(out.c_str());
    std::remove(err.c_str());
    return o;
}

const std::string kFire = ANSIM_TEST_DATA "/fire_sensor.json";

}  // namespace

TEST(Cli, RunPrintsOneJsonDocument)
{
    const auto o = cli("run paper-case1");
    ASSERT_EQ(o.code, 0) << o.err;
    const auto j = nlohmann::json::parse(o.out);  // throws on trailing junk
    EXPECT_EQ(j["scenario"], "paper-case1");
    EXPECT_EQ(j["profile"], "plain");
    EXPECT_TRUE(o.err.empty()) << o.err;
}

TEST(Cli, SameSeedSameOutput)
{
    const auto a = cli("run " + kFire + " --seed 7");
    const auto b = cli("run --scenario " + kFire + " --seed 7");
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(nlohmann::json::parse(a.out)["seed"], 7);
}

TEST(Cli, SeedFromEnvironment)
{
    const auto a = cli("run " + kFire, "AN_SIM_SEED=31");
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(nlohmann::json::parse(a.out)["seed"], 31);
    const auto b = cli("run " + kFire + " --seed 4", "AN_SIM_SEED=31");
    EXPECT_EQ(nlohmann::json::parse(b.out)["seed"], 4);
}

TEST(Cli, ProfileOverride)
{
    const auto o = cli("run paper-case1 --profile auth-encap");
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_EQ(nlohmann::json::parse(o.out)["profile"], "auth-encap");
    EXPECT_EQ(cli("run paper-case1 --profile bogus").code, 1);
}

TEST(Cli, TraceFile)
{
    const std::string trace = ::testing::TempDir() + "cli_trace.tsv";
    const auto o = cli("run " + kFire + " --trace " + trace);
    ASSERT_EQ(o.code, 0) << o.err;
    std::istringstream in(slurp(trace));
    std::string line;
    long long last = -1;
    int lines = 0;
    while (std::getline(in, line)) {
        ++lines;
        std::istringstream fields(line);
        std::string f[6];
        for (auto& x : f) std::getline(fields, x, '\t');
        ASSERT_FALSE(f[5].empty()) << line;
        const long long at = std::stoll(f[0]);
        EXPECT_GE(at, last);
        last = at;
    }
    EXPECT_GT(lines, 100);
    std::remove(trace.c_str());
}

TEST(Cli, OutFileAndCsv)
{
    const std::string path = ::testing::TempDir() + "cli_report.csv";
    const auto o = cli("run paper-case2 --format csv --out " + path);
    ASSERT_EQ(o.code, 0) << o.err;
    EXPECT_TRUE(o.out.empty());
    const std::string csv = slurp(path);
    EXPECT_EQ(csv.rfind("profile,category,bytes\nauth,control,", 0), 0u) << csv;
    std::remove(path.c_str());
}

TEST(Cli, ConfigErrorsExitOne)
{
    EXPECT_EQ(cli("run /nonexistent.json").code, 1);
    EXPECT_EQ(cli("run").code, 1);
    EXPECT_EQ(cli("frobnicate").code, 1);
    EXPECT_EQ(cli("compare paper-case1 --profile plain").code, 1);
    EXPECT_EQ(cli("compare paper-case1 --trace x.tsv").code, 1);

    const std::string bad = ::testing::TempDir() + "bad_scenario.json";
    std::ofstream(bad) << R"({"nodes": [], "colour": 1})";
    const auto o = cli("validate " + bad);
    EXPECT_EQ(o.code, 1);
    EXPECT_NE(o.err.find("colour: unknown key"), std::string::npos) << o.err;
    EXPECT_NE(o.err.find("nodes:"), std::string::npos) << o.err;
    std::remove(bad.c_str());
}

TEST(Cli, HelpExitsZero)
{
    EXPECT_EQ(cli("--help").code, 0);
    EXPECT_EQ(cli("run --help").code, 0);
}

TEST(Cli, Validate)
{
    const auto o = cli("validate " + kFire);
    ASSERT_EQ(o.code, 0);
    const auto j = nlohmann::json::parse(o.out);
    EXPECT_EQ(j["valid"], true);
    EXPECT_EQ(j["nodes"], 5);
}

TEST(Cli, CompareRatios)
{
    const auto o = cli("compare paper-case3");
    ASSERT_EQ(o.code, 0) << o.err;
    const auto j = nlohmann::json::parse(o.out);
    const double ep = j["ratios"]["encap_plain"];
    const double ea = j["ratios"]["encap_auth"];
    EXPECT_GE(ep, 3.5);
    EXPECT_LE(ep, 4.5);
    EXPECT_GE(ea, 2.5);
    EXPECT_LE(ea, 3.5);
}

TEST(Cli, PaperCasesWarnUnlessNormalized)
{
    const auto warned = cli("compare --paper-cases");
    ASSERT_EQ(warned.code, 0) << warned.err;
    EXPECT_NE(warned.err.find("warning"), std::string::npos);
    const auto j = nlohmann::json::parse(warned.out);
    EXPECT_EQ(j["cases"].size(), 3u);
    EXPECT_TRUE(j["normalized_nodes"].is_null());

    const auto even = cli("compare --paper-cases --normalize-nodes 7");
    ASSERT_EQ(even.code, 0) << even.err;
    EXPECT_TRUE(even.err.empty()) << even.err;
    const auto k = nlohmann::json::parse(even.out);
    EXPECT_EQ(k["normalized_nodes"], 7);
    for (const auto& c : k["cases"]) {
        EXPECT_EQ(c["comparison"]["runs"][0]["scenario"], c["scenario"]);
    }

    const auto csv = cli("compare --paper-cases --normalize-nodes 7 --format csv");
    EXPECT_EQ(csv.out.rfind("scenario,profile,category,bytes\n", 0), 0u);
    EXPECT_EQ(std::count(csv.out.begin(), csv.out.end(), '\n'), 1 + 3 * 3 * 4);
}
