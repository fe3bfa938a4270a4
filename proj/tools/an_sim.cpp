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

// an_sim.cpp                                                     -*-C++-*-
//
// an_sim run      [--scenario] PATH|NAME [--profile P] [--seed N]
//                 [--trace FILE] [--out FILE] [--format json|csv]
// an_sim compare  [--scenario] PATH|NAME [--seed N] [--out FILE]
//                 [--format json|csv] [--normalize-nodes N]
// an_sim compare  --paper-cases [--normalize-nodes N] ...
// an_sim validate [--scenario] PATH|NAME
//
// Exit codes: 0 clean, 1 configuration or I/O error, 2 convergence failure.

#include <ansim/ansim.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitConvergence = 2;

struct ScenarioDeleter {
    void operator()(ansim_scenario* s) const { ansim_scenario_free(s); }
};
struct ReportDeleter {
    void operator()(ansim_report* r) const { ansim_report_free(r); }
};
struct ComparisonDeleter {
    void operator()(ansim_comparison* c) const { ansim_comparison_free(c); }
};
using ScenarioPtr = std::unique_ptr<ansim_scenario, ScenarioDeleter>;
using ReportPtr = std::unique_ptr<ansim_report, ReportDeleter>;
using ComparisonPtr = std::unique_ptr<ansim_comparison, ComparisonDeleter>;

struct Failure {
    int exit_code;
};

int exit_for(ansim_status st)
{
    return st == ANSIM_ERR_CONVERGENCE ? kExitConvergence : kExitConfig;
}

void check(ansim_status st, const std::string& context)
{
    if (st != ANSIM_OK) {
        std::cerr << "an_sim: " << context << ":\n"
                  << "  " << ansim_last_error() << '\n';
        throw Failure{exit_for(st)};
    }
}

std::string take(char* s)
{
    std::string out = s == nullptr ? "" : s;
    ansim_string_free(s);
    return out;
}

struct Options {
    std::string                  scenario;
    std::string                  scenario_flag;
    std::string                  profile;
    std::optional<std::uint64_t> seed;
    std::string                  trace;
    std::string                  out;
    std::string                  format = "json";
    bool                         paper_cases = false;
    std::uint32_t                normalize = 0;
};

std::string scenario_arg(const Options& o)
{
    if (!o.scenario_flag.empty() && !o.scenario.empty() &&
        o.scenario_flag != o.scenario) {
        std::cerr << "an_sim: give the scenario once, either positionally "
                     "or with --scenario\n";
        throw Failure{kExitConfig};
    }
    std::string s = o.scenario_flag.empty() ? o.scenario : o.scenario_flag;
    if (s.empty()) {
        std::cerr << "an_sim: a scenario path or bundled name is required\n";
        throw Failure{kExitConfig};
    }
    return s;
}

std::optional<std::uint64_t> effective_seed(const Options& o)
{
    if (o.seed) {
        return o.seed;
    }
    const char* env = std::getenv("AN_SIM_SEED");
    if (env == nullptr || *env == '\0') {
        return std::nullopt;
    }
    try {
        std::size_t used = 0;
        const std::string text(env);
        const unsigned long long v = std::stoull(text, &used, 10);
        if (used != text.size() || text.front() == '-') {
            throw std::invalid_argument(text);
        }
        return static_cast<std::uint64_t>(v);
    }
    catch (const std::exception&) {
        std::cerr << "an_sim: AN_SIM_SEED: not an unsigned integer: '" << env
                  << "'\n";
        throw Failure{kExitConfig};
    }
}

ScenarioPtr load(const std::string& path_or_name)
{
    ansim_scenario* raw = nullptr;
    check(ansim_scenario_load(path_or_name.c_str(), &raw),
          "scenario '" + path_or_name + "'");
    return ScenarioPtr(raw);
}

void emit(const Options& o, const std::string& document)
{
    if (o.out.empty()) {
        std::cout << document;
        std::cout.flush();
        return;
    }
    std::ofstream f(o.out, std::ios::binary | std::ios::trunc);
    f << document;
    f.flush();
    if (!f) {
        std::cerr << "an_sim: cannot write '" << o.out << "'\n";
        throw Failure{kExitConfig};
    }
}

int cmd_validate(const Options& o)
{
    const std::string name = scenario_arg(o);
    ScenarioPtr       s = load(name);
    Json              doc;
    doc["scenario"] = name;
    doc["valid"] = true;
    doc["nodes"] = ansim_scenario_node_count(s.get());
    std::cout << doc.dump(2) << '\n';
    return kExitOk;
}

int cmd_run(const Options& o)
{
    ScenarioPtr s = load(scenario_arg(o));
    if (!o.profile.empty()) {
        check(ansim_scenario_set_profile(s.get(), o.profile.c_str()),
              "--profile");
    }
    if (const auto seed = effective_seed(o)) {
        check(ansim_scenario_set_seed(s.get(), *seed), "seed");
    }
    ansim_report* raw = nullptr;
    check(ansim_run(s.get(), o.trace.empty() ? nullptr : o.trace.c_str(), &raw),
          "run");
    ReportPtr r(raw);

    char* text = nullptr;
    check(o.format == "csv" ? ansim_report_csv(r.get(), &text)
                            : ansim_report_json(r.get(), &text),
          "report");
    emit(o, take(text));
    if (!ansim_report_converged(r.get())) {
        std::cerr << "an_sim: a reassignment round did not converge\n";
        return kExitConvergence;
    }
    return kExitOk;
}

struct CaseResult {
    std::string   name;
    ComparisonPtr comparison;
};

CaseResult compare_one(const std::string& name, const Options& o,
                       std::optional<std::uint64_t> seed)
{
    ScenarioPtr s = load(name);
    if (o.normalize > 0) {
        check(ansim_scenario_normalize_nodes(s.get(), o.normalize),
              "--normalize-nodes");
    }
    if (seed) {
        check(ansim_scenario_set_seed(s.get(), *seed), "seed");
    }
    ansim_comparison* raw = nullptr;
    check(ansim_compare(s.get(), &raw), "compare '" + name + "'");
    return CaseResult{name, ComparisonPtr(raw)};
}

int cmd_compare(const Options& o)
{
    if (!o.profile.empty()) {
        std::cerr << "an_sim: compare runs every profile; --profile does not "
                     "apply\n";
        return kExitConfig;
    }
    if (!o.trace.empty()) {
        std::cerr << "an_sim: compare does not write traces; use run\n";
        return kExitConfig;
    }
    const auto seed = effective_seed(o);

    std::vector<std::string> names;
    if (o.paper_cases) {
        if (!o.scenario.empty() || !o.scenario_flag.empty()) {
            std::cerr << "an_sim: --paper-cases takes no scenario\n";
            return kExitConfig;
        }
        std::vector<std::uint32_t> counts;
        for (std::size_t i = 0; i < ansim_bundled_count(); ++i) {
            const std::string n = ansim_bundled_name(i);
            if (n.rfind("paper-case", 0) == 0) {
                names.push_back(n);
                counts.push_back(ansim_scenario_node_count(load(n).get()));
            }
        }
        bool differ = false;
        for (auto c : counts) {
            differ = differ || c != counts.front();
        }
        if (differ && o.normalize == 0) {
            std::cerr << "an_sim: warning: bundled cases use different node "
                         "counts (";
            for (std::size_t i = 0; i < names.size(); ++i) {
                std::cerr << (i ? ", " : "") << names[i] << '=' << counts[i];
            }
            std::cerr << "); pass --normalize-nodes N to compare at equal "
                         "size\n";
        }
    }
    else {
        names.push_back(scenario_arg(o));
    }

    std::vector<CaseResult> results;
    for (const auto& n : names) {
        results.push_back(compare_one(n, o, seed));
    }

    bool converged = true;
    for (const auto& r : results) {
        converged = converged && ansim_comparison_converged(r.comparison.get());
    }

    std::string document;
    if (!o.paper_cases) {
        char* text = nullptr;
        check(o.format == "csv"
                  ? ansim_comparison_csv(results[0].comparison.get(), &text)
                  : ansim_comparison_json(results[0].comparison.get(), &text),
              "report");
        document = take(text);
    }
    else if (o.format == "csv") {
        document = "scenario,profile,category,bytes\n";
        for (const auto& r : results) {
            char* text = nullptr;
            check(ansim_comparison_csv(r.comparison.get(), &text), "report");
            const std::string csv = take(text);
            std::size_t pos = csv.find('\n') + 1;  // skip header
            while (pos < csv.size()) {
                const std::size_t end = csv.find('\n', pos);
                document += r.name + ',' + csv.substr(pos, end - pos) + '\n';
                pos = end + 1;
            }
        }
    }
    else {
        Json doc;
        doc["normalized_nodes"] =
            o.normalize > 0 ? Json(o.normalize) : Json(nullptr);
        Json cases = Json::array();
        for (const auto& r : results) {
            char* text = nullptr;
            check(ansim_comparison_json(r.comparison.get(), &text), "report");
            Json c;
            c["scenario"] = r.name;
            c["comparison"] = Json::parse(take(text));
            cases.push_back(std::move(c));
        }
        doc["cases"] = std::move(cases);
        document = doc.dump(2) + "\n";
    }
    emit(o, document);
    if (!converged) {
        std::cerr << "an_sim: a reassignment round did not converge\n";
        return kExitConvergence;
    }
    return kExitOk;
}

void add_common(CLI::App* cmd, Options& o)
{
    cmd->add_option("path", o.scenario, "Scenario file or bundled name");
    cmd->add_option("--scenario", o.scenario_flag,
                    "Scenario file or bundled name");
}

void add_output(CLI::App* cmd, Options& o)
{
    cmd->add_option("--seed", o.seed, "Seed override (fallback: AN_SIM_SEED)");
    cmd->add_option("--out", o.out, "Write the report here instead of stdout");
    cmd->add_option("--format", o.format, "Report format")
        ->check(CLI::IsMember({"json", "csv"}));
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Active Neighbour network simulator", "an_sim"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ansim_version()));

    Options o;

    CLI::App* run = app.add_subcommand("run", "Run one scenario");
    add_common(run, o);
    add_output(run, o);
    run->add_option("--profile", o.profile, "plain, auth or auth-encap");
    run->add_option("--trace", o.trace, "Write the event trace here");

    CLI::App* compare =
        app.add_subcommand("compare", "Run all three profiles and compare");
    add_common(compare, o);
    add_output(compare, o);
    compare->add_option("--profile", o.profile, "Not accepted");
    compare->add_option("--trace", o.trace, "Not accepted");
    compare->add_flag("--paper-cases", o.paper_cases,
                      "Compare every bundled paper case");
    compare->add_option("--normalize-nodes", o.normalize,
                        "Resize scenarios to N nodes first")
        ->check(CLI::Range(1u, 4096u));

    CLI::App* validate = app.add_subcommand("validate", "Check a scenario");
    add_common(validate, o);

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, std::cerr, std::cerr);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed()) {
            return cmd_run(o);
        }
        if (compare->parsed()) {
            return cmd_compare(o);
        }
        return cmd_validate(o);
    }
    catch (const Failure& f) {
        return f.exit_code;
    }
    catch (const std::exception& e) {
        std::cerr << "an_sim: " << e.what() << '\n';
        return kExitConfig;
    }
}
