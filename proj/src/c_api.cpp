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

// c_api.cpp                                                      -*-C++-*-
#include <ansim/ansim.h>

#include <ansim/metrics.hpp>
#include <ansim/scenario.hpp>
#include <ansim/simulation.hpp>

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>

struct ansim_scenario {
    ansim::ScenarioConfig config;
};

struct ansim_report {
    ansim::RunReport report;
};

struct ansim_comparison {
    ansim::ComparisonReport report;
};

namespace {

thread_local std::string g_last_error;

ansim_status fail(ansim_status status, std::string message)
{
    g_last_error = std::move(message);
    return status;
}

ansim_status ok()
{
    g_last_error.clear();
    return ANSIM_OK;
}

char* duplicate(const std::string& s)
{
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out != nullptr) {
        std::memcpy(out, s.c_str(), s.size() + 1);
    }
    return out;
}

ansim_status give_string(const std::string& s, char** out)
{
    *out = duplicate(s);
    if (*out == nullptr) {
        return fail(ANSIM_ERR_INTERNAL, "out of memory");
    }
    return ok();
}

std::string join_lines(const std::vector<std::string>& lines)
{
    std::string out;
    for (const auto& l : lines) {
        if (!out.empty()) {
            out += '\n';
        }
        out += l;
    }
    return out;
}

ansim_status status_of(const ansim::Error& e)
{
    if (e.code() == "Io") {
        return ANSIM_ERR_IO;
    }
    if (e.code() == "InvalidProfile") {
        return ANSIM_ERR_CONFIG;
    }
    return ANSIM_ERR_INTERNAL;
}

template <class F>
ansim_status guarded(F&& f)
{
    try {
        return f();
    }
    catch (const ansim::Error& e) {
        return fail(status_of(e), e.what());
    }
    catch (const std::exception& e) {
        return fail(ANSIM_ERR_INTERNAL, e.what());
    }
    catch (...) {
        return fail(ANSIM_ERR_INTERNAL, "unknown failure");
    }
}

ansim_status parse_into(const std::string& text, ansim_scenario** out)
{
    auto parsed = ansim::parse_scenario(text);
    if (!parsed.ok()) {
        return fail(ANSIM_ERR_CONFIG, join_lines(parsed.errors));
    }
    *out = new ansim_scenario{std::move(*parsed.config)};
    return ok();
}

}  // namespace

extern "C" {

const char* ansim_version(void) { return "1.0.0"; }

const char* ansim_last_error(void) { return g_last_error.c_str(); }

void ansim_string_free(char* s) { std::free(s); }

size_t ansim_bundled_count(void)
{
    return ansim::bundled_scenario_names().size();
}

const char* ansim_bundled_name(size_t index)
{
    static const std::vector<std::string> names =
        ansim::bundled_scenario_names();
    return index < names.size() ? names[index].c_str() : nullptr;
}

ansim_status ansim_scenario_parse(const char* json, ansim_scenario** out)
{
    if (json == nullptr || out == nullptr) {
        return fail(ANSIM_ERR_INVALID_ARGUMENT, "null argument");
    }
    return guarded([&] { return parse_into(json, out); });
}

ansim_status ansim_scenario_load(const char* path_or_name, ansim_scenario** out)
{
    if (path_or_name == nullptr || out == nullptr) {
        return fail(ANSIM_ERR_INVALID_ARGUMENT, "null argument");
    }
    return guarded([&] {
        return parse_into(ansim::read_scenario_text(path_or_name), out);
    });
}

ansim_status ansim_scenario_set_profile(ansim_scenario* s, const char* profile)
{
    if (s == nullptr || profile == nullptr) {
        return fail(ANSIM_ERR_INVALID_ARGUMENT, "null argument");
    }
    const auto p = ansim::profile_from_string(profile);
    if (!p) {
        return fail(ANSIM_ERR_CONFIG, std::string("profile: unknown profile '") +
                                          profile +
                                          "' (plain, auth, auth-encap)");
    }
    ansim::ScenarioConfig next = s->config;
    next.profile = *p;
    const auto errors = ansim::validate(next);
    if (!errors.empty()) {
        return fail(ANSIM_ERR_CONFIG, join_lines(errors));
    }
    s->config = std::move(next);
    return ok();
}

ansim_status ansim_scenario_set_seed(ansim_scenario* s, uint64_t seed)
{
    if (s == nullptr) {
        return fail(ANSIM_ERR_INVALID_ARGUMENT, "null argument");
    }
    s->config.seed = seed;
    return ok();
}

ansim_status ansim_scenario_normalize_nodes(ansim_scenario* s, uint32_t count)
{
    if (s == nullptr || count == 0) {
        return fail(ANSIM_ERR_INVALID_ARGUMENT,
                    "scenario required and count must be positive");
    }
    return guarded([&] {
        s->config = ansim::normalize_nodes(std::move(s->config), count);
        return ok();
    });
}

uint32_t ansim_scenario_node_count(const ansim_scenario* s)
{
    return s == nullptr ? 0 : static_cast<uint32_t>(s->config.nodes.size());
}

ansim_status ansim_scenario_to_json(const ansim_scenario* s, char** out)
{
    if (s == nullptr || out == nullptr) {
        return fail(ANSIM_ERR_INVALID_ARGUMENT, "null argument");
    }
    return guarded([&] { return give_string(ansim::serialize(s->config), out); });
}

void ansim_scenario_free(ansim_scenario* s) { delete s; }

ansim_status ansim_run(const ansim_scenario* s, const char* trace_path,
                       ansim_report** out)
{
    if (s == nullptr || out == nullptr) {
        return fail(ANSIM_ERR_INVALID_ARGUMENT, "null argument");
    }
    return guarded([&] {
        std::ofstream trace;
        ansim::RunOptions opts;
        if (trace_path != nullptr) {
            trace.open(trace_path, std::ios::binary | std::ios::trunc);
            if (!trace) {
                return fail(ANSIM_ERR_IO, std::string("cannot write trace '") +
                                              trace_path + "'");
            }
            opts.trace = &trace;
        }
        auto result = ansim::run_scenario(s->config, opts);
        if (trace_path != nullptr) {
            trace.flush();
            if (!trace) {
                return fail(ANSIM_ERR_IO, std::string("failed writing '") +
                                              trace_path + "'");
            }
        }
        *out = new ansim_report{std::move(result.report)};
        return ok();
    });
}

ansim_status ansim_report_json(const ansim_report* r, char** out)
{
    if (r == nullptr || out == nullptr) {
        return fail(ANSIM_ERR_INVALID_ARGUMENT, "null argument");
    }
    return guarded([&] {
        return give_string(ansim::to_json(r->report).dump(2) + "\n", out);
    });
}

ansim_status ansim_report_csv(const ansim_report* r, char** out)
{
    if (r == nullptr || out == nullptr) {
        return fail(ANSIM_ERR_INVALID_ARGUMENT, "null argument");
    }
    return guarded([&] { return give_string(ansim::to_csv(r->report), out); });
}

int ansim_report_converged(const ansim_report* r)
{
    return r != nullptr && r->report.converged() ? 1 : 0;
}

uint64_t ansim_report_bytes_wire(const ansim_report* r)
{
    return r == nullptr ? 0 : r->report.bytes_wire;
}

void ansim_report_free(ansim_report* r) { delete r; }

ansim_status ansim_compare(const ansim_scenario* s, ansim_comparison** out)
{
    if (s == nullptr || out == nullptr) {
        return fail(ANSIM_ERR_INVALID_ARGUMENT, "null argument");
    }
    return guarded([&] {
        for (ansim::ProfileKind p : ansim::kAllProfiles) {
            try {
                (void)ansim::SecurityProfile::make(p, s->config.security);
            }
            catch (const ansim::Error& e) {
                return fail(ANSIM_ERR_CONFIG,
                            std::string("security: ") + e.what());
            }
        }
        *out = new ansim_comparison{ansim::compare_profiles(s->config)};
        return ok();
    });
}

ansim_status ansim_comparison_json(const ansim_comparison* c, char** out)
{
    if (c == nullptr || out == nullptr) {
        return fail(ANSIM_ERR_INVALID_ARGUMENT, "null argument");
    }
    return guarded([&] {
        return give_string(ansim::to_json(c->report).dump(2) + "\n", out);
    });
}

ansim_status ansim_comparison_csv(const ansim_comparison* c, char** out)
{
    if (c == nullptr || out == nullptr) {
        return fail(ANSIM_ERR_INVALID_ARGUMENT, "null argument");
    }
    return guarded([&] { return give_string(ansim::to_csv(c->report), out); });
}

double ansim_comparison_ratio(const ansim_comparison* c, ansim_ratio which)
{
    if (c == nullptr) {
        return 0.0;
    }
    switch (which) {
    case ANSIM_RATIO_ENCAP_PLAIN: return c->report.ratio_encap_plain;
    case ANSIM_RATIO_ENCAP_AUTH: return c->report.ratio_encap_auth;
    case ANSIM_RATIO_AUTH_PLAIN: return c->report.ratio_auth_plain;
    }
    return 0.0;
}

int ansim_comparison_converged(const ansim_comparison* c)
{
    return c != nullptr && c->report.plain.converged() &&
                   c->report.auth.converged() &&
                   c->report.auth_encap.converged()
               ? 1
               : 0;
}

void ansim_comparison_free(ansim_comparison* c) { delete c; }

}  // extern "C"
