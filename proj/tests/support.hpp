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

// support.hpp                                                    -*-C++-*-
#pragma once

// Scenario builders and trace parsing shared by the engine-level suites.

#include <ansim/scenario.hpp>
#include <ansim/simulation.hpp>

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace ansim::test {

struct TraceLine {
    SimTime       at = 0;
    std::uint64_t seq = 0;
    std::string   kind;
    std::string   sender;
    std::string   receiver;
    std::size_t   wire = 0;
};

inline std::vector<TraceLine> parse_trace(const std::string& text)
{
    std::vector<TraceLine> out;
    std::istringstream     in(text);
    std::string            line;
    while (std::getline(in, line)) {
        std::istringstream f(line);
        TraceLine          t;
        std::string        at, seq, wire;
        std::getline(f, at, '\t');
        std::getline(f, seq, '\t');
        std::getline(f, t.kind, '\t');
        std::getline(f, t.sender, '\t');
        std::getline(f, t.receiver, '\t');
        std::getline(f, wire, '\t');
        t.at = std::stoll(at);
        t.seq = std::stoull(seq);
        t.wire = std::stoull(wire);
        out.push_back(std::move(t));
    }
    return out;
}

/// Nodes 1..n with the given powers, plain profile, 10 ms links.
inline ScenarioConfig make_scenario(const std::vector<std::uint32_t>& powers,
                                    ProfileKind profile = ProfileKind::Plain)
{
    ScenarioConfig c;
    c.name = "test";
    c.profile = profile;
    c.seed = 1;
    c.duration_ms = 300'000;
    for (std::size_t i = 0; i < powers.size(); ++i) {
        NodeSpec n;
        n.id = NodeId{static_cast<std::uint32_t>(i + 1)};
        n.hardware_id = 0x1000 + i + 1;
        n.processing_power = powers[i];
        c.nodes.push_back(n);
    }
    return c;
}

inline FaultSpec fault(std::uint32_t target, FaultKind kind, SimTime at,
                       std::uint32_t count = 0)
{
    return FaultSpec{NodeId{target}, kind, count, at};
}

struct Traced {
    RunResult              result;
    std::string            trace;
    std::vector<TraceLine> lines;
};

inline Traced traced_run(const ScenarioConfig& config, RunOptions options = {})
{
    std::ostringstream os;
    options.trace = &os;
    Traced t;
    t.result = run_scenario(config, options);
    t.trace = os.str();
    t.lines = parse_trace(t.trace);
    return t;
}

inline std::string read_file(const std::string& path)
{
    std::ifstream      f(path, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

inline ScenarioConfig load_scenario(const std::string& path)
{
    auto parsed = parse_scenario(read_file(path));
    if (!parsed.ok()) {
        std::string all;
        for (const auto& e : parsed.errors) all += e + "\n";
        throw Error("Config", path + ":\n" + all);
    }
    return *parsed.config;
}

inline std::vector<const RoleChange*> changes_to(const RunReport& r, Role role)
{
    std::vector<const RoleChange*> out;
    for (const auto& c : r.role_changes) {
        if (c.to == role) out.push_back(&c);
    }
    return out;
}

inline std::size_t count_notes(const RunReport& r, Cause cause,
                               std::optional<NodeId> subject = std::nullopt)
{
    std::size_t n = 0;
    for (const auto& x : r.notifications) {
        n += x.cause == cause && (!subject || x.subject == *subject);
    }
    return n;
}

}  // namespace ansim::test
