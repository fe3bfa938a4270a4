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

// scenario.hpp                                                   -*-C++-*-
#pragma once

// Scenario files: one JSON document describing nodes, links, timers,
// security parameters and faults.
//
//  {
//    "name": "forest-7",
//    "profile": "plain",                 // plain | auth | auth-encap
//    "seed": 1,
//    "duration_ms": 600000,
//    "nodes": [ {"id": 1, "hardware_id": "0x1001",
//                "processing_power": 90, "position": [10, 20]} ],
//    "links": {"latency_ms": 10, "jitter_ms": 0, "loss_probability": 0.0,
//              "overrides": [{"from": 1, "to": 2, "latency_ms": 5}]},
//    "timers": {"status_period_ms": 5000, ...},
//    "security": {"sig_len": 40, ...},
//    "faults": [{"target": 3, "kind": "drop_next", "count": 3,
//                "at_ms": 20000}]
//  }
//
// Parsing collects every problem, each prefixed with its field path
// (`faults[0].target: ...`), before failing.  Unknown keys are errors.

#include <ansim/engine.hpp>
#include <ansim/sim_kernel.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ansim {

struct NodeSpec {
    NodeId                              id;
    std::uint64_t                       hardware_id = 0;
    std::uint32_t                       processing_power = 1;
    std::optional<std::array<double, 2>> position;
    std::optional<Role>                 role;  // designation

    friend bool operator==(const NodeSpec&, const NodeSpec&) = default;
};

struct LinkOverride {
    NodeId                 from;
    NodeId                 to;
    std::optional<SimTime> latency_ms;
    std::optional<double>  loss_probability;
    bool                   symmetric = true;

    friend bool operator==(const LinkOverride&, const LinkOverride&) = default;
};

struct LinkSpec {
    SimTime                   latency_ms = 10;
    SimTime                   jitter_ms = 0;
    double                    loss_probability = 0.0;
    std::vector<LinkOverride> overrides;

    friend bool operator==(const LinkSpec&, const LinkSpec&) = default;
};

struct ScenarioConfig {
    std::string                               name = "unnamed";
    std::string                               description;
    ProfileKind                               profile = ProfileKind::Plain;
    std::uint64_t                             seed = 1;
    SimTime                                   duration_ms = 600'000;
    std::vector<NodeSpec>                     nodes;
    std::optional<std::vector<std::uint64_t>> registry;  // default: all nodes
    LinkSpec                                  links;
    TimerConfig                               timers;
    SecurityParams                            security;
    PayloadSizes                              payload_bytes = default_payload_sizes();
    std::vector<FaultSpec>                    faults;
    std::uint32_t                             max_rounds = 10;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct ParseResult {
    std::optional<ScenarioConfig> config;
    std::vector<std::string>      errors;

    bool ok() const { return config.has_value(); }
};

ParseResult parse_scenario(std::string_view text);

/// Semantic checks on an already-typed config; same error format.
std::vector<std::string> validate(const ScenarioConfig& config);

/// Canonical JSON text; `parse_scenario(serialize(c))` yields `c`.
std::string serialize(const ScenarioConfig& config);

/// Reads a file, or a bundled scenario by name (`paper-case1`,
/// `paper-case1.json`).  Throws `Error("Io")` if neither exists.
std::string read_scenario_text(const std::string& path_or_name);

std::vector<std::string>        bundled_scenario_names();
std::optional<std::string_view> bundled_scenario(std::string_view name);

/// Grows or shrinks the node list to `count` nodes.  Added nodes copy the
/// last node's parameters with fresh ids and hardware ids (and are added to
/// an explicit registry); faults targeting dropped nodes are removed.
ScenarioConfig normalize_nodes(ScenarioConfig config, std::size_t count);

// --- conversion ------------------------------------------------------------

EngineConfig        to_engine_config(const ScenarioConfig& config,
                                     ProfileKind           profile);
LinkModel           to_link_model(const ScenarioConfig& config);
std::vector<NodeId> kernel_nodes(const ScenarioConfig& config);  // with CMU

}  // namespace ansim
