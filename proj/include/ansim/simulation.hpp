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

// simulation.hpp                                                 -*-C++-*-
#pragma once

// One engine run over a scenario, and the three-profile comparison.

#include <ansim/engine.hpp>
#include <ansim/metrics.hpp>
#include <ansim/scenario.hpp>

#include <array>
#include <optional>
#include <ostream>
#include <vector>

namespace ansim {

struct RunOptions {
    std::optional<ProfileKind>   profile;  // overrides the scenario
    std::optional<std::uint64_t> seed;     // overrides the scenario
    std::ostream*                trace = nullptr;
};

struct RunResult {
    RunReport                     report;
    std::vector<ShapeTuple>       shape;
    std::vector<ProbeRecord>      probes;
    std::vector<SuccessionRecord> successions;
    std::vector<NodeProfile>      final_nodes;  // CMU first
};

/// Builds kernel and engine, bootstraps, schedules the faults and runs to
/// `duration_ms`.  The report carries the audit result.
RunResult run_scenario(const ScenarioConfig& config,
                       const RunOptions&     options = {});

/// Plain, AuthOnly and AuthEncap runs over the same scenario and seed,
/// executed concurrently.
std::array<RunResult, 3> run_all_profiles(const ScenarioConfig&        config,
                                          std::optional<std::uint64_t> seed = {});

ComparisonReport compare_profiles(const ScenarioConfig&        config,
                                  std::optional<std::uint64_t> seed = {});

/// Shape tuples excluding security-category envelopes (already excluded at
/// the source); equal across profiles for a fair comparison.
bool same_traffic_shape(const RunResult& a, const RunResult& b);

}  // namespace ansim
