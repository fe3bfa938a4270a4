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

// simulation.cpp                                                 -*-C++-*-
#include <ansim/simulation.hpp>

#include <ansim/audit.hpp>

#include <future>

namespace ansim {

RunResult run_scenario(const ScenarioConfig& config, const RunOptions& options)
{
    const ProfileKind   profile = options.profile.value_or(config.profile);
    const std::uint64_t seed = options.seed.value_or(config.seed);

    RunResult out;
    RunReport& report = out.report;
    report.scenario = config.name;
    report.profile = profile;
    report.seed = seed;
    report.duration = config.duration_ms;

    Kernel kernel(seed, to_link_model(config), kernel_nodes(config));
    kernel.set_trace(options.trace);
    MetricsRecorder recorder(report);
    kernel.set_outcome_observer(
        [&recorder](const Envelope& env, Outcome outcome, LossReason) {
            recorder.record_envelope(env, outcome);
        });

    ProtocolEngine engine(kernel, to_engine_config(config, profile), report);
    engine.bootstrap();
    for (const FaultSpec& f : config.faults) {
        kernel.schedule(f.at, f);
    }
    kernel.run_until(config.duration_ms, engine);
    kernel.finish();

    out.shape = engine.traffic_shape();
    out.probes = engine.probes();
    out.successions = engine.successions();
    out.final_nodes = engine.nodes();

    AuditInput in;
    in.report = &report;
    in.probes = &out.probes;
    in.admin_violations = &engine.admin_violations();
    in.probe_interval = config.timers.probe_interval;
    report.audit_violations = audit_run(in);
    return out;
}

std::array<RunResult, 3> run_all_profiles(const ScenarioConfig&        config,
                                          std::optional<std::uint64_t> seed)
{
    auto launch = [&](ProfileKind p) {
        return std::async(std::launch::async, [&config, seed, p] {
            RunOptions o;
            o.profile = p;
            o.seed = seed;
            return run_scenario(config, o);
        });
    };
    auto plain = launch(ProfileKind::Plain);
    auto auth = launch(ProfileKind::AuthOnly);
    auto encap = launch(ProfileKind::AuthEncap);
    return {plain.get(), auth.get(), encap.get()};
}

ComparisonReport compare_profiles(const ScenarioConfig&        config,
                                  std::optional<std::uint64_t> seed)
{
    auto runs = run_all_profiles(config, seed);
    return ComparisonReport::from_runs(std::move(runs[0].report),
                                       std::move(runs[1].report),
                                       std::move(runs[2].report));
}

bool same_traffic_shape(const RunResult& a, const RunResult& b)
{
    return a.shape == b.shape;
}

}  // namespace ansim
