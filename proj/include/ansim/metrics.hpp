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

// metrics.hpp                                                    -*-C++-*-
#pragma once

#include <ansim/core_model.hpp>
#include <ansim/protocol.hpp>
#include <ansim/sim_kernel.hpp>

#include <json.hpp>

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

namespace ansim {

struct RunReport {
    std::string   scenario;
    ProfileKind   profile = ProfileKind::Plain;
    SimTime       duration = 0;
    std::uint64_t seed = 0;

    std::uint64_t bytes_payload = 0;
    std::uint64_t bytes_wire = 0;
    std::map<Category, std::uint64_t> bytes_by_category;

    std::uint64_t messages_sent = 0;
    std::uint64_t messages_delivered = 0;
    std::uint64_t messages_lost = 0;
    std::map<EnvelopeKind, std::uint64_t> sent_by_kind;

    std::vector<Notification> notifications;
    std::vector<RoleChange>   role_changes;

    std::uint32_t rounds_started = 0;
    std::uint32_t rounds_converged = 0;
    std::uint32_t convergence_failures = 0;

    std::vector<std::string> audit_violations;

    RunReport();

    /// bytes_wire / bytes_payload (1.0 when nothing was sent).
    double wire_to_payload() const;
    bool   converged() const { return convergence_failures == 0; }
};

/// Accumulates envelope outcomes into a RunReport, exactly once per
/// envelope id.
class MetricsRecorder {
  public:
    explicit MetricsRecorder(RunReport& report) : report_(report) {}

    /// Throws `Error("DoubleCount")` if `env.id` was already recorded.
    void record_envelope(const Envelope& env, Outcome outcome);

    const RunReport& report() const { return report_; }

  private:
    RunReport&                        report_;
    std::unordered_set<std::uint64_t> seen_;
};

struct ComparisonReport {
    RunReport plain;
    RunReport auth;
    RunReport auth_encap;
    double    ratio_encap_plain = 0.0;
    double    ratio_encap_auth = 0.0;
    double    ratio_auth_plain = 0.0;

    /// Computes the wire-byte ratios.  Throws `Error("ZeroDenominator")`.
    static ComparisonReport from_runs(RunReport plain, RunReport auth,
                                      RunReport auth_encap);

    const RunReport& by_profile(ProfileKind p) const;
};

using Json = nlohmann::ordered_json;

Json to_json(const Notification& n);
Json to_json(const RoleChange& c);
Json to_json(const RunReport& r);
Json to_json(const ComparisonReport& c);

/// `profile,category,bytes` with a header row; one row per category.
std::string to_csv(const RunReport& r, bool header = true);
std::string to_csv(const ComparisonReport& c);

}  // namespace ansim
