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

// audit.hpp                                                      -*-C++-*-
#pragma once

// Post-run invariant checks over a finished run.  Each violation is one
// human-readable line; an empty result means the run is clean.

#include <ansim/engine.hpp>
#include <ansim/metrics.hpp>

#include <string>
#include <vector>

namespace ansim {

struct AuditInput {
    const RunReport*                report = nullptr;
    const std::vector<ProbeRecord>* probes = nullptr;
    const std::vector<std::string>* admin_violations = nullptr;
    SimTime                         probe_interval = 60'000;
};

/// Checked properties:
//: o every Alert for a streak is preceded by a Warning from the same
//:   watcher since that watcher's previous Alert about the same node;
//: o every removal is preceded by an Alert about the removed node;
//: o probes to one removed node are exactly `probe_interval` apart;
//: o reentry changes end in LowRank;
//: o Administrator is only ever granted by initial assignment or failover;
//: o exactly one administrator after every event (from the engine);
//: o sent = delivered + lost, categories sum to wire bytes,
//:   wire >= payload.
std::vector<std::string> audit_run(const AuditInput& in);

}  // namespace ansim
