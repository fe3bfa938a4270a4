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

// protocol.hpp                                                   -*-C++-*-
#pragma once

// Pure building blocks of the Active Neighbour protocol: initial role
// assignment, loss-streak bookkeeping and RTT-ordered succession.  The
// event-driven state machines that use them live in engine.hpp.

#include <ansim/core_model.hpp>

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace ansim {

enum class ChangeReason : std::uint8_t {
    InitialAssignment,
    AdminFailover,
    Demotion,
    Reentry,
};

std::string_view to_string(ChangeReason r);

struct RoleChange {
    NodeId       node;
    Role         from = Role::LowRank;
    Role         to = Role::LowRank;
    SimTime      at = 0;
    ChangeReason reason = ChangeReason::InitialAssignment;

    friend bool operator==(const RoleChange&, const RoleChange&) = default;
};

/// Picks the administrator (highest processing power, ties to the lower id)
/// and makes every other node a FireSensor, except nodes pre-designated as
/// PolicyApplier or AuthenticityProvider, which keep that role.  Every node
/// starts from LowRank.  Throws `Error("EmptyNetwork")`.
std::vector<RoleChange> assign_initial_roles(std::span<const NodeProfile> nodes,
                                             SimTime at = 0);

// ============================================================================
//                                MonitorState
// ============================================================================

/// Loss detection grace: a periodic packet counts as lost when it has not
/// arrived by `expected + grace_for(period)`.
constexpr SimTime grace_for(SimTime period) { return period / 4; }

inline constexpr std::uint32_t kAlertStreak = 3;

struct MonitorState {
    NodeId        watcher;
    NodeId        watched;
    std::uint32_t consecutive_losses = 0;
    SimTime       last_outcome_at = 0;
    bool          warned_for_current_streak = false;
    bool          alerted_for_current_streak = false;

    // scheduling of the next expected arrival
    SimTime       period = 0;
    SimTime       deadline = 0;
    std::uint64_t generation = 0;
};

/// Applies one delivery outcome.  A delivery resets the streak.  A loss
/// emits a Warning on the 0->1 transition and an Alert on the 2->3
/// transition; longer streaks stay silent.
std::vector<Notification> record_packet_outcome(MonitorState& ms,
                                                bool          delivered,
                                                SimTime       at);

// ============================================================================
//                              SuccessionTable
// ============================================================================

struct SuccessionEntry {
    NodeId                 node;
    std::optional<SimTime> rtt;  // nullopt: Unresponsive

    friend bool operator==(const SuccessionEntry&, const SuccessionEntry&) = default;
};

/// Candidates ordered by ascending RTT, Unresponsive last, ties by lower id.
class SuccessionTable {
  public:
    SuccessionTable() = default;
    explicit SuccessionTable(std::vector<SuccessionEntry> entries);

    const std::vector<SuccessionEntry>& entries() const { return entries_; }
    bool                                empty() const { return entries_.empty(); }

    /// Responsive candidates in table order.
    std::vector<NodeId> responsive() const;

    friend bool operator==(const SuccessionTable&, const SuccessionTable&) = default;

  private:
    std::vector<SuccessionEntry> entries_;
};

/// First responsive entry for which `is_alive` succeeds; nullopt means no
/// candidate is left and the CMU has to step in.
std::optional<NodeId> select_successor(
    const SuccessionTable&             table,
    const std::function<bool(NodeId)>& is_alive);

}  // namespace ansim
