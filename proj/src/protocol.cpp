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

// protocol.cpp                                                   -*-C++-*-
#include <ansim/protocol.hpp>

#include <algorithm>

namespace ansim {

std::string_view to_string(ChangeReason r)
{
    switch (r) {
    case ChangeReason::InitialAssignment: return "InitialAssignment";
    case ChangeReason::AdminFailover: return "AdminFailover";
    case ChangeReason::Demotion: return "Demotion";
    case ChangeReason::Reentry: return "Reentry";
    }
    return "?";
}

std::vector<RoleChange> assign_initial_roles(std::span<const NodeProfile> nodes,
                                             SimTime                      at)
{
    if (nodes.empty()) {
        throw Error("EmptyNetwork", "cannot assign roles in an empty network");
    }

    const NodeProfile* admin = &nodes.front();
    for (const NodeProfile& n : nodes) {
        if (n.processing_power > admin->processing_power ||
            (n.processing_power == admin->processing_power &&
             n.node_id < admin->node_id)) {
            admin = &n;
        }
    }

    std::vector<RoleChange> changes;
    changes.reserve(nodes.size());
    for (const NodeProfile& n : nodes) {
        Role to = Role::FireSensor;
        if (n.node_id == admin->node_id) {
            to = Role::Administrator;
        }
        else if (n.role == Role::PolicyApplier ||
                 n.role == Role::AuthenticityProvider) {
            to = n.role;
        }
        changes.push_back(RoleChange{n.node_id, Role::LowRank, to, at,
                                     ChangeReason::InitialAssignment});
    }
    std::sort(changes.begin(), changes.end(),
              [](const RoleChange& a, const RoleChange& b) {
                  return a.node < b.node;
              });
    return changes;
}

std::vector<Notification> record_packet_outcome(MonitorState& ms,
                                                bool          delivered,
                                                SimTime       at)
{
    std::vector<Notification> out;
    ms.last_outcome_at = at;
    if (delivered) {
        ms.consecutive_losses = 0;
        ms.warned_for_current_streak = false;
        ms.alerted_for_current_streak = false;
        return out;
    }

    ++ms.consecutive_losses;
    if (ms.consecutive_losses == 1 && !ms.warned_for_current_streak) {
        ms.warned_for_current_streak = true;
        out.push_back(make_notification(Cause::SingleLoss, ms.watched, at,
                                        ms.watcher));
    }
    if (ms.consecutive_losses == kAlertStreak &&
        !ms.alerted_for_current_streak) {
        ms.alerted_for_current_streak = true;
        out.push_back(make_notification(Cause::TripleLoss, ms.watched, at,
                                        ms.watcher));
    }
    return out;
}

SuccessionTable::SuccessionTable(std::vector<SuccessionEntry> entries)
: entries_(std::move(entries))
{
    std::sort(entries_.begin(), entries_.end(),
              [](const SuccessionEntry& a, const SuccessionEntry& b) {
                  if (a.rtt.has_value() != b.rtt.has_value()) {
                      return a.rtt.has_value();
                  }
                  if (a.rtt && *a.rtt != *b.rtt) {
                      return *a.rtt < *b.rtt;
                  }
                  return a.node < b.node;
              });
}

std::vector<NodeId> SuccessionTable::responsive() const
{
    std::vector<NodeId> out;
    for (const auto& e : entries_) {
        if (e.rtt) {
            out.push_back(e.node);
        }
    }
    return out;
}

std::optional<NodeId> select_successor(
    const SuccessionTable&             table,
    const std::function<bool(NodeId)>& is_alive)
{
    for (const auto& e : table.entries()) {
        if (e.rtt && is_alive(e.node)) {
            return e.node;
        }
    }
    return std::nullopt;
}

}  // namespace ansim
