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

// audit.cpp                                                      -*-C++-*-
#include <ansim/audit.hpp>

#include <map>
#include <utility>

namespace ansim {

std::vector<std::string> audit_run(const AuditInput& in)
{
    std::vector<std::string> out;
    const RunReport&         r = *in.report;

    auto at = [](SimTime t) { return "t=" + std::to_string(t) + ": "; };

    // streak bookkeeping per (reporter, subject)
    std::map<std::pair<NodeId, NodeId>, bool> warned;
    std::map<NodeId, bool>                    alerted;
    for (const Notification& n : r.notifications) {
        const auto key = std::make_pair(n.reporter, n.subject);
        switch (n.cause) {
        case Cause::SingleLoss: warned[key] = true; break;
        case Cause::TripleLoss:
            if (!warned[key]) {
                out.push_back(at(n.at) + "Alert about node " +
                              to_string(n.subject) + " from node " +
                              to_string(n.reporter) +
                              " without a preceding Warning");
            }
            warned[key] = false;
            alerted[n.subject] = true;
            break;
        case Cause::Removal:
            if (!alerted[n.subject]) {
                out.push_back(at(n.at) + "node " + to_string(n.subject) +
                              " removed without a preceding Alert");
            }
            alerted[n.subject] = false;
            break;
        default: break;
        }
    }

    if (in.probes != nullptr) {
        std::map<std::pair<NodeId, std::uint32_t>, SimTime> last;
        for (const ProbeRecord& p : *in.probes) {
            const auto key = std::make_pair(p.subject, p.episode);
            auto       it = last.find(key);
            if (it != last.end() && p.sent_at - it->second != in.probe_interval) {
                out.push_back(at(p.sent_at) + "probe to node " +
                              to_string(p.subject) + " " +
                              std::to_string(p.sent_at - it->second) +
                              " ms after the previous one");
            }
            last[key] = p.sent_at;
        }
    }

    for (const RoleChange& c : r.role_changes) {
        if (c.reason == ChangeReason::Reentry && c.to != Role::LowRank) {
            out.push_back(at(c.at) + "node " + to_string(c.node) +
                          " reentered as " + std::string(to_string(c.to)));
        }
        if (c.to == Role::Administrator &&
            c.reason != ChangeReason::InitialAssignment &&
            c.reason != ChangeReason::AdminFailover) {
            out.push_back(at(c.at) + "node " + to_string(c.node) +
                          " became Administrator through " +
                          std::string(to_string(c.reason)));
        }
    }

    if (in.admin_violations != nullptr) {
        for (const std::string& v : *in.admin_violations) {
            out.push_back("exactly-one-administrator: " + v);
        }
    }

    if (r.messages_delivered + r.messages_lost != r.messages_sent) {
        out.push_back("delivered + lost != sent");
    }
    std::uint64_t by_cat = 0;
    for (const auto& [c, b] : r.bytes_by_category) {
        by_cat += b;
    }
    if (by_cat != r.bytes_wire) {
        out.push_back("category bytes do not sum to wire bytes");
    }
    if (r.bytes_wire < r.bytes_payload) {
        out.push_back("wire bytes below payload bytes");
    }
    return out;
}

}  // namespace ansim
