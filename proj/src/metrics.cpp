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

// metrics.cpp                                                    -*-C++-*-
#include <ansim/metrics.hpp>

#include <sstream>

namespace ansim {

RunReport::RunReport()
{
    for (Category c : kAllCategories) {
        bytes_by_category[c] = 0;
    }
}

double RunReport::wire_to_payload() const
{
    if (bytes_payload == 0) {
        return 1.0;
    }
    return static_cast<double>(bytes_wire) / static_cast<double>(bytes_payload);
}

void MetricsRecorder::record_envelope(const Envelope& env, Outcome outcome)
{
    if (!seen_.insert(env.id).second) {
        throw Error("DoubleCount",
                    "envelope " + std::to_string(env.id) + " recorded twice");
    }
    ++report_.messages_sent;
    ++report_.sent_by_kind[env.kind];
    if (outcome == Outcome::Delivered) {
        ++report_.messages_delivered;
    }
    else {
        ++report_.messages_lost;
    }
    // lost envelopes still occupied the medium
    report_.bytes_payload += env.payload_len();
    report_.bytes_wire += env.wire_len;
    report_.bytes_by_category[category_of(env.kind)] += env.wire_len;
}

ComparisonReport ComparisonReport::from_runs(RunReport plain,
                                             RunReport auth,
                                             RunReport auth_encap)
{
    if (plain.bytes_wire == 0 || auth.bytes_wire == 0) {
        throw Error("ZeroDenominator",
                    "cannot compare profiles: a run sent no bytes");
    }
    ComparisonReport c;
    const auto p = static_cast<double>(plain.bytes_wire);
    const auto a = static_cast<double>(auth.bytes_wire);
    const auto e = static_cast<double>(auth_encap.bytes_wire);
    c.ratio_encap_plain = e / p;
    c.ratio_encap_auth = e / a;
    c.ratio_auth_plain = a / p;
    c.plain = std::move(plain);
    c.auth = std::move(auth);
    c.auth_encap = std::move(auth_encap);
    return c;
}

const RunReport& ComparisonReport::by_profile(ProfileKind p) const
{
    switch (p) {
    case ProfileKind::Plain: return plain;
    case ProfileKind::AuthOnly: return auth;
    case ProfileKind::AuthEncap: return auth_encap;
    }
    return plain;
}

Json to_json(const Notification& n)
{
    Json j;
    j["at"] = n.at;
    j["severity"] = to_string(n.severity);
    j["cause"] = to_string(n.cause);
    j["subject"] = n.subject.value;
    j["reporter"] = n.reporter.value;
    return j;
}

Json to_json(const RoleChange& c)
{
    Json j;
    j["at"] = c.at;
    j["node"] = c.node.value;
    j["from"] = to_string(c.from);
    j["to"] = to_string(c.to);
    j["reason"] = to_string(c.reason);
    return j;
}

Json to_json(const RunReport& r)
{
    Json j;
    j["scenario"] = r.scenario;
    j["profile"] = to_string(r.profile);
    j["seed"] = r.seed;
    j["duration_ms"] = r.duration;

    Json bytes;
    bytes["payload"] = r.bytes_payload;
    bytes["wire"] = r.bytes_wire;
    bytes["wire_to_payload"] = r.wire_to_payload();
    Json cats;
    for (Category c : kAllCategories) {
        cats[std::string(to_string(c))] = r.bytes_by_category.at(c);
    }
    bytes["by_category"] = cats;
    j["bytes"] = bytes;

    Json msgs;
    msgs["sent"] = r.messages_sent;
    msgs["delivered"] = r.messages_delivered;
    msgs["lost"] = r.messages_lost;
    Json kinds = Json::object();
    for (EnvelopeKind k : kAllEnvelopeKinds) {
        auto it = r.sent_by_kind.find(k);
        if (it != r.sent_by_kind.end()) {
            kinds[std::string(to_string(k))] = it->second;
        }
    }
    msgs["sent_by_kind"] = kinds;
    j["messages"] = msgs;

    Json rounds;
    rounds["started"] = r.rounds_started;
    rounds["converged"] = r.rounds_converged;
    rounds["convergence_failures"] = r.convergence_failures;
    j["rounds"] = rounds;

    Json notes = Json::array();
    for (const auto& n : r.notifications) {
        notes.push_back(to_json(n));
    }
    j["notifications"] = notes;

    Json changes = Json::array();
    for (const auto& c : r.role_changes) {
        changes.push_back(to_json(c));
    }
    j["role_changes"] = changes;
    j["audit_violations"] = r.audit_violations;
    return j;
}

Json to_json(const ComparisonReport& c)
{
    Json j;
    Json ratios;
    ratios["encap_plain"] = c.ratio_encap_plain;
    ratios["encap_auth"] = c.ratio_encap_auth;
    ratios["auth_plain"] = c.ratio_auth_plain;
    j["ratios"] = ratios;
    Json runs = Json::array();
    for (ProfileKind p : kAllProfiles) {
        runs.push_back(to_json(c.by_profile(p)));
    }
    j["runs"] = runs;
    return j;
}

std::string to_csv(const RunReport& r, bool header)
{
    std::ostringstream os;
    if (header) {
        os << "profile,category,bytes\n";
    }
    for (Category c : kAllCategories) {
        os << to_string(r.profile) << ',' << to_string(c) << ','
           << r.bytes_by_category.at(c) << '\n';
    }
    return os.str();
}

std::string to_csv(const ComparisonReport& c)
{
    std::string out = "profile,category,bytes\n";
    for (ProfileKind p : kAllProfiles) {
        out += to_csv(c.by_profile(p), false);
    }
    return out;
}

}  // namespace ansim
