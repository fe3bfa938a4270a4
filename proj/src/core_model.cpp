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

// core_model.cpp                                                 -*-C++-*-
#include <ansim/core_model.hpp>

namespace ansim {

std::string to_string(NodeId id)
{
    if (id.is_broadcast()) {
        return "*";
    }
    return std::to_string(id.value);
}

std::string_view to_string(Role r)
{
    switch (r) {
    case Role::Cmu: return "CMU";
    case Role::Administrator: return "Administrator";
    case Role::PolicyApplier: return "PolicyApplier";
    case Role::AuthenticityProvider: return "AuthenticityProvider";
    case Role::FireSensor: return "FireSensor";
    case Role::LowRank: return "LowRank";
    }
    return "?";
}

std::optional<Role> role_from_string(std::string_view s)
{
    for (Role r : kAllRoles) {
        if (to_string(r) == s) {
            return r;
        }
    }
    return std::nullopt;
}

std::string_view to_string(NodeStatus s)
{
    switch (s) {
    case NodeStatus::Active: return "Active";
    case NodeStatus::Removed: return "Removed";
    case NodeStatus::Reentering: return "Reentering";
    }
    return "?";
}

Category category_of(EnvelopeKind k)
{
    switch (k) {
    case EnvelopeKind::SensorData: return Category::Data;

    case EnvelopeKind::StatusBroadcast:
    case EnvelopeKind::Ping:
    case EnvelopeKind::Pong:
    case EnvelopeKind::InfoMessage:
    case EnvelopeKind::Warning:
    case EnvelopeKind::Alert:
    case EnvelopeKind::RemovalNotice:
    case EnvelopeKind::RoleAssignment: return Category::Control;

    case EnvelopeKind::DiagnosticProbe: return Category::Diagnostic;

    case EnvelopeKind::AuthChallenge:
    case EnvelopeKind::AuthResponse:
    case EnvelopeKind::KeyExchange:
    case EnvelopeKind::AuthorizationRequest:
    case EnvelopeKind::AuthorizationGrant: return Category::Security;
    }
    return Category::Control;
}

std::string_view to_string(EnvelopeKind k)
{
    switch (k) {
    case EnvelopeKind::StatusBroadcast: return "StatusBroadcast";
    case EnvelopeKind::SensorData: return "SensorData";
    case EnvelopeKind::Ping: return "Ping";
    case EnvelopeKind::Pong: return "Pong";
    case EnvelopeKind::InfoMessage: return "InfoMessage";
    case EnvelopeKind::Warning: return "Warning";
    case EnvelopeKind::Alert: return "Alert";
    case EnvelopeKind::RemovalNotice: return "RemovalNotice";
    case EnvelopeKind::RoleAssignment: return "RoleAssignment";
    case EnvelopeKind::DiagnosticProbe: return "DiagnosticProbe";
    case EnvelopeKind::AuthChallenge: return "AuthChallenge";
    case EnvelopeKind::AuthResponse: return "AuthResponse";
    case EnvelopeKind::KeyExchange: return "KeyExchange";
    case EnvelopeKind::AuthorizationRequest: return "AuthorizationRequest";
    case EnvelopeKind::AuthorizationGrant: return "AuthorizationGrant";
    }
    return "?";
}

std::optional<EnvelopeKind> envelope_kind_from_string(std::string_view s)
{
    for (EnvelopeKind k : kAllEnvelopeKinds) {
        if (to_string(k) == s) {
            return k;
        }
    }
    return std::nullopt;
}

std::string_view to_string(Category c)
{
    switch (c) {
    case Category::Control: return "control";
    case Category::Data: return "data";
    case Category::Security: return "security";
    case Category::Diagnostic: return "diagnostic";
    }
    return "?";
}

std::string_view to_string(ProfileKind p)
{
    switch (p) {
    case ProfileKind::Plain: return "plain";
    case ProfileKind::AuthOnly: return "auth";
    case ProfileKind::AuthEncap: return "auth-encap";
    }
    return "?";
}

std::optional<ProfileKind> profile_from_string(std::string_view s)
{
    for (ProfileKind p : kAllProfiles) {
        if (to_string(p) == s) {
            return p;
        }
    }
    return std::nullopt;
}

std::string_view to_string(Severity s)
{
    switch (s) {
    case Severity::Warning: return "Warning";
    case Severity::Alert: return "Alert";
    case Severity::Info: return "Info";
    }
    return "?";
}

std::string_view to_string(Cause c)
{
    switch (c) {
    case Cause::SingleLoss: return "SingleLoss";
    case Cause::TripleLoss: return "TripleLoss";
    case Cause::Removal: return "Removal";
    case Cause::AdminFailover: return "AdminFailover";
    case Cause::Reentry: return "Reentry";
    case Cause::AuthFailure: return "AuthFailure";
    }
    return "?";
}

Notification make_notification(Cause    cause,
                               NodeId   subject,
                               SimTime  at,
                               NodeId   reporter,
                               Severity severity)
{
    if (cause == Cause::SingleLoss) {
        severity = Severity::Warning;
    }
    else if (cause == Cause::TripleLoss) {
        severity = Severity::Alert;
    }
    return Notification{severity, subject, cause, at, reporter};
}

}  // namespace ansim
