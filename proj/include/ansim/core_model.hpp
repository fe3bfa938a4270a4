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

// core_model.hpp                                                 -*-C++-*-
#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ansim {

/// Simulated time in milliseconds.
using SimTime = std::int64_t;

/// Identifier of a simulated node. Sensor ids start at 1; 0 is the CMU.
struct NodeId {
    std::uint32_t value = 0;

    constexpr NodeId() = default;
    constexpr explicit NodeId(std::uint32_t v) : value(v) {}

    constexpr bool is_cmu() const { return value == 0; }
    constexpr bool is_broadcast() const { return value == UINT32_MAX; }

    friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

inline constexpr NodeId kCmuId{0};
inline constexpr NodeId kBroadcast{UINT32_MAX};

std::string to_string(NodeId id);

// ============================================================================
//                                   Roles
// ============================================================================

enum class Role : std::uint8_t {
    Cmu,
    Administrator,
    PolicyApplier,
    AuthenticityProvider,
    FireSensor,
    LowRank,
};

inline constexpr Role kAllRoles[] = {Role::Cmu,
                                     Role::Administrator,
                                     Role::PolicyApplier,
                                     Role::AuthenticityProvider,
                                     Role::FireSensor,
                                     Role::LowRank};

/// Hierarchy ordinal: 0 is the highest authority.
constexpr int rank_of(Role r)
{
    switch (r) {
    case Role::Cmu: return 0;
    case Role::Administrator: return 1;
    case Role::PolicyApplier:
    case Role::AuthenticityProvider: return 2;
    case Role::FireSensor:
    case Role::LowRank: return 3;
    }
    return 3;
}

/// Orders roles by authority: `greater` means `a` outranks `b`.  Roles of
/// the same rank compare equivalent.
constexpr std::weak_ordering compare_rank(Role a, Role b)
{
    return rank_of(b) <=> rank_of(a);
}

/// True for the high-rank node roles.  The CMU is a tier of its own.
constexpr bool is_hrn(Role r)
{
    return r == Role::Administrator || r == Role::PolicyApplier ||
           r == Role::AuthenticityProvider;
}

constexpr bool is_lrn(Role r)
{
    return r == Role::FireSensor || r == Role::LowRank;
}

std::string_view to_string(Role r);
std::optional<Role> role_from_string(std::string_view s);

// ============================================================================
//                                   Nodes
// ============================================================================

enum class NodeStatus : std::uint8_t { Active, Removed, Reentering };

std::string_view to_string(NodeStatus s);

struct NodeProfile {
    NodeId        node_id;
    std::uint64_t hardware_id = 0;
    std::uint32_t processing_power = 1;
    Role          role = Role::FireSensor;
    NodeStatus    status = NodeStatus::Active;

    friend bool operator==(const NodeProfile&, const NodeProfile&) = default;
};

// ============================================================================
//                                 Envelopes
// ============================================================================

enum class EnvelopeKind : std::uint8_t {
    StatusBroadcast,
    SensorData,
    Ping,
    Pong,
    InfoMessage,
    Warning,
    Alert,
    RemovalNotice,
    RoleAssignment,
    DiagnosticProbe,
    AuthChallenge,
    AuthResponse,
    KeyExchange,
    AuthorizationRequest,
    AuthorizationGrant,
};

inline constexpr EnvelopeKind kAllEnvelopeKinds[] = {
    EnvelopeKind::StatusBroadcast,    EnvelopeKind::SensorData,
    EnvelopeKind::Ping,               EnvelopeKind::Pong,
    EnvelopeKind::InfoMessage,        EnvelopeKind::Warning,
    EnvelopeKind::Alert,              EnvelopeKind::RemovalNotice,
    EnvelopeKind::RoleAssignment,     EnvelopeKind::DiagnosticProbe,
    EnvelopeKind::AuthChallenge,      EnvelopeKind::AuthResponse,
    EnvelopeKind::KeyExchange,        EnvelopeKind::AuthorizationRequest,
    EnvelopeKind::AuthorizationGrant,
};

/// Byte-accounting bucket of an envelope kind.
enum class Category : std::uint8_t { Control, Data, Security, Diagnostic };

inline constexpr Category kAllCategories[] = {
    Category::Control, Category::Data, Category::Security,
    Category::Diagnostic};

Category category_of(EnvelopeKind k);

/// Warning, Alert, RemovalNotice and InfoMessage always name a subject node.
constexpr bool requires_subject(EnvelopeKind k)
{
    return k == EnvelopeKind::Warning || k == EnvelopeKind::Alert ||
           k == EnvelopeKind::RemovalNotice || k == EnvelopeKind::InfoMessage;
}

/// SensorData and StatusBroadcast are the periodic "data packets" that
/// loss detection and DropNextN faults are about.
constexpr bool is_data_packet(EnvelopeKind k)
{
    return k == EnvelopeKind::SensorData || k == EnvelopeKind::StatusBroadcast;
}

std::string_view to_string(EnvelopeKind k);
std::optional<EnvelopeKind> envelope_kind_from_string(std::string_view s);
std::string_view to_string(Category c);

enum class ProfileKind : std::uint8_t { Plain, AuthOnly, AuthEncap };

inline constexpr ProfileKind kAllProfiles[] = {
    ProfileKind::Plain, ProfileKind::AuthOnly, ProfileKind::AuthEncap};

/// CLI spelling: plain | auth | auth-encap.
std::string_view to_string(ProfileKind p);
std::optional<ProfileKind> profile_from_string(std::string_view s);

/// Security wrapping attached by the security layer.
struct Seal {
    ProfileKind               profile = ProfileKind::Plain;
    std::vector<std::uint8_t> tag;           // signature, sig_len bytes
    std::vector<std::uint8_t> icv;           // session integrity check
    bool                      confidential = false;

    friend bool operator==(const Seal&, const Seal&) = default;
};

struct Envelope {
    std::uint64_t             id = 0;      // unique per run
    EnvelopeKind              kind = EnvelopeKind::InfoMessage;
    NodeId                    sender;
    NodeId                    receiver;
    std::optional<NodeId>     subject;
    std::uint64_t             correlation = 0;  // ping/probe token, nonce
    std::int64_t              time_step = 0;    // TOTA time step
    bool                      reply = false;
    std::vector<std::uint8_t> payload;
    std::size_t               wire_len = 0;
    SimTime                   sent_at = 0;
    Seal                      seal;

    std::size_t payload_len() const { return payload.size(); }

    friend bool operator==(const Envelope&, const Envelope&) = default;
};

// ============================================================================
//                               Notifications
// ============================================================================

enum class Severity : std::uint8_t { Warning, Alert, Info };

enum class Cause : std::uint8_t {
    SingleLoss,
    TripleLoss,
    Removal,
    AdminFailover,
    Reentry,
    AuthFailure,
};

std::string_view to_string(Severity s);
std::string_view to_string(Cause c);

struct Notification {
    Severity severity = Severity::Info;
    NodeId   subject;
    Cause    cause = Cause::Removal;
    SimTime  at = 0;
    NodeId   reporter;

    friend bool operator==(const Notification&, const Notification&) = default;
};

/// Builds a notification, enforcing SingleLoss => Warning and
/// TripleLoss => Alert.
Notification make_notification(Cause    cause,
                               NodeId   subject,
                               SimTime  at,
                               NodeId   reporter,
                               Severity severity = Severity::Info);

// ============================================================================
//                                  Errors
// ============================================================================

/// Base of all domain errors; `code()` is a stable machine-readable name.
class Error : public std::runtime_error {
  public:
    Error(std::string code, const std::string& what)
    : std::runtime_error(what), code_(std::move(code))
    {
    }
    const std::string& code() const { return code_; }

  private:
    std::string code_;
};

}  // namespace ansim

template <>
struct std::hash<ansim::NodeId> {
    std::size_t operator()(ansim::NodeId id) const noexcept
    {
        return std::hash<std::uint32_t>{}(id.value);
    }
};
