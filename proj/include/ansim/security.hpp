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

// security.hpp                                                   -*-C++-*-
#pragma once

// Security envelopes for the three monitoring profiles.
//
// Cryptography is modeled with keyed HMAC-SHA256 digests rather than
// interoperable DSA/IPSec/ECDH encodings.  Lengths are accounted honestly:
//
//: Plain      wire_len = payload_len
//: AuthOnly   wire_len = payload_len + sig_len
//: AuthEncap  wire_len = payload_len + sig_len + encap_overhead
//
// Security-category envelopes (authorization, TOTA, key exchange) are never
// wrapped; their payload already carries their cryptographic material.

#include <ansim/core_model.hpp>

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <utility>
#include <vector>

namespace ansim {

using Key = std::array<std::uint8_t, 32>;
using Digest = std::array<std::uint8_t, 32>;

/// HMAC-SHA256 over the concatenation of `parts`.
Digest keyed_digest(std::span<const std::uint8_t>                 key,
                    std::initializer_list<std::span<const std::uint8_t>> parts);

// ============================================================================
//                               SecurityProfile
// ============================================================================

/// Scenario-level security parameters, shared by all three profiles.
struct SecurityParams {
    std::size_t   sig_len = 40;
    std::size_t   encap_overhead = 320;
    std::uint32_t handshake_msgs = 2;
    std::size_t   handshake_msg_len = 64;
    std::uint32_t handshake_retries = 3;
    SimTime       tota_time_step_ms = 30'000;
    std::uint32_t tota_skew_tolerance = 1;

    friend bool operator==(const SecurityParams&, const SecurityParams&) = default;
};

struct SecurityProfile {
    ProfileKind   variant = ProfileKind::Plain;
    std::size_t   sig_len = 0;
    std::size_t   encap_overhead = 0;
    std::uint32_t handshake_msgs = 0;
    std::size_t   handshake_msg_len = 0;
    std::uint32_t handshake_retries = 0;

    /// Projects `params` onto `variant` and checks the per-variant
    /// invariants; throws `Error("InvalidProfile")`.
    static SecurityProfile make(ProfileKind variant, const SecurityParams& params);

    /// Same projection without the invariant check.  Used to run degenerate
    /// (zero-overhead) comparisons.
    static SecurityProfile unchecked(ProfileKind variant,
                                     const SecurityParams& params);

    /// Wire length of a wrapped envelope with `payload_len` payload bytes.
    std::size_t wire_len_for(std::size_t payload_len) const;

    friend bool operator==(const SecurityProfile&, const SecurityProfile&) = default;
};

// ============================================================================
//                                 KeyRegistry
// ============================================================================

enum class AuthorizationDecision : std::uint8_t {
    Granted,
    Unregistered,
    DuplicateHardwareId,
};

std::string_view to_string(AuthorizationDecision d);

/// Signing keys, pairwise session keys and the CMU hardware-id registry.
/// Session keys are held per (holder, peer): a handshake side holds the key
/// once its half of the exchange completes.
class KeyRegistry {
  public:
    explicit KeyRegistry(Key master);

    void register_hardware(std::uint64_t hardware_id);
    bool is_registered(std::uint64_t hardware_id) const;

    /// Grants iff the hardware id is registered and not already granted to
    /// another node.  A granted node receives a signing key.
    AuthorizationDecision authorize(const NodeProfile& node);

    /// Authorizes `id` unconditionally (the CMU, or every node under the
    /// plain profile).
    void grant(NodeId id);
    void revoke(NodeId id);
    bool is_authorized(NodeId id) const;

    /// Signing key of an authorized node, derived from the master key.
    std::optional<Key> signing_key(NodeId id) const;

    /// Session key a and b converge on (independent of who holds it).
    Key  derive_session_key(NodeId a, NodeId b) const;
    void install_session(NodeId holder, NodeId peer);
    bool has_session(NodeId holder, NodeId peer) const;
    std::optional<Key> session_key(NodeId holder, NodeId peer) const;

  private:
    Key                                          master_;
    std::set<std::uint64_t>                      registry_;
    std::map<std::uint64_t, NodeId>              granted_hw_;
    std::set<NodeId>                             authorized_;
    std::map<std::pair<NodeId, NodeId>, Key>     sessions_;
};

// ============================================================================
//                                 wrap/unwrap
// ============================================================================

/// Seals `env` for transmission.  `env.sent_at` must already be the send
/// time.  Throws `Error("UnauthorizedSender")` or `Error("NoSessionKey")`.
Envelope wrap(Envelope env, const SecurityProfile& profile,
              const KeyRegistry& keys);

/// Marks `env` as carried without protection (wire_len = payload_len).
Envelope seal_unprotected(Envelope env);

enum class UnwrapError : std::uint8_t {
    None,
    TagMismatch,
    WrongSessionKey,
    ProfileMismatch,
};

std::string_view to_string(UnwrapError e);

struct UnwrapResult {
    UnwrapError               error = UnwrapError::None;
    std::vector<std::uint8_t> payload;

    bool ok() const { return error == UnwrapError::None; }
};

/// Verifies and opens `env` as read by `reader` under `profile`.
UnwrapResult unwrap(const Envelope&        env,
                    const SecurityProfile& profile,
                    const KeyRegistry&     keys,
                    NodeId                 reader);

// ============================================================================
//                              Session handshake
// ============================================================================

struct SessionEstablishment {
    Key                   key{};
    std::vector<Envelope> messages;
};

/// Lossless handshake between `a` and `b`: `handshake_msgs` KeyExchange
/// envelopes of `handshake_msg_len` bytes, alternating a->b, b->a.  Installs
/// the session for both sides; returns no messages if it already exists.
/// Throws `Error("ProfileMismatch")` unless the profile is AuthEncap, and
/// `Error("UnauthorizedSender")` unless both ends are authorized.
SessionEstablishment establish_session(NodeId                 a,
                                       NodeId                 b,
                                       const SecurityProfile& profile,
                                       KeyRegistry&           keys);

/// One side of a lossy KeyExchange.  Messages are numbered
/// `0..handshake_msgs-1`; even ones come from the initiator.  A side that
/// times out resends its last message, up to `handshake_retries` times.
class Handshake {
  public:
    enum class State : std::uint8_t { Pending, Established, TimedOut };

    Handshake(NodeId self, NodeId peer, bool initiator,
              const SecurityProfile& profile);

    /// Initiator only: the first message.
    Envelope start();

    /// Handles a KeyExchange from the peer; returns the reply to send, if
    /// any.  Duplicates of an already-answered message are answered again.
    std::optional<Envelope> on_message(const Envelope& env);

    /// Retransmission timer expired without progress.
    std::optional<Envelope> on_timeout();

    State         state() const { return state_; }
    bool          established() const { return state_ == State::Established; }
    std::uint32_t retries_used() const { return retries_; }
    NodeId        peer() const { return peer_; }
    bool          initiator() const { return initiator_; }

  private:
    Envelope make(std::uint32_t index) const;

    NodeId                  self_;
    NodeId                  peer_;
    bool                    initiator_;
    std::uint32_t           total_;
    std::size_t             msg_len_;
    std::uint32_t           retry_budget_;
    std::uint32_t           retries_ = 0;
    State                   state_ = State::Pending;
    std::optional<Envelope> last_sent_;
    std::optional<std::uint32_t> last_received_;
};

// ============================================================================
//                                    TOTA
// ============================================================================

struct TotaConfig {
    SimTime       time_step_ms = 30'000;
    std::uint32_t skew_tolerance = 1;
};

struct TotaChallenge {
    NodeId        verifier;
    NodeId        prover;
    std::uint64_t nonce = 0;
    std::int64_t  step = 0;
};

struct TotaResponse {
    NodeId        prover;
    std::uint64_t nonce = 0;
    std::int64_t  step = 0;
    Digest        digest{};
};

enum class TotaVerdict : std::uint8_t {
    Accept,
    ReplayDetected,
    SkewExceeded,
    BadDigest,
};

std::string_view to_string(TotaVerdict v);

inline constexpr std::size_t kTotaChallengeLen = 24;
inline constexpr std::size_t kTotaResponseLen = 32;

/// Time-step challenge/response keyed by a pre-shared network secret.
/// Each accepted (nonce, step) pair enters a replay set and never verifies
/// again.
class TotaState {
  public:
    TotaState(Key shared_network_secret, TotaConfig config);

    std::int64_t step_at(SimTime at) const;

    /// Fresh challenge; `nonce` comes from the kernel's generator.
    TotaChallenge challenge(NodeId verifier, NodeId prover, SimTime at,
                            std::uint64_t nonce);

    /// Prover side: digest over (secret, prover, nonce, step at `at`).
    TotaResponse respond(const TotaChallenge& ch, SimTime at) const;

    TotaVerdict verify(const TotaResponse& response, SimTime at);

    Digest expected_digest(NodeId prover, std::uint64_t nonce,
                           std::int64_t step) const;

    const TotaConfig& config() const { return config_; }
    std::size_t       replay_set_size() const { return used_.size(); }

  private:
    Key                                            secret_;
    TotaConfig                                     config_;
    std::map<std::uint64_t, NodeId>                issued_;
    std::set<std::pair<std::uint64_t, std::int64_t>> used_;
};

Envelope to_envelope(const TotaChallenge& ch);
Envelope to_envelope(const TotaResponse& r, NodeId verifier);
TotaChallenge challenge_from_envelope(const Envelope& env);
TotaResponse  response_from_envelope(const Envelope& env);

}  // namespace ansim
