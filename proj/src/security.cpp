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

// security.cpp                                                   -*-C++-*-
#include <ansim/security.hpp>

#include <sodium.h>

#include <algorithm>
#include <cstring>
#include <mutex>
#include <string>

namespace ansim {
namespace {

void ensure_sodium()
{
    static std::once_flag once;
    std::call_once(once, [] {
        if (sodium_init() < 0) {
            throw Error("CryptoInit", "libsodium initialization failed");
        }
    });
}

class ByteWriter {
  public:
    ByteWriter& u8(std::uint8_t v)
    {
        bytes_.push_back(v);
        return *this;
    }
    ByteWriter& u32(std::uint32_t v)
    {
        for (int i = 0; i < 4; ++i) {
            bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
        return *this;
    }
    ByteWriter& u64(std::uint64_t v)
    {
        for (int i = 0; i < 8; ++i) {
            bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
        return *this;
    }
    ByteWriter& bytes(std::span<const std::uint8_t> b)
    {
        u64(b.size());
        bytes_.insert(bytes_.end(), b.begin(), b.end());
        return *this;
    }
    ByteWriter& str(std::string_view s)
    {
        return bytes({reinterpret_cast<const std::uint8_t*>(s.data()), s.size()});
    }
    const std::vector<std::uint8_t>& data() const { return bytes_; }

  private:
    std::vector<std::uint8_t> bytes_;
};

// Header fields bound by the signature.  The payload is bound as it
// travels (ciphertext under AuthEncap).
std::vector<std::uint8_t> canonical_bytes(const Envelope& env,
                                          ProfileKind     profile)
{
    ByteWriter w;
    w.str("ansim.envelope.v1")
        .u8(static_cast<std::uint8_t>(profile))
        .u64(env.id)
        .u8(static_cast<std::uint8_t>(env.kind))
        .u32(env.sender.value)
        .u32(env.receiver.value)
        .u8(env.subject.has_value() ? 1 : 0)
        .u32(env.subject.value_or(NodeId{}).value)
        .u64(env.correlation)
        .u64(static_cast<std::uint64_t>(env.time_step))
        .u8(env.reply ? 1 : 0)
        .u64(static_cast<std::uint64_t>(env.sent_at))
        .u8(env.seal.confidential ? 1 : 0)
        .bytes(env.payload);
    return w.data();
}

// Counter-mode expansion of a digest to `len` bytes.
std::vector<std::uint8_t> expand(std::span<const std::uint8_t> key,
                                 const Digest&                 seed,
                                 std::size_t                   len)
{
    std::vector<std::uint8_t> out;
    out.reserve(len);
    for (std::uint32_t block = 0; out.size() < len; ++block) {
        ByteWriter ctr;
        ctr.u32(block);
        const Digest d = keyed_digest(key, {seed, ctr.data()});
        const std::size_t take = std::min(d.size(), len - out.size());
        out.insert(out.end(), d.begin(), d.begin() + static_cast<long>(take));
    }
    return out;
}

std::vector<std::uint8_t> signature_for(const Envelope& env,
                                        ProfileKind     profile,
                                        const Key&      key,
                                        std::size_t     sig_len)
{
    const auto   canon = canonical_bytes(env, profile);
    const Digest d = keyed_digest(key, {canon});
    return expand(key, d, sig_len);
}

std::vector<std::uint8_t> keystream(const Key&      session,
                                    const Envelope& env,
                                    std::size_t     len)
{
    ByteWriter nonce;
    nonce.str("ansim.keystream")
        .u64(env.id)
        .u32(env.sender.value)
        .u32(env.receiver.value)
        .u64(static_cast<std::uint64_t>(env.sent_at));
    const Digest seed = keyed_digest(session, {nonce.data()});
    return expand(session, seed, len);
}

std::vector<std::uint8_t> icv_for(const Envelope& env,
                                  const Key&      session,
                                  std::size_t     encap_overhead)
{
    ByteWriter w;
    w.str("ansim.icv").bytes(env.seal.tag);
    const auto   canon = canonical_bytes(env, ProfileKind::AuthEncap);
    const Digest d = keyed_digest(session, {canon, w.data()});
    const std::size_t n = std::min<std::size_t>(16, encap_overhead);
    return {d.begin(), d.begin() + static_cast<long>(n)};
}

bool equal_ct(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b)
{
    return a.size() == b.size() &&
           (a.empty() || sodium_memcmp(a.data(), b.data(), a.size()) == 0);
}

}  // namespace

Digest keyed_digest(std::span<const std::uint8_t>                        key,
                    std::initializer_list<std::span<const std::uint8_t>> parts)
{
    ensure_sodium();
    crypto_auth_hmacsha256_state st;
    crypto_auth_hmacsha256_init(&st, key.data(), key.size());
    for (const auto& p : parts) {
        crypto_auth_hmacsha256_update(&st, p.data(), p.size());
    }
    Digest out{};
    crypto_auth_hmacsha256_final(&st, out.data());
    return out;
}

// ---------------------------------------------------------------------------
// SecurityProfile

SecurityProfile SecurityProfile::unchecked(ProfileKind           variant,
                                           const SecurityParams& p)
{
    SecurityProfile s;
    s.variant = variant;
    switch (variant) {
    case ProfileKind::Plain: break;
    case ProfileKind::AuthOnly: s.sig_len = p.sig_len; break;
    case ProfileKind::AuthEncap:
        s.sig_len = p.sig_len;
        s.encap_overhead = p.encap_overhead;
        s.handshake_msgs = p.handshake_msgs;
        s.handshake_msg_len = p.handshake_msg_len;
        s.handshake_retries = p.handshake_retries;
        break;
    }
    return s;
}

SecurityProfile SecurityProfile::make(ProfileKind           variant,
                                      const SecurityParams& p)
{
    SecurityProfile s = unchecked(variant, p);
    if (variant != ProfileKind::Plain && s.sig_len == 0) {
        throw Error("InvalidProfile",
                    std::string(to_string(variant)) + " requires sig_len > 0");
    }
    if (variant == ProfileKind::AuthEncap &&
        (s.encap_overhead == 0 || s.handshake_msgs == 0)) {
        throw Error("InvalidProfile",
                    "auth-encap requires encap_overhead > 0 and "
                    "handshake_msgs > 0");
    }
    return s;
}

std::size_t SecurityProfile::wire_len_for(std::size_t payload_len) const
{
    return payload_len + sig_len + encap_overhead;
}

// ---------------------------------------------------------------------------
// KeyRegistry

std::string_view to_string(AuthorizationDecision d)
{
    switch (d) {
    case AuthorizationDecision::Granted: return "Granted";
    case AuthorizationDecision::Unregistered: return "Unregistered";
    case AuthorizationDecision::DuplicateHardwareId:
        return "DuplicateHardwareId";
    }
    return "?";
}

KeyRegistry::KeyRegistry(Key master) : master_(master) {}

void KeyRegistry::register_hardware(std::uint64_t hw) { registry_.insert(hw); }

bool KeyRegistry::is_registered(std::uint64_t hw) const
{
    return registry_.contains(hw);
}

AuthorizationDecision KeyRegistry::authorize(const NodeProfile& node)
{
    if (!is_registered(node.hardware_id)) {
        return AuthorizationDecision::Unregistered;
    }
    auto it = granted_hw_.find(node.hardware_id);
    if (it != granted_hw_.end() && it->second != node.node_id) {
        return AuthorizationDecision::DuplicateHardwareId;
    }
    granted_hw_[node.hardware_id] = node.node_id;
    authorized_.insert(node.node_id);
    return AuthorizationDecision::Granted;
}

void KeyRegistry::grant(NodeId id) { authorized_.insert(id); }

void KeyRegistry::revoke(NodeId id) { authorized_.erase(id); }

bool KeyRegistry::is_authorized(NodeId id) const
{
    return authorized_.contains(id);
}

std::optional<Key> KeyRegistry::signing_key(NodeId id) const
{
    if (!is_authorized(id)) {
        return std::nullopt;
    }
    ByteWriter w;
    w.str("ansim.signing").u32(id.value);
    return keyed_digest(master_, {w.data()});
}

Key KeyRegistry::derive_session_key(NodeId a, NodeId b) const
{
    ByteWriter w;
    w.str("ansim.session")
        .u32(std::min(a, b).value)
        .u32(std::max(a, b).value);
    return keyed_digest(master_, {w.data()});
}

void KeyRegistry::install_session(NodeId holder, NodeId peer)
{
    sessions_[{holder, peer}] = derive_session_key(holder, peer);
}

bool KeyRegistry::has_session(NodeId holder, NodeId peer) const
{
    return sessions_.contains({holder, peer});
}

std::optional<Key> KeyRegistry::session_key(NodeId holder, NodeId peer) const
{
    auto it = sessions_.find({holder, peer});
    if (it == sessions_.end()) {
        return std::nullopt;
    }
    return it->second;
}

// ---------------------------------------------------------------------------
// wrap / unwrap

Envelope seal_unprotected(Envelope env)
{
    env.seal = Seal{};
    env.wire_len = env.payload.size();
    return env;
}

Envelope wrap(Envelope env, const SecurityProfile& profile,
              const KeyRegistry& keys)
{
    env.seal = Seal{};
    env.seal.profile = profile.variant;
    if (profile.variant == ProfileKind::Plain ||
        category_of(env.kind) == Category::Security) {
        env.seal.profile = profile.variant;
        env.wire_len = env.payload.size();
        return env;
    }

    const auto signing = keys.signing_key(env.sender);
    if (!signing) {
        throw Error("UnauthorizedSender",
                    "node " + to_string(env.sender) + " is not authorized");
    }

    std::optional<Key> session;
    if (profile.variant == ProfileKind::AuthEncap) {
        session = keys.session_key(env.sender, env.receiver);
        if (!session) {
            throw Error("NoSessionKey",
                        "no session between " + to_string(env.sender) +
                            " and " + to_string(env.receiver));
        }
        const auto ks = keystream(*session, env, env.payload.size());
        for (std::size_t i = 0; i < env.payload.size(); ++i) {
            env.payload[i] ^= ks[i];
        }
        env.seal.confidential = true;
    }

    const std::size_t payload_len = env.payload.size();
    env.seal.tag = signature_for(env, profile.variant, *signing, profile.sig_len);
    if (session) {
        env.seal.icv = icv_for(env, *session, profile.encap_overhead);
    }
    env.wire_len = profile.wire_len_for(payload_len);
    return env;
}

std::string_view to_string(UnwrapError e)
{
    switch (e) {
    case UnwrapError::None: return "None";
    case UnwrapError::TagMismatch: return "TagMismatch";
    case UnwrapError::WrongSessionKey: return "WrongSessionKey";
    case UnwrapError::ProfileMismatch: return "ProfileMismatch";
    }
    return "?";
}

UnwrapResult unwrap(const Envelope&        env,
                    const SecurityProfile& profile,
                    const KeyRegistry&     keys,
                    NodeId                 reader)
{
    UnwrapResult r;
    const bool exempt = category_of(env.kind) == Category::Security;

    if (env.seal.profile != profile.variant) {
        r.error = UnwrapError::ProfileMismatch;
        return r;
    }
    const std::size_t expected_wire =
        (exempt || profile.variant == ProfileKind::Plain)
            ? env.payload.size()
            : profile.wire_len_for(env.payload.size());
    if (env.wire_len != expected_wire) {
        r.error = UnwrapError::ProfileMismatch;
        return r;
    }
    if (exempt || profile.variant == ProfileKind::Plain) {
        r.payload = env.payload;
        return r;
    }

    const bool wants_confidential = profile.variant == ProfileKind::AuthEncap;
    if (env.seal.confidential != wants_confidential) {
        r.error = UnwrapError::TagMismatch;
        return r;
    }

    const auto signing = keys.signing_key(env.sender);
    if (!signing ||
        !equal_ct(env.seal.tag,
                  signature_for(env, profile.variant, *signing,
                                profile.sig_len))) {
        r.error = UnwrapError::TagMismatch;
        return r;
    }

    if (!wants_confidential) {
        r.payload = env.payload;
        return r;
    }

    const auto session = keys.session_key(reader, env.sender);
    if (!session ||
        !equal_ct(env.seal.icv, icv_for(env, *session, profile.encap_overhead))) {
        r.error = UnwrapError::WrongSessionKey;
        return r;
    }
    r.payload = env.payload;
    const auto ks = keystream(*session, env, r.payload.size());
    for (std::size_t i = 0; i < r.payload.size(); ++i) {
        r.payload[i] ^= ks[i];
    }
    return r;
}

// ---------------------------------------------------------------------------
// Handshake

SessionEstablishment establish_session(NodeId                 a,
                                       NodeId                 b,
                                       const SecurityProfile& profile,
                                       KeyRegistry&           keys)
{
    if (profile.variant != ProfileKind::AuthEncap) {
        throw Error("ProfileMismatch",
                    "sessions exist only under the auth-encap profile");
    }
    if (!keys.is_authorized(a) || !keys.is_authorized(b)) {
        throw Error("UnauthorizedSender",
                    "both ends of a session must be authorized");
    }
    SessionEstablishment out;
    out.key = keys.derive_session_key(a, b);
    if (keys.has_session(a, b) && keys.has_session(b, a)) {
        return out;
    }

    Handshake ia(a, b, true, profile);
    Handshake rb(b, a, false, profile);
    std::optional<Envelope> msg = ia.start();
    bool from_a = true;
    while (msg) {
        out.messages.push_back(*msg);
        Envelope delivered = *msg;
        msg = from_a ? rb.on_message(delivered) : ia.on_message(delivered);
        from_a = !from_a;
    }
    keys.install_session(a, b);
    keys.install_session(b, a);
    return out;
}

Handshake::Handshake(NodeId self, NodeId peer, bool initiator,
                     const SecurityProfile& profile)
: self_(self)
, peer_(peer)
, initiator_(initiator)
, total_(profile.handshake_msgs)
, msg_len_(profile.handshake_msg_len)
, retry_budget_(profile.handshake_retries)
{
    if (total_ == 0) {
        state_ = State::Established;
    }
}

Envelope Handshake::make(std::uint32_t index) const
{
    Envelope env;
    env.kind = EnvelopeKind::KeyExchange;
    env.sender = self_;
    env.receiver = peer_;
    env.correlation = index;
    env.payload.assign(msg_len_, static_cast<std::uint8_t>(0xA0 + index));
    env.wire_len = msg_len_;
    return env;
}

Envelope Handshake::start()
{
    Envelope env = make(0);
    last_sent_ = env;
    if (total_ == 1) {
        state_ = State::Established;
    }
    return env;
}

std::optional<Envelope> Handshake::on_message(const Envelope& env)
{
    if (env.kind != EnvelopeKind::KeyExchange || env.sender != peer_ ||
        state_ == State::TimedOut) {
        return std::nullopt;
    }
    const auto index = static_cast<std::uint32_t>(env.correlation);
    const bool from_initiator = index % 2 == 0;
    if (from_initiator == initiator_ || index >= total_) {
        return std::nullopt;
    }

    // Duplicate of something we already answered: answer again.
    if (last_received_ && index <= *last_received_) {
        if (last_sent_ && last_sent_->correlation == index + 1) {
            return last_sent_;
        }
        return std::nullopt;
    }
    last_received_ = index;

    if (index + 1 == total_) {
        state_ = State::Established;
        return std::nullopt;
    }
    Envelope reply = make(index + 1);
    last_sent_ = reply;
    if (index + 2 == total_) {
        state_ = State::Established;
    }
    return reply;
}

std::optional<Envelope> Handshake::on_timeout()
{
    if (state_ != State::Pending || !last_sent_) {
        return std::nullopt;
    }
    if (retries_ >= retry_budget_) {
        state_ = State::TimedOut;
        return std::nullopt;
    }
    ++retries_;
    return last_sent_;
}

// ---------------------------------------------------------------------------
// TOTA

std::string_view to_string(TotaVerdict v)
{
    switch (v) {
    case TotaVerdict::Accept: return "Accept";
    case TotaVerdict::ReplayDetected: return "ReplayDetected";
    case TotaVerdict::SkewExceeded: return "SkewExceeded";
    case TotaVerdict::BadDigest: return "BadDigest";
    }
    return "?";
}

TotaState::TotaState(Key secret, TotaConfig config)
: secret_(secret)
, config_(config)
{
    if (config_.time_step_ms <= 0) {
        throw Error("InvalidTotaConfig", "time step must be positive");
    }
}

std::int64_t TotaState::step_at(SimTime at) const
{
    // floor division; simulated time is never negative in practice
    std::int64_t q = at / config_.time_step_ms;
    if (at % config_.time_step_ms != 0 && at < 0) {
        --q;
    }
    return q;
}

TotaChallenge TotaState::challenge(NodeId verifier, NodeId prover,
                                   SimTime at, std::uint64_t nonce)
{
    issued_[nonce] = prover;
    return TotaChallenge{verifier, prover, nonce, step_at(at)};
}

Digest TotaState::expected_digest(NodeId prover, std::uint64_t nonce,
                                  std::int64_t step) const
{
    ByteWriter w;
    w.str("ansim.tota")
        .u32(prover.value)
        .u64(nonce)
        .u64(static_cast<std::uint64_t>(step));
    return keyed_digest(secret_, {w.data()});
}

TotaResponse TotaState::respond(const TotaChallenge& ch, SimTime at) const
{
    const std::int64_t step = step_at(at);
    return TotaResponse{ch.prover, ch.nonce, step,
                        expected_digest(ch.prover, ch.nonce, step)};
}

TotaVerdict TotaState::verify(const TotaResponse& response, SimTime at)
{
    auto it = issued_.find(response.nonce);
    if (it == issued_.end() || it->second != response.prover) {
        return TotaVerdict::BadDigest;
    }
    const Digest want =
        expected_digest(response.prover, response.nonce, response.step);
    if (!equal_ct(want, response.digest)) {
        return TotaVerdict::BadDigest;
    }
    const std::int64_t current = step_at(at);
    const std::int64_t skew = response.step - current;
    if (skew > static_cast<std::int64_t>(config_.skew_tolerance) ||
        -skew > static_cast<std::int64_t>(config_.skew_tolerance)) {
        return TotaVerdict::SkewExceeded;
    }
    if (!used_.emplace(response.nonce, response.step).second) {
        return TotaVerdict::ReplayDetected;
    }
    return TotaVerdict::Accept;
}

Envelope to_envelope(const TotaChallenge& ch)
{
    Envelope env;
    env.kind = EnvelopeKind::AuthChallenge;
    env.sender = ch.verifier;
    env.receiver = ch.prover;
    env.correlation = ch.nonce;
    env.time_step = ch.step;
    ByteWriter w;
    w.u64(ch.nonce).u64(static_cast<std::uint64_t>(ch.step)).u32(
        ch.verifier.value).u32(ch.prover.value);
    env.payload = w.data();
    env.wire_len = env.payload.size();
    return env;
}

Envelope to_envelope(const TotaResponse& r, NodeId verifier)
{
    Envelope env;
    env.kind = EnvelopeKind::AuthResponse;
    env.sender = r.prover;
    env.receiver = verifier;
    env.correlation = r.nonce;
    env.time_step = r.step;
    env.payload.assign(r.digest.begin(), r.digest.end());
    env.wire_len = env.payload.size();
    return env;
}

TotaChallenge challenge_from_envelope(const Envelope& env)
{
    return TotaChallenge{env.sender, env.receiver, env.correlation,
                         env.time_step};
}

TotaResponse response_from_envelope(const Envelope& env)
{
    TotaResponse r;
    r.prover = env.sender;
    r.nonce = env.correlation;
    r.step = env.time_step;
    std::copy_n(env.payload.begin(),
                std::min(env.payload.size(), r.digest.size()),
                r.digest.begin());
    return r;
}

}  // namespace ansim
