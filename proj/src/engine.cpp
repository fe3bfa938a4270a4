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

// engine.cpp                                                     -*-C++-*-
#include <ansim/engine.hpp>

#include <algorithm>
#include <string>

namespace ansim {
namespace {

constexpr std::uint32_t kAuthAttempts = 4;  // first request plus 3 retries

Key draw_key(Kernel& kernel)
{
    Key key{};
    for (std::size_t i = 0; i < key.size(); i += 8) {
        const std::uint64_t v = kernel.next_random();
        for (std::size_t j = 0; j < 8; ++j) {
            key[i + j] = static_cast<std::uint8_t>(v >> (8 * j));
        }
    }
    return key;
}

std::vector<std::uint8_t> filler(EnvelopeKind kind, std::size_t len)
{
    return std::vector<std::uint8_t>(len,
                                     static_cast<std::uint8_t>(0x30 +
                                                               static_cast<int>(kind)));
}

}  // namespace

PayloadSizes default_payload_sizes()
{
    PayloadSizes p;
    for (EnvelopeKind k : kAllEnvelopeKinds) {
        p[k] = 120;
    }
    p[EnvelopeKind::Ping] = 16;
    p[EnvelopeKind::Pong] = 16;
    p[EnvelopeKind::DiagnosticProbe] = 16;
    p[EnvelopeKind::AuthorizationRequest] = 16;
    p[EnvelopeKind::AuthorizationGrant] = 16;
    // challenge, response and key-exchange sizes follow the security
    // parameters, not this table
    p.erase(EnvelopeKind::AuthChallenge);
    p.erase(EnvelopeKind::AuthResponse);
    p.erase(EnvelopeKind::KeyExchange);
    return p;
}

ProtocolEngine::ProtocolEngine(Kernel& kernel, EngineConfig config,
                               RunReport& report)
: kernel_(kernel)
, cfg_(std::move(config))
, report_(report)
, keys_(draw_key(kernel))
, network_secret_(draw_key(kernel))
{
    NodeState cmu;
    cmu.profile = NodeProfile{kCmuId, 0, 0, Role::Cmu, NodeStatus::Active};
    cmu.joined = true;
    nodes_.emplace(kCmuId, cmu);
    keys_.grant(kCmuId);

    for (const NodeProfile& p : cfg_.nodes) {
        if (p.node_id.is_cmu() || p.node_id.is_broadcast()) {
            throw Error("InvalidNode",
                        "node id " + to_string(p.node_id) + " is reserved");
        }
        if (!kernel_.is_known(p.node_id)) {
            throw Error("UnknownReceiver",
                        "node " + to_string(p.node_id) +
                            " is not known to the kernel");
        }
        NodeState st;
        st.profile = p;
        st.profile.status = NodeStatus::Active;
        if (!nodes_.emplace(p.node_id, st).second) {
            throw Error("DuplicateNode",
                        "node " + to_string(p.node_id) + " listed twice");
        }
    }
    for (std::uint64_t hw : cfg_.registry) {
        keys_.register_hardware(hw);
    }
}

// ---------------------------------------------------------------------------
// accessors

ProtocolEngine::NodeState& ProtocolEngine::state(NodeId id)
{
    auto it = nodes_.find(id);
    if (it == nodes_.end()) {
        throw Error("UnknownNode", "no node " + to_string(id));
    }
    return it->second;
}

const ProtocolEngine::NodeState& ProtocolEngine::state(NodeId id) const
{
    auto it = nodes_.find(id);
    if (it == nodes_.end()) {
        throw Error("UnknownNode", "no node " + to_string(id));
    }
    return it->second;
}

bool ProtocolEngine::is_up(NodeId id) const
{
    return state(id).profile.status == NodeStatus::Active &&
           !kernel_.is_crashed(id);
}

const NodeProfile& ProtocolEngine::node(NodeId id) const
{
    return state(id).profile;
}

std::vector<NodeProfile> ProtocolEngine::nodes() const
{
    std::vector<NodeProfile> out;
    for (const auto& [id, st] : nodes_) {
        out.push_back(st.profile);
    }
    return out;
}

std::optional<NodeId> ProtocolEngine::administrator() const
{
    for (const auto& [id, st] : nodes_) {
        if (st.profile.role == Role::Administrator) {
            return id;
        }
    }
    return std::nullopt;
}

bool ProtocolEngine::cmu_supervising() const { return cmu_supervising_; }
bool ProtocolEngine::round_active() const { return round_.active; }

bool ProtocolEngine::is_joined(NodeId id) const { return state(id).joined; }

const MonitorState* ProtocolEngine::monitor(NodeId watcher,
                                            NodeId watched) const
{
    auto w = nodes_.find(watcher);
    if (w == nodes_.end()) {
        return nullptr;
    }
    auto it = w->second.monitors.find(watched);
    return it == w->second.monitors.end() ? nullptr : &it->second;
}

const KeyRegistry& ProtocolEngine::keys() const { return keys_; }

bool ProtocolEngine::auth_enabled() const
{
    return cfg_.profile.variant != ProfileKind::Plain &&
           cfg_.profile.sig_len > 0;
}

NodeId ProtocolEngine::supervisor() const
{
    if (cmu_supervising_) {
        return kCmuId;
    }
    return administrator().value_or(kCmuId);
}

// ---------------------------------------------------------------------------
// envelope plumbing

Envelope ProtocolEngine::make_envelope(EnvelopeKind          kind,
                                       NodeId                from,
                                       NodeId                to,
                                       std::optional<NodeId> subject,
                                       std::uint64_t         correlation)
{
    Envelope env;
    env.kind = kind;
    env.sender = from;
    env.receiver = to;
    env.subject = subject;
    env.correlation = correlation;
    auto it = cfg_.payloads.find(kind);
    env.payload = filler(kind, it == cfg_.payloads.end() ? 0 : it->second);
    env.wire_len = env.payload.size();
    return env;
}

Envelope ProtocolEngine::stamp(Envelope env)
{
    env.id = next_id_++;
    env.sent_at = now();
    return env;
}

std::optional<Envelope> ProtocolEngine::secure(Envelope env)
{
    const ProfileKind v = cfg_.profile.variant;
    if (v == ProfileKind::Plain ||
        category_of(env.kind) == Category::Security) {
        return wrap(stamp(std::move(env)), cfg_.profile, keys_);
    }
    if (!keys_.is_authorized(env.sender)) {
        return seal_unprotected(stamp(std::move(env)));
    }
    if (v == ProfileKind::AuthOnly ||
        keys_.has_session(env.sender, env.receiver)) {
        return wrap(stamp(std::move(env)), cfg_.profile, keys_);
    }
    if (auth_denied_.contains(env.receiver)) {
        return seal_unprotected(stamp(std::move(env)));
    }
    const NodeId from = env.sender;
    const NodeId to = env.receiver;
    pending_sends_[{from, to}].push_back(std::move(env));
    if (keys_.is_authorized(to)) {
        ensure_session(std::min(from, to), std::max(from, to));
    }
    return std::nullopt;
}

void ProtocolEngine::transmit_raw(Envelope env)
{
    if (kernel_.is_crashed(env.sender)) {
        return;
    }
    if (env.id == 0) {
        env = stamp(std::move(env));
    }
    kernel_.send(std::move(env));
}

void ProtocolEngine::post(Envelope env)
{
    if (kernel_.is_crashed(env.sender)) {
        return;
    }
    if (category_of(env.kind) != Category::Security) {
        shape_.push_back(
            ShapeTuple{env.kind, env.sender, env.receiver, env.payload_len()});
    }
    if (auto ready = secure(std::move(env))) {
        transmit_raw(std::move(*ready));
    }
}

void ProtocolEngine::post_broadcast(EnvelopeKind kind, NodeId from,
                                    std::optional<NodeId> subject)
{
    if (kernel_.is_crashed(from)) {
        return;
    }
    std::vector<Envelope> ready;
    for (const auto& [id, st] : nodes_) {
        if (id == from || st.profile.status != NodeStatus::Active) {
            continue;
        }
        Envelope env = make_envelope(kind, from, id, subject);
        shape_.push_back(ShapeTuple{kind, from, id, env.payload_len()});
        if (auto sealed = secure(std::move(env))) {
            ready.push_back(std::move(*sealed));
        }
    }
    kernel_.transmit(std::move(ready));
}

void ProtocolEngine::flush_pending(NodeId holder, NodeId peer, bool protect)
{
    auto it = pending_sends_.find({holder, peer});
    if (it == pending_sends_.end()) {
        return;
    }
    std::vector<Envelope> queued = std::move(it->second);
    pending_sends_.erase(it);
    for (Envelope& env : queued) {
        Envelope out = stamp(std::move(env));
        out = protect ? wrap(std::move(out), cfg_.profile, keys_)
                      : seal_unprotected(std::move(out));
        transmit_raw(std::move(out));
    }
}

// ---------------------------------------------------------------------------
// security exchanges

NodeId ProtocolEngine::authorizer() const
{
    for (const auto& [id, st] : nodes_) {
        if (st.profile.role == Role::AuthenticityProvider && st.joined &&
            is_up(id)) {
            return id;
        }
    }
    return kCmuId;
}

TotaState& ProtocolEngine::tota_for(NodeId verifier)
{
    auto it = tota_.find(verifier);
    if (it == tota_.end()) {
        it = tota_
                 .emplace(verifier,
                          TotaState(network_secret_,
                                    TotaConfig{cfg_.params.tota_time_step_ms,
                                               cfg_.params.tota_skew_tolerance}))
                 .first;
    }
    return it->second;
}

void ProtocolEngine::start_authorization(NodeId n)
{
    NodeState& st = state(n);
    ++st.auth_attempts;
    const std::uint64_t gen = ++st.auth_gen;
    post(make_envelope(EnvelopeKind::AuthorizationRequest, n, authorizer(),
                       std::nullopt, st.profile.hardware_id));
    kernel_.schedule(now() + cfg_.timers.rtt_timeout,
                     TimerFire{n, TimerKind::AuthRetry, authorizer(), gen});
}

void ProtocolEngine::on_auth_retry(NodeId n, std::uint64_t token)
{
    NodeState& st = state(n);
    if (token != st.auth_gen || st.joined) {
        return;
    }
    if (st.auth_attempts < kAuthAttempts) {
        start_authorization(n);
        return;
    }
    // gave up
    ++st.auth_gen;
    note_auth_failure(authorizer(), n, true);
    auth_denied_.insert(n);
    for (const auto& [id, other] : nodes_) {
        flush_pending(id, n, false);
        flush_pending(n, id, false);
    }
    if (st.profile.status == NodeStatus::Reentering) {
        st.profile.status = NodeStatus::Removed;
        start_probing(n);
    }
}

void ProtocolEngine::on_security_message(const Envelope& env)
{
    const NodeId r = env.receiver;
    const NodeId s = env.sender;
    switch (env.kind) {
    case EnvelopeKind::AuthorizationRequest: {
        NodeProfile claim = state(s).profile;
        claim.hardware_id = env.correlation;
        const auto decision = keys_.authorize(claim);
        if (decision != AuthorizationDecision::Granted) {
            note_auth_failure(r, s, true);
            return;
        }
        post(make_envelope(EnvelopeKind::AuthorizationGrant, r, s));
        const TotaChallenge ch =
            tota_for(r).challenge(r, s, now(), kernel_.next_random());
        transmit_raw(to_envelope(ch));
        return;
    }
    case EnvelopeKind::AuthorizationGrant: return;
    case EnvelopeKind::AuthChallenge: {
        if (state(r).joined && state(r).profile.status == NodeStatus::Active) {
            return;
        }
        const TotaChallenge ch = challenge_from_envelope(env);
        transmit_raw(to_envelope(tota_for(s).respond(ch, now()), s));
        return;
    }
    case EnvelopeKind::AuthResponse: {
        const TotaVerdict v = tota_for(r).verify(response_from_envelope(env),
                                                 now());
        if (v != TotaVerdict::Accept) {
            note_auth_failure(r, s, true);
            return;
        }
        NodeState& st = state(s);
        if (!st.joined || st.profile.status == NodeStatus::Reentering) {
            on_joined(s);
        }
        return;
    }
    case EnvelopeKind::KeyExchange: on_key_exchange(env); return;
    default: return;
    }
}

void ProtocolEngine::on_joined(NodeId n)
{
    NodeState& st = state(n);
    st.joined = true;
    ++st.auth_gen;
    st.auth_attempts = 0;
    auth_denied_.erase(n);

    if (cfg_.profile.variant == ProfileKind::AuthEncap) {
        for (const auto& [id, other] : nodes_) {
            if (id != n && other.joined) {
                ensure_session(std::min(id, n), std::max(id, n));
            }
        }
    }

    if (st.profile.status == NodeStatus::Reentering) {
        complete_reentry(n);
        return;
    }
    if (started_ && st.profile.status == NodeStatus::Active) {
        attach_monitors(n);
    }
}

void ProtocolEngine::ensure_session(NodeId a, NodeId b)
{
    if (cfg_.profile.variant != ProfileKind::AuthEncap) {
        return;
    }
    if (keys_.has_session(a, b) && keys_.has_session(b, a)) {
        return;
    }
    if (!keys_.is_authorized(a) || !keys_.is_authorized(b)) {
        return;
    }
    if (cfg_.profile.handshake_msgs == 0) {
        keys_.install_session(a, b);
        keys_.install_session(b, a);
        flush_pending(a, b, true);
        flush_pending(b, a, true);
        return;
    }
    auto existing = handshakes_.find({a, b});
    if (existing != handshakes_.end() &&
        existing->second.state() == Handshake::State::Pending) {
        return;
    }
    handshakes_.erase({a, b});
    handshakes_.erase({b, a});
    auto& ha = handshakes_.emplace(Pair{a, b}, Handshake(a, b, true, cfg_.profile))
                   .first->second;
    handshakes_.emplace(Pair{b, a}, Handshake(b, a, false, cfg_.profile));
    transmit_raw(ha.start());
    if (ha.established()) {
        keys_.install_session(a, b);
        flush_pending(a, b, true);
        return;
    }
    arm_handshake_retry(a, b);
}

void ProtocolEngine::arm_handshake_retry(NodeId self, NodeId peer)
{
    const std::uint64_t gen = ++handshake_gen_[{self, peer}];
    kernel_.schedule(now() + cfg_.timers.rtt_timeout,
                     TimerFire{self, TimerKind::HandshakeRetry, peer, gen});
}

void ProtocolEngine::on_handshake_retry(NodeId self, NodeId peer,
                                        std::uint64_t token)
{
    if (handshake_gen_[{self, peer}] != token) {
        return;
    }
    auto it = handshakes_.find({self, peer});
    if (it == handshakes_.end() || it->second.established()) {
        return;
    }
    if (auto again = it->second.on_timeout()) {
        transmit_raw(std::move(*again));
        arm_handshake_retry(self, peer);
        return;
    }
    // retries exhausted: whatever waited on this pair goes out unprotected
    handshakes_.erase({self, peer});
    handshakes_.erase({peer, self});
    flush_pending(self, peer, false);
    flush_pending(peer, self, false);
}

void ProtocolEngine::on_key_exchange(const Envelope& env)
{
    const NodeId r = env.receiver;
    const NodeId s = env.sender;
    auto it = handshakes_.find({r, s});
    if (it == handshakes_.end()) {
        return;
    }
    Handshake& hs = it->second;
    const bool was_established = hs.established();
    if (auto reply = hs.on_message(env)) {
        transmit_raw(std::move(*reply));
        if (!hs.established()) {
            arm_handshake_retry(r, s);
        }
    }
    if (!was_established && hs.established()) {
        keys_.install_session(r, s);
        flush_pending(r, s, true);
    }
}

void ProtocolEngine::note_auth_failure(NodeId reporter, NodeId subject,
                                       bool dedupe)
{
    if (dedupe && !auth_failures_seen_.insert({reporter, subject}).second) {
        return;
    }
    report_.notifications.push_back(make_notification(
        Cause::AuthFailure, subject, now(), reporter, Severity::Alert));
}

// ---------------------------------------------------------------------------
// bootstrap and periodic behaviour

void ProtocolEngine::bootstrap()
{
    std::vector<NodeProfile> members;
    for (auto& [id, st] : nodes_) {
        if (!id.is_cmu()) {
            members.push_back(st.profile);
            st.profile.role = Role::LowRank;
        }
    }
    const auto changes = assign_initial_roles(members, now());
    for (const RoleChange& c : changes) {
        change_role(c.node, c.to, ChangeReason::InitialAssignment);
    }
    bootstrapped_ = true;
    for (auto& [id, st] : nodes_) {
        st.known_admin = supervisor();
    }

    if (auth_enabled()) {
        for (const auto& [id, st] : nodes_) {
            if (!id.is_cmu()) {
                start_authorization(id);
            }
        }
    }
    else {
        for (auto& [id, st] : nodes_) {
            keys_.grant(id);
            st.joined = true;
        }
        for (const auto& [a, sa] : nodes_) {
            for (const auto& [b, sb] : nodes_) {
                if (a < b) {
                    ensure_session(a, b);
                }
            }
        }
    }
    kernel_.schedule(now() + cfg_.timers.warmup,
                     TimerFire{kCmuId, TimerKind::Bootstrap, kCmuId, 0});
}

void ProtocolEngine::on_warmup_done()
{
    started_ = true;
    for (auto& [id, st] : nodes_) {
        if (id.is_cmu()) {
            continue;
        }
        if (st.profile.role == Role::Administrator) {
            start_status_timer(id, now());
        }
        start_sensor_timer(id, now());
    }
    for (const auto& [id, st] : nodes_) {
        if (!id.is_cmu() && st.joined) {
            attach_monitors(id);
        }
    }
    kernel_.schedule(now() + cfg_.timers.inspection_period,
                     TimerFire{kCmuId, TimerKind::Inspection, kCmuId, 1});
}

void ProtocolEngine::attach_monitors(NodeId n)
{
    const NodeId sup = supervisor();
    NodeState&   st = state(n);
    st.known_admin = sup;
    if (n == sup) {
        // the administrator is watched by every joined, active node
        for (const auto& [id, other] : nodes_) {
            if (id != n && other.joined &&
                other.profile.status == NodeStatus::Active) {
                watch(id, n, cfg_.timers.status_period, now());
            }
        }
        return;
    }
    watch(sup, n, cfg_.timers.sensor_data_period, now());
    if (!sup.is_cmu()) {
        watch(n, sup, cfg_.timers.status_period, now());
    }
}

void ProtocolEngine::start_status_timer(NodeId n, SimTime at)
{
    const std::uint64_t gen = ++state(n).status_gen;
    kernel_.schedule(at, TimerFire{n, TimerKind::StatusTick, n, gen});
}

void ProtocolEngine::start_sensor_timer(NodeId n, SimTime at)
{
    const std::uint64_t gen = ++state(n).sensor_gen;
    kernel_.schedule(at, TimerFire{n, TimerKind::SensorTick, n, gen});
}

void ProtocolEngine::watch(NodeId watcher, NodeId watched, SimTime period,
                           SimTime from)
{
    MonitorState& ms = state(watcher).monitors[watched];
    const std::uint64_t gen = ms.generation + 1;
    ms = MonitorState{};
    ms.watcher = watcher;
    ms.watched = watched;
    ms.period = period;
    ms.last_outcome_at = from;
    ms.deadline = from + period + grace_for(period);
    ms.generation = gen;
    arm_monitor(ms);
}

void ProtocolEngine::arm_monitor(MonitorState& ms)
{
    kernel_.schedule(ms.deadline, TimerFire{ms.watcher,
                                            TimerKind::MonitorDeadline,
                                            ms.watched, ms.generation});
}

void ProtocolEngine::record_delivery(NodeId watcher, NodeId watched,
                                     SimTime sent_at)
{
    NodeState& w = state(watcher);
    auto it = w.monitors.find(watched);
    if (it == w.monitors.end()) {
        return;
    }
    MonitorState& ms = it->second;
    record_packet_outcome(ms, true, now());
    ++ms.generation;
    ms.deadline =
        std::max(sent_at + ms.period + grace_for(ms.period), now() + 1);
    arm_monitor(ms);
}

void ProtocolEngine::on_monitor_deadline(NodeId watcher, NodeId watched,
                                         std::uint64_t token)
{
    NodeState& w = state(watcher);
    auto it = w.monitors.find(watched);
    if (it == w.monitors.end() || it->second.generation != token) {
        return;
    }
    MonitorState& ms = it->second;
    const bool    can_observe = is_up(watcher);
    std::vector<Notification> notes;
    if (can_observe) {
        notes = record_packet_outcome(ms, false, now());
    }
    ms.deadline += ms.period;
    arm_monitor(ms);
    emit(notes);
}

void ProtocolEngine::emit(const std::vector<Notification>& notes)
{
    for (const Notification& n : notes) {
        notify(n);
        if (!n.reporter.is_cmu()) {
            const EnvelopeKind kind = n.severity == Severity::Alert
                                          ? EnvelopeKind::Alert
                                          : EnvelopeKind::Warning;
            post(make_envelope(kind, n.reporter, kCmuId, n.subject));
        }
        if (n.cause == Cause::TripleLoss) {
            // runs after every other deadline due at this instant
            kernel_.schedule(now(), TimerFire{kCmuId, TimerKind::Inspection,
                                              n.subject, 0});
        }
    }
}

void ProtocolEngine::notify(const Notification& n)
{
    report_.notifications.push_back(n);
}

// ---------------------------------------------------------------------------
// event dispatch

void ProtocolEngine::on_deliver(const Envelope& env)
{
    const NodeId r = env.receiver;
    NodeState&   rs = state(r);

    if (rs.profile.status == NodeStatus::Removed) {
        if (env.kind == EnvelopeKind::DiagnosticProbe && !env.reply) {
            const UnwrapResult u = unwrap(env, cfg_.profile, keys_, r);
            if (!u.ok()) {
                note_auth_failure(r, env.sender, true);
                return;
            }
            Envelope answer = make_envelope(EnvelopeKind::DiagnosticProbe, r,
                                            env.sender, std::nullopt,
                                            env.correlation);
            answer.reply = true;
            post(std::move(answer));
        }
        return;
    }

    if (category_of(env.kind) == Category::Security) {
        on_security_message(env);
        return;
    }
    if (rs.profile.status != NodeStatus::Active) {
        return;
    }

    const UnwrapResult u = unwrap(env, cfg_.profile, keys_, r);
    if (!u.ok()) {
        note_auth_failure(r, env.sender, true);
        return;
    }

    switch (env.kind) {
    case EnvelopeKind::StatusBroadcast: {
        const auto admin = administrator();
        if (rs.profile.role == Role::LowRank && admin == env.sender &&
            rs.known_admin != env.sender && !cmu_supervising_) {
            rs.known_admin = env.sender;
            watch(r, env.sender, cfg_.timers.status_period, now());
        }
        record_delivery(r, env.sender, env.sent_at);
        break;
    }
    case EnvelopeKind::SensorData:
        record_delivery(r, env.sender, env.sent_at);
        break;
    case EnvelopeKind::Ping:
        post(make_envelope(EnvelopeKind::Pong, r, env.sender, std::nullopt,
                           env.correlation));
        break;
    case EnvelopeKind::Pong:
        if (r.is_cmu()) {
            on_pong(env.sender, env.correlation);
        }
        break;
    case EnvelopeKind::DiagnosticProbe:
        if (r.is_cmu() && env.reply) {
            const NodeState& s = state(env.sender);
            if (s.profile.status == NodeStatus::Removed &&
                env.correlation == s.removal_episode) {
                on_probe_answer(env.sender);
            }
        }
        break;
    default: break;
    }
}

void ProtocolEngine::on_timer(const TimerFire& t)
{
    switch (t.kind) {
    case TimerKind::Bootstrap: on_warmup_done(); return;
    case TimerKind::StatusTick: {
        NodeState& st = state(t.owner);
        if (t.token != st.status_gen ||
            st.profile.role != Role::Administrator) {
            return;
        }
        if (is_up(t.owner)) {
            post_broadcast(EnvelopeKind::StatusBroadcast, t.owner,
                           std::nullopt);
        }
        kernel_.schedule(now() + cfg_.timers.status_period, t);
        return;
    }
    case TimerKind::SensorTick: {
        NodeState& st = state(t.owner);
        if (t.token != st.sensor_gen) {
            return;
        }
        if (is_up(t.owner) && st.profile.role != Role::Administrator &&
            st.known_admin != t.owner) {
            post(make_envelope(EnvelopeKind::SensorData, t.owner,
                               st.known_admin));
        }
        kernel_.schedule(now() + cfg_.timers.sensor_data_period, t);
        return;
    }
    case TimerKind::MonitorDeadline:
        on_monitor_deadline(t.owner, t.peer, t.token);
        return;
    case TimerKind::Inspection:
        if (t.token != 0) {
            kernel_.schedule(now() + cfg_.timers.inspection_period,
                             TimerFire{kCmuId, TimerKind::Inspection, kCmuId,
                                       t.token + 1});
        }
        if (!round_.active && !inspect().healthy()) {
            start_round();
        }
        return;
    case TimerKind::ProbeTick: {
        NodeState& st = state(t.peer);
        if (t.token != st.probe_gen ||
            st.profile.status != NodeStatus::Removed) {
            return;
        }
        probes_.push_back(ProbeRecord{t.peer, now(), st.removal_episode});
        post(make_envelope(EnvelopeKind::DiagnosticProbe, kCmuId, t.peer,
                           std::nullopt, st.removal_episode));
        kernel_.schedule(now() + cfg_.timers.probe_interval, t);
        return;
    }
    case TimerKind::RttTimeout:
        if (round_.phase == Phase::Measuring && t.token == round_.token) {
            finish_measure();
        }
        return;
    case TimerKind::ConfirmTimeout:
        if (round_.phase == Phase::Confirming && t.token == round_.token) {
            ++round_.cursor;
            confirm_next();
        }
        return;
    case TimerKind::HandshakeRetry:
        on_handshake_retry(t.owner, t.peer, t.token);
        return;
    case TimerKind::AuthRetry: on_auth_retry(t.owner, t.token); return;
    }
}

void ProtocolEngine::on_fault(const FaultSpec& fault)
{
    if (fault.kind != FaultKind::Restore) {
        return;
    }
    NodeState& st = state(fault.target);
    std::vector<NodeId> watched;
    for (const auto& [id, ms] : st.monitors) {
        watched.push_back(id);
    }
    st.monitors.clear();
    st.known_admin = supervisor();
    if (st.profile.status != NodeStatus::Active) {
        return;
    }
    for (NodeId w : watched) {
        const SimTime period = w == st.known_admin
                                   ? cfg_.timers.status_period
                                   : cfg_.timers.sensor_data_period;
        watch(fault.target, w, period, now());
    }
}

void ProtocolEngine::after_dispatch(const Event& ev)
{
    if (!bootstrapped_) {
        return;
    }
    std::size_t holders = 0;
    for (const auto& [id, st] : nodes_) {
        if (st.profile.role == Role::Administrator) {
            ++holders;
        }
    }
    const bool ok = holders == 1 || (holders == 0 && cmu_supervising_);
    if (!ok) {
        admin_violations_.push_back("t=" + std::to_string(ev.at) + " seq=" +
                                    std::to_string(ev.seq) + ": " +
                                    std::to_string(holders) +
                                    " administrators");
    }
}

// ---------------------------------------------------------------------------
// reassignment round

ProtocolEngine::Inspection ProtocolEngine::inspect() const
{
    Inspection out;
    const auto admin = administrator();
    out.admin_missing = !admin && (!cmu_supervising_ || retry_succession_);

    auto streak_at = [&](NodeId watcher, NodeId watched) -> std::uint32_t {
        const MonitorState* ms = monitor(watcher, watched);
        return ms == nullptr ? 0 : ms->consecutive_losses;
    };

    if (admin && state(*admin).profile.status == NodeStatus::Active) {
        std::size_t valid = 0;
        std::size_t lost = 0;
        for (const auto& [id, st] : nodes_) {
            if (id == *admin || !is_up(id) ||
                monitor(id, *admin) == nullptr) {
                continue;
            }
            ++valid;
            if (streak_at(id, *admin) >= kAlertStreak) {
                ++lost;
            }
        }
        if (valid > 0 && lost * 2 > valid) {
            out.faulty.insert(*admin);
        }
    }

    const NodeId sup = supervisor();
    if (is_up(sup)) {
        for (const auto& [id, ms] : state(sup).monitors) {
            if (id != sup && ms.consecutive_losses >= kAlertStreak &&
                state(id).profile.status == NodeStatus::Active) {
                out.faulty.insert(id);
            }
        }
    }
    return out;
}

void ProtocolEngine::start_round()
{
    if (round_.active) {
        return;
    }
    round_ = Round{};
    round_.active = true;
    ++report_.rounds_started;
    admin_step();
}

void ProtocolEngine::admin_step()
{
    ++round_.iteration;
    if (round_.iteration > cfg_.max_rounds) {
        finish_round(false);
        return;
    }
    const Inspection ins = inspect();
    const auto       admin = administrator();
    for (NodeId n : ins.faulty) {
        if (n != admin) {
            round_.suspects.insert(n);
        }
    }
    if (admin && ins.faulty.contains(*admin)) {
        begin_failover(*admin);
        return;
    }
    if (ins.admin_missing) {
        begin_failover(std::nullopt);
        return;
    }
    others_step();
}

void ProtocolEngine::begin_failover(std::optional<NodeId> old_admin)
{
    round_.failing_admin = old_admin;
    retry_succession_ = false;
    if (old_admin) {
        remove_node(*old_admin);
    }
    round_.candidates.clear();
    for (const auto& [id, st] : nodes_) {
        if (!id.is_cmu() && st.profile.status == NodeStatus::Active &&
            st.joined && keys_.is_authorized(id)) {
            round_.candidates.push_back(id);
        }
    }
    begin_measure();
}

void ProtocolEngine::begin_measure()
{
    round_.phase = Phase::Measuring;
    const std::uint64_t token = ++round_.token;
    round_.ping_sent.clear();
    round_.rtts.clear();
    if (round_.candidates.empty()) {
        finish_measure();
        return;
    }
    for (NodeId c : round_.candidates) {
        round_.ping_sent[c] = now();
        post(make_envelope(EnvelopeKind::Ping, kCmuId, c, std::nullopt, token));
    }
    kernel_.schedule(now() + cfg_.timers.rtt_timeout,
                     TimerFire{kCmuId, TimerKind::RttTimeout, kCmuId, token});
}

void ProtocolEngine::on_pong(NodeId from, std::uint64_t token)
{
    if (token != round_.token) {
        return;
    }
    if (round_.phase == Phase::Measuring) {
        auto sent = round_.ping_sent.find(from);
        if (sent == round_.ping_sent.end() || round_.rtts.contains(from)) {
            return;
        }
        round_.rtts[from] = now() - sent->second;
        if (round_.rtts.size() == round_.candidates.size()) {
            finish_measure();
        }
    }
    else if (round_.phase == Phase::Confirming &&
             round_.cursor < round_.order.size() &&
             round_.order[round_.cursor] == from) {
        promote(from);
    }
}

void ProtocolEngine::finish_measure()
{
    std::vector<SuccessionEntry> hrn;
    std::vector<SuccessionEntry> lrn;
    for (NodeId c : round_.candidates) {
        SuccessionEntry e{c, std::nullopt};
        if (auto it = round_.rtts.find(c); it != round_.rtts.end()) {
            e.rtt = it->second;
        }
        (is_hrn(state(c).profile.role) ? hrn : lrn).push_back(e);
    }
    SuccessionRecord rec;
    rec.at = now();
    rec.failed_admin = round_.failing_admin;
    rec.hrn_table = SuccessionTable(std::move(hrn));
    rec.lrn_table = SuccessionTable(std::move(lrn));
    round_.order = rec.hrn_table.responsive();
    for (NodeId n : rec.lrn_table.responsive()) {
        round_.order.push_back(n);
    }
    successions_.push_back(std::move(rec));
    round_.cursor = 0;
    confirm_next();
}

void ProtocolEngine::confirm_next()
{
    while (round_.cursor < round_.order.size() &&
           state(round_.order[round_.cursor]).profile.status !=
               NodeStatus::Active) {
        ++round_.cursor;
    }
    if (round_.cursor >= round_.order.size()) {
        no_candidate();
        return;
    }
    round_.phase = Phase::Confirming;
    const std::uint64_t token = ++round_.token;
    round_.confirm_sent = now();
    post(make_envelope(EnvelopeKind::Ping, kCmuId, round_.order[round_.cursor],
                       std::nullopt, token));
    kernel_.schedule(now() + cfg_.timers.rtt_timeout,
                     TimerFire{kCmuId, TimerKind::ConfirmTimeout,
                               round_.order[round_.cursor], token});
}

void ProtocolEngine::promote(NodeId successor)
{
    round_.phase = Phase::Idle;
    ++round_.token;
    successions_.back().chosen = successor;

    if (const auto old = administrator(); old && *old != successor) {
        change_role(*old, Role::LowRank, ChangeReason::Demotion);
    }
    change_role(successor, Role::Administrator, ChangeReason::AdminFailover);
    cmu_supervising_ = false;

    post_broadcast(EnvelopeKind::InfoMessage, kCmuId, successor);
    notify(make_notification(Cause::AdminFailover, successor, now(), kCmuId));

    for (auto& [id, st] : nodes_) {
        st.monitors.clear();
        st.known_admin = successor;
    }
    start_status_timer(successor, now());
    for (const auto& [id, st] : nodes_) {
        if (!id.is_cmu() && id != successor && st.joined &&
            st.profile.status == NodeStatus::Active) {
            watch(successor, id, cfg_.timers.sensor_data_period, now());
        }
    }
    for (const auto& [id, st] : nodes_) {
        if (id != successor && st.joined &&
            st.profile.status == NodeStatus::Active) {
            watch(id, successor, cfg_.timers.status_period, now());
        }
    }
    others_step();
}

void ProtocolEngine::no_candidate()
{
    round_.phase = Phase::Idle;
    ++round_.token;
    const NodeId subject = round_.failing_admin.value_or(kCmuId);
    notify(make_notification(Cause::AdminFailover, subject, now(), kCmuId,
                             Severity::Alert));
    if (const auto old = administrator()) {
        change_role(*old, Role::LowRank, ChangeReason::Demotion);
    }
    become_supervisor();
    others_step();
}

void ProtocolEngine::become_supervisor()
{
    cmu_supervising_ = true;
    for (auto& [id, st] : nodes_) {
        st.monitors.clear();
        st.known_admin = kCmuId;
    }
    for (const auto& [id, st] : nodes_) {
        if (!id.is_cmu() && st.joined &&
            st.profile.status == NodeStatus::Active) {
            watch(kCmuId, id, cfg_.timers.sensor_data_period, now());
        }
    }
}

void ProtocolEngine::others_step()
{
    // sensors found faulty before a failover stay suspects after it, even
    // though the new administrator's monitors start empty
    std::set<NodeId> faulty = std::move(round_.suspects);
    round_.suspects.clear();
    const Inspection ins = inspect();
    faulty.insert(ins.faulty.begin(), ins.faulty.end());
    const auto admin = administrator();
    for (NodeId n : faulty) {
        if (n != admin && state(n).profile.status == NodeStatus::Active) {
            remove_node(n);
        }
    }
    const Inspection again = inspect();
    if (again.healthy()) {
        finish_round(true);
        return;
    }
    admin_step();
}

void ProtocolEngine::finish_round(bool converged)
{
    round_.active = false;
    round_.phase = Phase::Idle;
    ++round_.token;
    if (converged) {
        ++report_.rounds_converged;
    }
    else {
        ++report_.convergence_failures;
    }
}

void ProtocolEngine::remove_node(NodeId n)
{
    NodeState& st = state(n);
    if (st.profile.status == NodeStatus::Removed) {
        return;
    }
    st.profile.status = NodeStatus::Removed;
    ++st.removal_episode;
    st.monitors.clear();
    for (auto& [id, other] : nodes_) {
        other.monitors.erase(n);
    }
    post_broadcast(EnvelopeKind::RemovalNotice, kCmuId, n);
    notify(make_notification(Cause::Removal, n, now(), kCmuId));
    start_probing(n);
}

void ProtocolEngine::start_probing(NodeId n)
{
    NodeState&          st = state(n);
    const std::uint64_t gen = ++st.probe_gen;
    kernel_.schedule(now() + cfg_.timers.probe_interval,
                     TimerFire{kCmuId, TimerKind::ProbeTick, n, gen});
}

void ProtocolEngine::on_probe_answer(NodeId n)
{
    ++state(n).probe_gen;
    begin_reentry(n);
}

void ProtocolEngine::begin_reentry(NodeId n)
{
    NodeState& st = state(n);
    st.profile.status = NodeStatus::Reentering;
    notify(make_notification(Cause::Reentry, n, now(), kCmuId));
    if (auth_enabled()) {
        st.auth_attempts = 0;
        start_authorization(n);
        return;
    }
    complete_reentry(n);
}

void ProtocolEngine::complete_reentry(NodeId n)
{
    NodeState& st = state(n);
    st.profile.status = NodeStatus::Active;
    st.joined = true;
    change_role(n, Role::LowRank, ChangeReason::Reentry);
    st.monitors.clear();
    if (cmu_supervising_) {
        // a node is back: give succession another chance
        retry_succession_ = true;
        kernel_.schedule(now(),
                         TimerFire{kCmuId, TimerKind::Inspection, n, 0});
    }
    attach_monitors(n);
}

void ProtocolEngine::change_role(NodeId n, Role to, ChangeReason why)
{
    NodeState& st = state(n);
    const Role from = st.profile.role;
    if (from == to && why != ChangeReason::Reentry) {
        return;
    }
    st.profile.role = to;
    report_.role_changes.push_back(RoleChange{n, from, to, now(), why});
    post_broadcast(EnvelopeKind::RoleAssignment, kCmuId, n);
}

}  // namespace ansim
