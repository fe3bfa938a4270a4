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

// engine.hpp                                                     -*-C++-*-
#pragma once

// Event-driven Active Neighbour network.
//
// Node 0 is the CMU.  It never fails, authorizes nodes (unless an
// AuthenticityProvider is assigned), runs the reassignment rounds and owns
// the diagnostic probing of removed nodes.
//
// Who watches whom:
//: o the administrator expects periodic SensorData from every other node;
//: o every other node expects the administrator's StatusBroadcast;
//: o when no administrator can be found the CMU takes the administrator's
//:   place as the watcher.
//
// A reassignment round follows the inspection loop: check the
// administrator (fail over if faulty), check the rest (remove faulty
// sensors), re-inspect, repeat at most `max_rounds` times.  Succession is
// asynchronous: the CMU pings candidates, orders them by RTT and confirms
// the head with one more ping before promoting it.

#include <ansim/core_model.hpp>
#include <ansim/metrics.hpp>
#include <ansim/protocol.hpp>
#include <ansim/security.hpp>
#include <ansim/sim_kernel.hpp>

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ansim {

struct TimerConfig {
    SimTime status_period = 5'000;
    SimTime sensor_data_period = 10'000;
    SimTime inspection_period = 30'000;
    SimTime rtt_timeout = 2'000;
    SimTime probe_interval = 60'000;
    SimTime warmup = 1'000;

    friend bool operator==(const TimerConfig&, const TimerConfig&) = default;
};

/// Payload bytes per envelope kind.
using PayloadSizes = std::map<EnvelopeKind, std::size_t>;

/// Defaults: 120 bytes for application and control messages, 16 bytes for
/// pings, probes and authorization messages.  TOTA and key-exchange
/// messages are sized by the security parameters and are not listed.
PayloadSizes default_payload_sizes();

struct EngineConfig {
    std::vector<NodeProfile> nodes;      // ids >= 1; role marks designations
    std::set<std::uint64_t>  registry;   // CMU hardware-id registry
    TimerConfig              timers;
    SecurityProfile          profile;
    SecurityParams           params;
    PayloadSizes             payloads = default_payload_sizes();
    std::uint32_t            max_rounds = 10;
};

struct ShapeTuple {
    EnvelopeKind kind;
    NodeId       sender;
    NodeId       receiver;
    std::size_t  payload_len;

    friend bool operator==(const ShapeTuple&, const ShapeTuple&) = default;
};

struct ProbeRecord {
    NodeId  subject;
    SimTime sent_at;
    std::uint32_t episode;  // increments each time the subject is removed
};

struct SuccessionRecord {
    SimTime               at;
    std::optional<NodeId> failed_admin;
    SuccessionTable       hrn_table;
    SuccessionTable       lrn_table;
    std::optional<NodeId> chosen;
};

class ProtocolEngine : public EventSink {
  public:
    ProtocolEngine(Kernel& kernel, EngineConfig config, RunReport& report);

    /// Initial role assignment, authorization and session setup at the
    /// current time; periodic traffic starts after `timers.warmup`.
    void bootstrap();

    void on_deliver(const Envelope& env) override;
    void on_timer(const TimerFire& timer) override;
    void on_fault(const FaultSpec& fault) override;
    void after_dispatch(const Event& ev) override;

    // --- inspection -------------------------------------------------------

    const NodeProfile&       node(NodeId id) const;
    std::vector<NodeProfile> nodes() const;
    std::optional<NodeId>    administrator() const;
    bool                     cmu_supervising() const;
    bool                     round_active() const;
    bool                     is_joined(NodeId id) const;

    const MonitorState* monitor(NodeId watcher, NodeId watched) const;

    const std::vector<ShapeTuple>&       traffic_shape() const { return shape_; }
    const std::vector<ProbeRecord>&      probes() const { return probes_; }
    const std::vector<SuccessionRecord>& successions() const { return successions_; }
    const KeyRegistry&                   keys() const;

    /// Exactly-one-administrator violations seen after each dispatched
    /// event.
    const std::vector<std::string>& admin_violations() const
    {
        return admin_violations_;
    }

  private:
    struct NodeState {
        NodeProfile                    profile;
        NodeId                         known_admin;
        std::map<NodeId, MonitorState> monitors;  // keyed by watched node
        std::uint64_t                  status_gen = 0;
        std::uint64_t                  sensor_gen = 0;
        std::uint64_t                  probe_gen = 0;
        std::uint64_t                  auth_gen = 0;
        std::uint32_t                  auth_attempts = 0;
        std::uint32_t                  removal_episode = 0;
        bool                           joined = false;
    };

    enum class Phase : std::uint8_t { Idle, Measuring, Confirming };

    struct Round {
        bool                      active = false;
        std::uint32_t             iteration = 0;
        Phase                     phase = Phase::Idle;
        std::uint64_t             token = 0;
        std::optional<NodeId>     failing_admin;
        std::vector<NodeId>       candidates;
        std::map<NodeId, SimTime> ping_sent;
        std::map<NodeId, SimTime> rtts;
        std::vector<NodeId>       order;
        std::size_t               cursor = 0;
        SimTime                   confirm_sent = 0;
        std::set<NodeId>          suspects;  // non-admin faults seen so far
    };

    struct Inspection {
        std::set<NodeId> faulty;
        bool             admin_missing = false;

        bool healthy() const { return faulty.empty() && !admin_missing; }
    };

    using Pair = std::pair<NodeId, NodeId>;

    // envelope plumbing
    Envelope make_envelope(EnvelopeKind kind, NodeId from, NodeId to,
                           std::optional<NodeId> subject = std::nullopt,
                           std::uint64_t correlation = 0);
    void post(Envelope env);
    void post_broadcast(EnvelopeKind kind, NodeId from,
                        std::optional<NodeId> subject);
    Envelope                stamp(Envelope env);
    std::optional<Envelope> secure(Envelope env);
    void transmit_raw(Envelope env);
    void flush_pending(NodeId holder, NodeId peer, bool protect);

    // security exchanges
    bool       auth_enabled() const;
    NodeId     authorizer() const;
    TotaState& tota_for(NodeId verifier);
    void       on_auth_retry(NodeId n, std::uint64_t token);
    void       arm_handshake_retry(NodeId self, NodeId peer);
    void       on_handshake_retry(NodeId self, NodeId peer,
                                  std::uint64_t token);
    void   start_authorization(NodeId n);
    void   on_security_message(const Envelope& env);
    void   on_joined(NodeId n);
    void   ensure_session(NodeId a, NodeId b);
    void   on_key_exchange(const Envelope& env);
    void   note_auth_failure(NodeId reporter, NodeId subject, bool dedupe);

    // periodic behaviour
    void start_status_timer(NodeId n, SimTime at);
    void start_sensor_timer(NodeId n, SimTime at);
    void watch(NodeId watcher, NodeId watched, SimTime period, SimTime from);
    void arm_monitor(MonitorState& ms);
    void record_delivery(NodeId watcher, NodeId watched, SimTime sent_at);
    void emit(const std::vector<Notification>& notes);
    void notify(const Notification& n);
    void on_warmup_done();
    void attach_monitors(NodeId n);
    void on_monitor_deadline(NodeId watcher, NodeId watched,
                             std::uint64_t token);
    NodeId supervisor() const;  // administrator, or the CMU standing in
    void   become_supervisor();

    // reassignment round
    Inspection inspect() const;
    void start_round();
    void admin_step();
    void begin_failover(std::optional<NodeId> old_admin);
    void begin_measure();
    void on_pong(NodeId from, std::uint64_t token);
    void finish_measure();
    void confirm_next();
    void promote(NodeId successor);
    void no_candidate();
    void others_step();
    void finish_round(bool converged);
    void remove_node(NodeId n);
    void start_probing(NodeId n);
    void on_probe_answer(NodeId n);
    void begin_reentry(NodeId n);
    void complete_reentry(NodeId n);
    void change_role(NodeId n, Role to, ChangeReason why);

    NodeState&       state(NodeId id);
    const NodeState& state(NodeId id) const;
    bool             is_up(NodeId id) const;  // Active and not crashed
    SimTime          now() const { return kernel_.now(); }

    Kernel&                               kernel_;
    EngineConfig                          cfg_;
    RunReport&                            report_;
    KeyRegistry                           keys_;
    Key                                   network_secret_{};
    std::map<NodeId, TotaState>           tota_;
    std::map<NodeId, NodeState>           nodes_;
    std::uint64_t                         next_id_ = 1;
    std::set<NodeId>                      auth_denied_;
    bool                                  bootstrapped_ = false;
    bool                                  started_ = false;
    bool                                  cmu_supervising_ = false;
    bool                                  retry_succession_ = false;
    Round                                 round_;
    std::map<Pair, Handshake>             handshakes_;  // (self, peer)
    std::map<Pair, std::uint64_t>         handshake_gen_;
    std::map<Pair, std::vector<Envelope>> pending_sends_;
    std::set<Pair>                        auth_failures_seen_;
    std::vector<ShapeTuple>               shape_;
    std::vector<ProbeRecord>              probes_;
    std::vector<SuccessionRecord>         successions_;
    std::vector<std::string>              admin_violations_;
};

}  // namespace ansim
