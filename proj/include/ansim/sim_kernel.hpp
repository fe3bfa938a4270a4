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

// sim_kernel.hpp                                                 -*-C++-*-
#pragma once

// Deterministic discrete-event engine: simulated clock, ordered event queue,
// seeded randomness, lossy links and fault injection.
//
// Events dequeue in (at, seq) order where `seq` is assigned by `schedule`.
// All randomness is derived from the single seed handed to the constructor:
//
//: o non-security envelopes draw loss and jitter from a counter keyed by
//:   (sender, receiver, kind, n-th such transmission), so the application
//:   traffic sees the same draws whatever security traffic is interleaved;
//: o everything else (security envelopes, nonces, key material) consumes a
//:   sequential `std::mt19937_64` stream.
//
// Only raw generator output is used (no `std::*_distribution`), which keeps
// traces identical across standard library implementations.

#include <ansim/core_model.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <tuple>
#include <unordered_map>
#include <variant>
#include <vector>

namespace ansim {

enum class TimerKind : std::uint8_t {
    Bootstrap,
    StatusTick,
    SensorTick,
    MonitorDeadline,
    Inspection,
    ProbeTick,
    RttTimeout,
    ConfirmTimeout,
    HandshakeRetry,
    AuthRetry,
};

std::string_view to_string(TimerKind k);

struct TimerFire {
    NodeId        owner;
    TimerKind     kind = TimerKind::Bootstrap;
    NodeId        peer;
    std::uint64_t token = 0;  // generation, used to self-cancel stale timers

    friend bool operator==(const TimerFire&, const TimerFire&) = default;
};

enum class FaultKind : std::uint8_t { DropNextN, Crash, Restore };

std::string_view to_string(FaultKind k);
std::optional<FaultKind> fault_kind_from_string(std::string_view s);

struct FaultSpec {
    NodeId        target;
    FaultKind     kind = FaultKind::Crash;
    std::uint32_t count = 0;  // DropNextN only
    SimTime       at = 0;

    friend bool operator==(const FaultSpec&, const FaultSpec&) = default;
};

struct Deliver {
    Envelope envelope;
};

using EventBody = std::variant<Deliver, TimerFire, FaultSpec>;

struct Event {
    SimTime       at = 0;
    std::uint64_t seq = 0;
    EventBody     body;
};

struct LinkParams {
    SimTime latency = 10;
    double  loss_probability = 0.0;

    friend bool operator==(const LinkParams&, const LinkParams&) = default;
};

/// Per directed pair latency/loss, with uniform defaults and a shared jitter
/// bound.  Delivery time is `send + latency + jitter`, jitter in
/// `[0, jitter_max]`.
class LinkModel {
  public:
    LinkModel() = default;
    LinkModel(SimTime latency, SimTime jitter_max, double loss_probability);

    void set(NodeId from, NodeId to, LinkParams params);

    LinkParams params(NodeId from, NodeId to) const;
    SimTime    jitter_max() const { return jitter_max_; }
    LinkParams defaults() const { return defaults_; }

    /// Largest `latency + jitter_max` over all configured pairs.
    SimTime worst_case_delay() const;

  private:
    LinkParams                                   defaults_;
    SimTime                                      jitter_max_ = 0;
    std::map<std::pair<NodeId, NodeId>, LinkParams> overrides_;
};

enum class Outcome : std::uint8_t { Delivered, Lost };

enum class LossReason : std::uint8_t {
    None,
    Fault,
    Random,
    SenderDown,
    ReceiverDown,
    RunEnded,
};

class EventSink {
  public:
    virtual ~EventSink() = default;
    virtual void on_deliver(const Envelope& env) = 0;
    virtual void on_timer(const TimerFire& timer) = 0;
    virtual void on_fault(const FaultSpec& fault) = 0;
    /// Called after every dispatched event (trace auditing hook).
    virtual void after_dispatch(const Event&) {}
};

class Kernel {
  public:
    using OutcomeObserver =
        std::function<void(const Envelope&, Outcome, LossReason)>;

    Kernel(std::uint64_t seed, LinkModel links, std::vector<NodeId> nodes);

    SimTime       now() const { return now_; }
    std::uint64_t seed() const { return seed_; }

    /// Enqueues `body` at `at` and returns its sequence number.  Throws
    /// `Error("SchedulingInPast")` if `at < now()`.
    std::uint64_t schedule(SimTime at, EventBody body);

    /// Sends one logical transmission fanned out to `copies` (all with the
    /// same sender and kind).  A DropNextN fault consumes one drop per call,
    /// not per copy.  Throws `Error("UnknownReceiver")`.
    void transmit(std::vector<Envelope> copies);
    void send(Envelope env);

    /// Dispatches every event with `at <= t_end`, then sets the clock to
    /// `t_end`.
    void run_until(SimTime t_end, EventSink& sink);

    /// Finalizes envelopes still in flight as lost (`RunEnded`).
    void finish();

    bool          is_known(NodeId id) const;
    bool          is_crashed(NodeId id) const;
    std::uint32_t pending_drops(NodeId id) const;

    /// Sequential stream for security traffic, nonces and key material.
    std::uint64_t next_random() { return sequential_(); }

    void set_trace(std::ostream* out) { trace_ = out; }
    void set_outcome_observer(OutcomeObserver obs)
    {
        observer_ = std::move(obs);
    }

    std::uint64_t scheduled_count() const { return next_seq_; }
    std::uint64_t dispatched_count() const { return dispatched_; }
    std::size_t   queued_count() const { return queue_.size(); }
    std::size_t   in_flight_count() const;

  private:
    struct Draw {
        bool    lost = false;
        SimTime jitter = 0;
    };

    Draw draw_for(const Envelope& env, const LinkParams& link);
    void report(const Envelope& env, Outcome outcome, LossReason why);
    void write_trace(const Event& ev, bool dropped);

    using QueueKey = std::pair<SimTime, std::uint64_t>;

    std::uint64_t                      seed_;
    LinkModel                          links_;
    std::set<NodeId>                   nodes_;
    SimTime                            now_ = 0;
    std::uint64_t                      next_seq_ = 0;
    std::uint64_t                      dispatched_ = 0;
    std::map<QueueKey, EventBody>      queue_;
    std::set<NodeId>                   crashed_;
    std::unordered_map<NodeId, std::uint32_t> drops_;
    std::map<std::tuple<std::uint32_t, std::uint32_t, std::uint8_t>,
             std::uint64_t>
                                       traffic_counters_;
    std::mt19937_64                    sequential_;
    std::ostream*                      trace_ = nullptr;
    OutcomeObserver                    observer_;
};

/// One trace line, without the trailing newline:
/// `time<TAB>seq<TAB>kind<TAB>sender<TAB>receiver<TAB>wire_len`.
std::string format_trace_line(const Event& ev, bool dropped);

}  // namespace ansim
