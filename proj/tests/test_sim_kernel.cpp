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

// test_sim_kernel.cpp                                            -*-C++-*-
#include <ansim/sim_kernel.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace ansim;

namespace {

struct Recorder : EventSink {
    std::vector<Event>                         events;
    std::function<void(const TimerFire&)>      timer_hook;
    std::function<void(const Envelope&)>       deliver_hook;
    std::vector<std::pair<SimTime, Envelope>>  delivered;
    Kernel*                                    kernel = nullptr;

    void on_deliver(const Envelope& env) override
    {
        delivered.emplace_back(kernel->now(), env);
        if (deliver_hook) deliver_hook(env);
    }
    void on_timer(const TimerFire& t) override
    {
        if (timer_hook) timer_hook(t);
    }
    void on_fault(const FaultSpec&) override {}
    void after_dispatch(const Event& ev) override { events.push_back(ev); }
};

struct Outcomes {
    std::vector<std::pair<Outcome, LossReason>> all;
    std::size_t delivered() const
    {
        std::size_t n = 0;
        for (auto& o : all) n += o.first == Outcome::Delivered;
        return n;
    }
    std::size_t lost(LossReason r) const
    {
        std::size_t n = 0;
        for (auto& o : all) n += o.first == Outcome::Lost && o.second == r;
        return n;
    }
};

std::vector<NodeId> ids(std::uint32_t n)
{
    std::vector<NodeId> out;
    for (std::uint32_t i = 0; i <= n; ++i) out.push_back(NodeId{i});
    return out;
}

Envelope env(EnvelopeKind kind, std::uint32_t from, std::uint32_t to,
             std::size_t len = 10)
{
    static std::uint64_t next = 1;
    Envelope e;
    e.id = next++;
    e.kind = kind;
    e.sender = NodeId{from};
    e.receiver = NodeId{to};
    e.payload.assign(len, 0);
    e.wire_len = len;
    return e;
}

TimerFire timer(std::uint32_t owner, std::uint64_t token = 0)
{
    return TimerFire{NodeId{owner}, TimerKind::StatusTick, NodeId{0}, token};
}

std::uint64_t token_of(const Event& ev)
{
    return std::get<TimerFire>(ev.body).token;
}

}  // namespace

TEST(Schedule, OrdersByTimeThenSequence)
{
    Kernel   k(1, LinkModel{}, ids(2));
    Recorder r;
    r.kernel = &k;
    k.schedule(1, timer(1, 10));
    k.schedule(0, timer(1, 20));
    k.schedule(0, timer(1, 30));
    k.run_until(5, r);
    ASSERT_EQ(r.events.size(), 3u);
    EXPECT_EQ(token_of(r.events[0]), 20u);
    EXPECT_EQ(token_of(r.events[1]), 30u);
    EXPECT_EQ(token_of(r.events[2]), 10u);
    EXPECT_LT(r.events[0].seq, r.events[1].seq);
}

TEST(Schedule, RejectsThePast)
{
    Kernel   k(1, LinkModel{}, ids(1));
    Recorder r;
    r.kernel = &k;
    k.run_until(100, r);
    try {
        k.schedule(99, timer(1));
        FAIL() << "expected SchedulingInPast";
    }
    catch (const Error& e) {
        EXPECT_EQ(e.code(), "SchedulingInPast");
    }
    EXPECT_NO_THROW(k.schedule(100, timer(1)));
}

TEST(RunUntil, EmptyQueueAdvancesClock)
{
    Kernel   k(1, LinkModel{}, ids(1));
    Recorder r;
    r.kernel = &k;
    k.run_until(1234, r);
    EXPECT_EQ(k.now(), 1234);
    EXPECT_TRUE(r.events.empty());
}

TEST(RunUntil, BoundaryDispatchesEventsAtNow)
{
    Kernel   k(1, LinkModel{}, ids(1));
    Recorder r;
    r.kernel = &k;
    k.run_until(50, r);
    k.schedule(50, timer(1, 1));
    k.schedule(51, timer(1, 2));
    k.run_until(50, r);
    ASSERT_EQ(r.events.size(), 1u);
    EXPECT_EQ(token_of(r.events[0]), 1u);
    EXPECT_EQ(k.queued_count(), 1u);
}

TEST(Send, ZeroJitterArrivesAfterLatency)
{
    Kernel   k(1, LinkModel(10, 0, 0.0), ids(2));
    Recorder r;
    r.kernel = &k;
    r.timer_hook = [&](const TimerFire&) {
        k.send(env(EnvelopeKind::SensorData, 1, 2));
    };
    k.schedule(100, timer(1));
    k.run_until(1000, r);
    ASSERT_EQ(r.delivered.size(), 1u);
    EXPECT_EQ(r.delivered[0].first, 110);
    EXPECT_EQ(r.delivered[0].second.sent_at, 100);
}

TEST(Send, UnknownReceiverThrows)
{
    Kernel k(1, LinkModel{}, ids(2));
    try {
        k.send(env(EnvelopeKind::Ping, 1, 9));
        FAIL();
    }
    catch (const Error& e) {
        EXPECT_EQ(e.code(), "UnknownReceiver");
    }
}

TEST(Send, DropNextThreeLosesThreeDataPackets)
{
    Kernel   k(1, LinkModel(10, 0, 0.0), ids(2));
    Outcomes o;
    k.set_outcome_observer([&](const Envelope& e, Outcome out, LossReason why) {
        if (e.kind == EnvelopeKind::SensorData) o.all.emplace_back(out, why);
    });
    Recorder r;
    r.kernel = &k;
    k.schedule(0, FaultSpec{NodeId{1}, FaultKind::DropNextN, 3, 0});
    k.run_until(0, r);

    // control traffic does not consume drops
    k.send(env(EnvelopeKind::Ping, 1, 2));
    for (int i = 0; i < 4; ++i) {
        k.send(env(EnvelopeKind::SensorData, 1, 2));
    }
    k.run_until(100, r);
    ASSERT_EQ(o.all.size(), 4u);
    for (int i = 0; i < 3; ++i) {
        EXPECT_EQ(o.all[i].first, Outcome::Lost);
        EXPECT_EQ(o.all[i].second, LossReason::Fault);
    }
    EXPECT_EQ(o.all[3].first, Outcome::Delivered);
    EXPECT_EQ(k.pending_drops(NodeId{1}), 0u);
}

TEST(Send, DropConsumedOncePerFannedOutTransmission)
{
    Kernel   k(1, LinkModel(10, 0, 0.0), ids(4));
    Outcomes o;
    k.set_outcome_observer(
        [&](const Envelope&, Outcome out, LossReason why) { o.all.emplace_back(out, why); });
    Recorder r;
    r.kernel = &k;
    k.schedule(0, FaultSpec{NodeId{1}, FaultKind::DropNextN, 1, 0});
    k.run_until(0, r);
    auto fan = [&] {
        k.transmit({env(EnvelopeKind::StatusBroadcast, 1, 2),
                    env(EnvelopeKind::StatusBroadcast, 1, 3),
                    env(EnvelopeKind::StatusBroadcast, 1, 4)});
    };
    fan();
    fan();
    k.run_until(100, r);
    EXPECT_EQ(o.lost(LossReason::Fault), 3u);
    EXPECT_EQ(o.delivered(), 3u);
}

TEST(Send, RestoreClearsPendingDrops)
{
    Kernel   k(1, LinkModel{}, ids(2));
    Recorder r;
    r.kernel = &k;
    k.schedule(0, FaultSpec{NodeId{1}, FaultKind::DropNextN, 5, 0});
    k.schedule(1, FaultSpec{NodeId{1}, FaultKind::Restore, 0, 1});
    k.run_until(0, r);
    EXPECT_EQ(k.pending_drops(NodeId{1}), 5u);
    k.run_until(1, r);
    EXPECT_EQ(k.pending_drops(NodeId{1}), 0u);
}

TEST(Send, CertainLossDeliversNothing)
{
    Kernel   k(7, LinkModel(10, 0, 1.0), ids(2));
    Outcomes o;
    k.set_outcome_observer(
        [&](const Envelope&, Outcome out, LossReason why) { o.all.emplace_back(out, why); });
    Recorder r;
    r.kernel = &k;
    for (int i = 0; i < 200; ++i) {
        k.send(env(EnvelopeKind::SensorData, 1, 2));
        k.send(env(EnvelopeKind::KeyExchange, 2, 1));
    }
    k.run_until(100, r);
    EXPECT_EQ(o.delivered(), 0u);
    EXPECT_EQ(o.lost(LossReason::Random), 400u);
    EXPECT_TRUE(r.delivered.empty());
}

TEST(Send, LossRateMatchesProbability)
{
    const double p = 0.3;
    const int    n = 20000;
    Kernel       k(11, LinkModel(10, 0, p), ids(2));
    Outcomes     o;
    k.set_outcome_observer(
        [&](const Envelope&, Outcome out, LossReason why) { o.all.emplace_back(out, why); });
    for (int i = 0; i < n; ++i) {
        k.send(env(EnvelopeKind::SensorData, 1, 2));
    }
    const double lost = static_cast<double>(o.lost(LossReason::Random));
    const double sigma = std::sqrt(n * p * (1 - p));
    EXPECT_NEAR(lost, n * p, 5 * sigma);
}

TEST(Send, JitterStaysWithinBound)
{
    Kernel   k(3, LinkModel(10, 7, 0.0), ids(2));
    Recorder r;
    r.kernel = &k;
    for (int i = 0; i < 500; ++i) {
        k.send(env(EnvelopeKind::SensorData, 1, 2));
    }
    k.run_until(100, r);
    ASSERT_EQ(r.delivered.size(), 500u);
    std::set<SimTime> seen;
    for (auto& [at, e] : r.delivered) {
        EXPECT_GE(at, e.sent_at + 10);
        EXPECT_LE(at, e.sent_at + 17);
        seen.insert(at);
    }
    EXPECT_EQ(seen.size(), 8u);
}

TEST(Send, PerPairOverrides)
{
    LinkModel links(10, 0, 0.0);
    links.set(NodeId{1}, NodeId{2}, LinkParams{3, 0.0});
    EXPECT_EQ(links.params(NodeId{1}, NodeId{2}).latency, 3);
    EXPECT_EQ(links.params(NodeId{2}, NodeId{1}).latency, 10);
    EXPECT_EQ(links.worst_case_delay(), 10);
    links.set(NodeId{2}, NodeId{1}, LinkParams{40, 0.0});
    EXPECT_EQ(links.worst_case_delay(), 40);
}

TEST(Send, AppDrawsIgnoreInterleavedSecurityTraffic)
{
    auto run = [](bool with_security) {
        Kernel                 k(99, LinkModel(10, 5, 0.4), ids(2));
        std::vector<SimTime>   arrivals;
        Recorder               r;
        r.kernel = &k;
        r.deliver_hook = [&](const Envelope& e) {
            if (e.kind == EnvelopeKind::SensorData) arrivals.push_back(k.now());
        };
        for (int i = 0; i < 300; ++i) {
            if (with_security) {
                k.send(env(EnvelopeKind::KeyExchange, 1, 2));
                (void)k.next_random();
            }
            k.send(env(EnvelopeKind::SensorData, 1, 2));
        }
        k.run_until(1000, r);
        return arrivals;
    };
    EXPECT_EQ(run(false), run(true));
}

TEST(Crash, SenderAndReceiverDown)
{
    Kernel   k(1, LinkModel(10, 0, 0.0), ids(2));
    Outcomes o;
    k.set_outcome_observer(
        [&](const Envelope&, Outcome out, LossReason why) { o.all.emplace_back(out, why); });
    Recorder r;
    r.kernel = &k;
    std::ostringstream trace;
    k.set_trace(&trace);

    k.send(env(EnvelopeKind::SensorData, 1, 2));  // in flight when 2 crashes
    k.schedule(5, FaultSpec{NodeId{2}, FaultKind::Crash, 0, 5});
    k.run_until(20, r);
    EXPECT_TRUE(k.is_crashed(NodeId{2}));
    k.send(env(EnvelopeKind::SensorData, 2, 1));
    k.run_until(40, r);

    EXPECT_EQ(o.lost(LossReason::ReceiverDown), 1u);
    EXPECT_EQ(o.lost(LossReason::SenderDown), 1u);
    EXPECT_TRUE(r.delivered.empty());
    EXPECT_NE(trace.str().find("10\t0\tLost:SensorData\t1\t2\t10\n"),
              std::string::npos)
        << trace.str();
}

TEST(Finish, InFlightEnvelopesAreLost)
{
    Kernel   k(1, LinkModel(10, 0, 0.0), ids(2));
    Outcomes o;
    k.set_outcome_observer(
        [&](const Envelope&, Outcome out, LossReason why) { o.all.emplace_back(out, why); });
    Recorder r;
    r.kernel = &k;
    k.send(env(EnvelopeKind::SensorData, 1, 2));
    k.send(env(EnvelopeKind::SensorData, 1, 2));
    k.run_until(5, r);
    EXPECT_EQ(k.in_flight_count(), 2u);
    k.finish();
    EXPECT_EQ(o.lost(LossReason::RunEnded), 2u);
}

TEST(Trace, LineFormat)
{
    Envelope e = env(EnvelopeKind::Alert, 3, 0, 160);
    EXPECT_EQ(format_trace_line(Event{42, 7, Deliver{e}}, false),
              "42\t7\tAlert\t3\t0\t160");
    EXPECT_EQ(format_trace_line(Event{42, 7, Deliver{e}}, true),
              "42\t7\tLost:Alert\t3\t0\t160");
    EXPECT_EQ(format_trace_line(
                  Event{5, 1, TimerFire{NodeId{0}, TimerKind::ProbeTick,
                                        NodeId{4}, 2}},
                  false),
              "5\t1\tTimer.ProbeTick\t0\t4\t0");
    EXPECT_EQ(format_trace_line(
                  Event{9, 2, FaultSpec{NodeId{4}, FaultKind::DropNextN, 3, 9}},
                  false),
              "9\t2\tFault.drop_next\t4\t-\t0");
}

TEST(Determinism, SameSeedSameTraceDifferentSeedDiffers)
{
    auto run = [](std::uint64_t seed) {
        Kernel             k(seed, LinkModel(10, 9, 0.25), ids(5));
        std::ostringstream trace;
        k.set_trace(&trace);
        Recorder r;
        r.kernel = &k;
        r.timer_hook = [&](const TimerFire& t) {
            for (std::uint32_t to = 1; to <= 5; ++to) {
                if (to != t.owner.value) {
                    k.send(env(EnvelopeKind::SensorData, t.owner.value, to));
                }
            }
            if (k.now() < 5000) k.schedule(k.now() + 100, t);
        };
        for (std::uint32_t n = 1; n <= 5; ++n) k.schedule(n, timer(n));
        k.run_until(6000, r);
        return trace.str();
    };
    const std::string a = run(5);
    EXPECT_EQ(a, run(5));
    EXPECT_NE(a, run(6));
}

TEST(Accounting, ScheduledEqualsDispatchedPlusQueued)
{
    Kernel   k(1, LinkModel(10, 0, 0.0), ids(3));
    Recorder r;
    r.kernel = &k;
    for (int i = 0; i < 50; ++i) {
        k.schedule(i * 7, timer(1, i));
        k.send(env(EnvelopeKind::Ping, 1, 2));
    }
    k.run_until(150, r);
    EXPECT_EQ(k.scheduled_count(), k.dispatched_count() + k.queued_count());
    for (const Event& ev : r.events) {
        if (const auto* d = std::get_if<Deliver>(&ev.body)) {
            EXPECT_GE(ev.at, d->envelope.sent_at);
        }
    }
}
