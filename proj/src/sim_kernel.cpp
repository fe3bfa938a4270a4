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

// sim_kernel.cpp                                                 -*-C++-*-
#include <ansim/sim_kernel.hpp>

#include <algorithm>
#include <sstream>

namespace ansim {
namespace {

// splitmix64 finalizer, used as a keyed hash for counter-based draws.
std::uint64_t mix(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double to_unit(std::uint64_t bits)
{
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

std::string_view to_string(TimerKind k)
{
    switch (k) {
    case TimerKind::Bootstrap: return "Bootstrap";
    case TimerKind::StatusTick: return "StatusTick";
    case TimerKind::SensorTick: return "SensorTick";
    case TimerKind::MonitorDeadline: return "MonitorDeadline";
    case TimerKind::Inspection: return "Inspection";
    case TimerKind::ProbeTick: return "ProbeTick";
    case TimerKind::RttTimeout: return "RttTimeout";
    case TimerKind::ConfirmTimeout: return "ConfirmTimeout";
    case TimerKind::HandshakeRetry: return "HandshakeRetry";
    case TimerKind::AuthRetry: return "AuthRetry";
    }
    return "?";
}

std::string_view to_string(FaultKind k)
{
    switch (k) {
    case FaultKind::DropNextN: return "drop_next";
    case FaultKind::Crash: return "crash";
    case FaultKind::Restore: return "restore";
    }
    return "?";
}

std::optional<FaultKind> fault_kind_from_string(std::string_view s)
{
    for (FaultKind k :
         {FaultKind::DropNextN, FaultKind::Crash, FaultKind::Restore}) {
        if (to_string(k) == s) {
            return k;
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// LinkModel

LinkModel::LinkModel(SimTime latency, SimTime jitter_max, double loss)
: defaults_{latency, loss}
, jitter_max_(jitter_max)
{
}

void LinkModel::set(NodeId from, NodeId to, LinkParams params)
{
    overrides_[{from, to}] = params;
}

LinkParams LinkModel::params(NodeId from, NodeId to) const
{
    auto it = overrides_.find({from, to});
    return it == overrides_.end() ? defaults_ : it->second;
}

SimTime LinkModel::worst_case_delay() const
{
    SimTime worst = defaults_.latency;
    for (const auto& [pair, p] : overrides_) {
        worst = std::max(worst, p.latency);
    }
    return worst + jitter_max_;
}

// ---------------------------------------------------------------------------
// Kernel

Kernel::Kernel(std::uint64_t seed, LinkModel links, std::vector<NodeId> nodes)
: seed_(seed)
, links_(std::move(links))
, nodes_(nodes.begin(), nodes.end())
, sequential_(seed)
{
}

std::uint64_t Kernel::schedule(SimTime at, EventBody body)
{
    if (at < now_) {
        std::ostringstream os;
        os << "event at t=" << at << " is before now=" << now_;
        throw Error("SchedulingInPast", os.str());
    }
    const std::uint64_t seq = next_seq_++;
    queue_.emplace(QueueKey{at, seq}, std::move(body));
    return seq;
}

bool Kernel::is_known(NodeId id) const { return nodes_.contains(id); }

bool Kernel::is_crashed(NodeId id) const { return crashed_.contains(id); }

std::uint32_t Kernel::pending_drops(NodeId id) const
{
    auto it = drops_.find(id);
    return it == drops_.end() ? 0 : it->second;
}

std::size_t Kernel::in_flight_count() const
{
    return static_cast<std::size_t>(
        std::count_if(queue_.begin(), queue_.end(), [](const auto& kv) {
            return std::holds_alternative<Deliver>(kv.second);
        }));
}

Kernel::Draw Kernel::draw_for(const Envelope& env, const LinkParams& link)
{
    const bool needs_loss =
        link.loss_probability > 0.0 && link.loss_probability < 1.0;
    const bool needs_jitter = links_.jitter_max() > 0;

    Draw d;
    if (link.loss_probability >= 1.0) {
        d.lost = true;
    }
    if (!needs_loss && !needs_jitter) {
        return d;
    }

    std::uint64_t loss_bits = 0;
    std::uint64_t jitter_bits = 0;
    if (category_of(env.kind) == Category::Security) {
        if (needs_loss) {
            loss_bits = sequential_();
        }
        if (needs_jitter) {
            jitter_bits = sequential_();
        }
    }
    else {
        auto& n = traffic_counters_[{env.sender.value,
                                     env.receiver.value,
                                     static_cast<std::uint8_t>(env.kind)}];
        std::uint64_t key = mix(seed_);
        key = mix(key ^ env.sender.value);
        key = mix(key ^ env.receiver.value);
        key = mix(key ^ static_cast<std::uint64_t>(env.kind));
        key = mix(key ^ n++);
        loss_bits = mix(key ^ 1);
        jitter_bits = mix(key ^ 2);
    }

    if (needs_loss) {
        d.lost = to_unit(loss_bits) < link.loss_probability;
    }
    if (needs_jitter) {
        d.jitter = static_cast<SimTime>(
            jitter_bits %
            static_cast<std::uint64_t>(links_.jitter_max() + 1));
    }
    return d;
}

void Kernel::report(const Envelope& env, Outcome outcome, LossReason why)
{
    if (observer_) {
        observer_(env, outcome, why);
    }
}

void Kernel::send(Envelope env)
{
    std::vector<Envelope> one;
    one.push_back(std::move(env));
    transmit(std::move(one));
}

void Kernel::transmit(std::vector<Envelope> copies)
{
    if (copies.empty()) {
        return;
    }
    for (const Envelope& env : copies) {
        if (env.receiver.is_broadcast() || !is_known(env.receiver)) {
            throw Error("UnknownReceiver",
                        "receiver " + to_string(env.receiver) +
                            " is not part of the scenario");
        }
    }

    const NodeId       sender = copies.front().sender;
    const EnvelopeKind kind = copies.front().kind;

    if (is_crashed(sender)) {
        for (Envelope& env : copies) {
            env.sent_at = now_;
            report(env, Outcome::Lost, LossReason::SenderDown);
        }
        return;
    }

    if (is_data_packet(kind)) {
        auto it = drops_.find(sender);
        if (it != drops_.end() && it->second > 0) {
            --it->second;
            for (Envelope& env : copies) {
                env.sent_at = now_;
                report(env, Outcome::Lost, LossReason::Fault);
            }
            return;
        }
    }

    for (Envelope& env : copies) {
        env.sent_at = now_;
        const LinkParams link = links_.params(env.sender, env.receiver);
        const Draw       d = draw_for(env, link);
        if (d.lost) {
            report(env, Outcome::Lost, LossReason::Random);
            continue;
        }
        const SimTime at = now_ + link.latency + d.jitter;
        schedule(at, Deliver{std::move(env)});
    }
}

std::string format_trace_line(const Event& ev, bool dropped)
{
    std::ostringstream os;
    os << ev.at << '\t' << ev.seq << '\t';
    if (const auto* d = std::get_if<Deliver>(&ev.body)) {
        const Envelope& e = d->envelope;
        os << (dropped ? "Lost:" : "") << to_string(e.kind) << '\t'
           << to_string(e.sender) << '\t' << to_string(e.receiver) << '\t'
           << e.wire_len;
    }
    else if (const auto* t = std::get_if<TimerFire>(&ev.body)) {
        os << "Timer." << to_string(t->kind) << '\t' << to_string(t->owner)
           << '\t' << to_string(t->peer) << '\t' << 0;
    }
    else {
        const auto& f = std::get<FaultSpec>(ev.body);
        os << "Fault." << to_string(f.kind) << '\t' << to_string(f.target)
           << "\t-\t" << 0;
    }
    return os.str();
}

void Kernel::write_trace(const Event& ev, bool dropped)
{
    if (trace_ != nullptr) {
        *trace_ << format_trace_line(ev, dropped) << '\n';
    }
}

void Kernel::run_until(SimTime t_end, EventSink& sink)
{
    if (t_end < now_) {
        t_end = now_;
    }
    while (!queue_.empty() && queue_.begin()->first.first <= t_end) {
        auto  node = queue_.extract(queue_.begin());
        Event ev{node.key().first, node.key().second, std::move(node.mapped())};
        now_ = ev.at;
        ++dispatched_;

        if (auto* d = std::get_if<Deliver>(&ev.body)) {
            const bool dropped = is_crashed(d->envelope.receiver);
            write_trace(ev, dropped);
            if (dropped) {
                report(d->envelope, Outcome::Lost, LossReason::ReceiverDown);
            }
            else {
                report(d->envelope, Outcome::Delivered, LossReason::None);
                sink.on_deliver(d->envelope);
            }
        }
        else if (auto* t = std::get_if<TimerFire>(&ev.body)) {
            write_trace(ev, false);
            sink.on_timer(*t);
        }
        else {
            auto& f = std::get<FaultSpec>(ev.body);
            write_trace(ev, false);
            switch (f.kind) {
            case FaultKind::DropNextN: drops_[f.target] += f.count; break;
            case FaultKind::Crash: crashed_.insert(f.target); break;
            case FaultKind::Restore:
                crashed_.erase(f.target);
                drops_.erase(f.target);
                break;
            }
            sink.on_fault(f);
        }
        sink.after_dispatch(ev);
    }
    now_ = t_end;
}

void Kernel::finish()
{
    for (auto it = queue_.begin(); it != queue_.end();) {
        if (auto* d = std::get_if<Deliver>(&it->second)) {
            report(d->envelope, Outcome::Lost, LossReason::RunEnded);
            it = queue_.erase(it);
        }
        else {
            ++it;
        }
    }
}

}  // namespace ansim
