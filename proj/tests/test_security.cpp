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

// test_security.cpp                                              -*-C++-*-
#include <ansim/security.hpp>
#include <ansim/sim_kernel.hpp>

#include <gtest/gtest.h>

#include <cstdio>
#include <random>
#include <set>
#include <string>

using namespace ansim;

namespace {

Key key_of(std::uint8_t b)
{
    Key k{};
    k.fill(b);
    return k;
}

SecurityParams params()
{
    SecurityParams p;
    p.sig_len = 40;
    p.encap_overhead = 320;
    p.handshake_msgs = 2;
    p.handshake_msg_len = 64;
    p.handshake_retries = 3;
    return p;
}

SecurityProfile profile(ProfileKind k) { return SecurityProfile::make(k, params()); }

struct Fixture {
    KeyRegistry keys{key_of(7)};

    Fixture()
    {
        for (std::uint32_t i = 1; i <= 3; ++i) keys.grant(NodeId{i});
        keys.install_session(NodeId{1}, NodeId{2});
        keys.install_session(NodeId{2}, NodeId{1});
    }
};

Envelope data(std::size_t len, std::uint32_t from = 1, std::uint32_t to = 2)
{
    Envelope e;
    e.id = 77;
    e.kind = EnvelopeKind::SensorData;
    e.sender = NodeId{from};
    e.receiver = NodeId{to};
    e.sent_at = 12'345;
    for (std::size_t i = 0; i < len; ++i) {
        e.payload.push_back(static_cast<std::uint8_t>(i * 31 + 5));
    }
    return e;
}

std::string hex(const Digest& d)
{
    std::string out;
    char        buf[3];
    for (auto b : d) {
        std::snprintf(buf, sizeof buf, "%02x", b);
        out += buf;
    }
    return out;
}

}  // namespace

TEST(KeyedDigest, MatchesPublishedHmacSha256Vector)
{
    const std::string key = "Jefe";
    const std::string msg = "what do ya want for nothing?";
    const auto* k = reinterpret_cast<const std::uint8_t*>(key.data());
    const auto* m = reinterpret_cast<const std::uint8_t*>(msg.data());
    const Digest d = keyed_digest({k, key.size()}, {{m, msg.size()}});
    EXPECT_EQ(hex(d),
              "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
}

TEST(Profile, VariantInvariants)
{
    const auto plain = profile(ProfileKind::Plain);
    EXPECT_EQ(plain.sig_len, 0u);
    EXPECT_EQ(plain.encap_overhead, 0u);
    EXPECT_EQ(plain.handshake_msgs, 0u);
    const auto auth = profile(ProfileKind::AuthOnly);
    EXPECT_EQ(auth.sig_len, 40u);
    EXPECT_EQ(auth.encap_overhead, 0u);
    EXPECT_EQ(auth.handshake_msgs, 0u);
    const auto encap = profile(ProfileKind::AuthEncap);
    EXPECT_EQ(encap.sig_len, 40u);
    EXPECT_EQ(encap.encap_overhead, 320u);
    EXPECT_EQ(encap.handshake_msgs, 2u);

    SecurityParams bad = params();
    bad.sig_len = 0;
    EXPECT_THROW(SecurityProfile::make(ProfileKind::AuthOnly, bad), Error);
    bad = params();
    bad.encap_overhead = 0;
    EXPECT_THROW(SecurityProfile::make(ProfileKind::AuthEncap, bad), Error);
    EXPECT_NO_THROW(SecurityProfile::make(ProfileKind::AuthOnly, bad));
    bad = params();
    bad.handshake_msgs = 0;
    EXPECT_THROW(SecurityProfile::make(ProfileKind::AuthEncap, bad), Error);
}

TEST(Wrap, WireLengthsPerProfile)
{
    Fixture f;
    EXPECT_EQ(wrap(data(100), profile(ProfileKind::Plain), f.keys).wire_len, 100u);
    EXPECT_EQ(wrap(data(100), profile(ProfileKind::AuthOnly), f.keys).wire_len, 140u);
    EXPECT_EQ(wrap(data(100), profile(ProfileKind::AuthEncap), f.keys).wire_len,
              140u + 320u);
}

TEST(Wrap, OverheadAdditivityForAnyPayload)
{
    Fixture      f;
    std::mt19937 rng(3);
    for (int i = 0; i < 200; ++i) {
        const std::size_t len = rng() % 2000;
        const auto p = wrap(data(len), profile(ProfileKind::Plain), f.keys);
        const auto a = wrap(data(len), profile(ProfileKind::AuthOnly), f.keys);
        const auto e = wrap(data(len), profile(ProfileKind::AuthEncap), f.keys);
        EXPECT_EQ(p.wire_len, len);
        EXPECT_EQ(a.wire_len - p.wire_len, 40u);
        EXPECT_EQ(e.wire_len - a.wire_len, 320u);
    }
}

TEST(Wrap, Errors)
{
    Fixture f;
    try {
        wrap(data(10, 9, 2), profile(ProfileKind::AuthOnly), f.keys);
        FAIL();
    }
    catch (const Error& e) {
        EXPECT_EQ(e.code(), "UnauthorizedSender");
    }
    try {
        wrap(data(10, 1, 3), profile(ProfileKind::AuthEncap), f.keys);
        FAIL();
    }
    catch (const Error& e) {
        EXPECT_EQ(e.code(), "NoSessionKey");
    }
}

TEST(Wrap, SecurityKindsAreNeverWrapped)
{
    Fixture  f;
    Envelope e = data(24);
    e.kind = EnvelopeKind::AuthChallenge;
    e.sender = NodeId{9};  // not authorized yet
    const auto w = wrap(e, profile(ProfileKind::AuthEncap), f.keys);
    EXPECT_EQ(w.wire_len, 24u);
    EXPECT_TRUE(unwrap(w, profile(ProfileKind::AuthEncap), f.keys, NodeId{2}).ok());
}

TEST(Unwrap, RoundTripAllProfiles)
{
    Fixture f;
    for (ProfileKind k : kAllProfiles) {
        const Envelope in = data(100);
        const auto     w = wrap(in, profile(k), f.keys);
        const auto     r = unwrap(w, profile(k), f.keys, NodeId{2});
        ASSERT_TRUE(r.ok()) << to_string(k) << ": " << to_string(r.error);
        EXPECT_EQ(r.payload, in.payload);
    }
}

TEST(Unwrap, EncapHidesPayload)
{
    Fixture f;
    const Envelope in = data(64);
    const auto w = wrap(in, profile(ProfileKind::AuthEncap), f.keys);
    EXPECT_TRUE(w.seal.confidential);
    EXPECT_NE(w.payload, in.payload);
}

TEST(Unwrap, NonHolderGetsWrongSessionKey)
{
    Fixture f;
    const auto w = wrap(data(50), profile(ProfileKind::AuthEncap), f.keys);
    EXPECT_EQ(unwrap(w, profile(ProfileKind::AuthEncap), f.keys, NodeId{3}).error,
              UnwrapError::WrongSessionKey);
}

TEST(Unwrap, ProfileIsolation)
{
    Fixture f;
    for (ProfileKind a : kAllProfiles) {
        const auto w = wrap(data(80), profile(a), f.keys);
        for (ProfileKind b : kAllProfiles) {
            const auto r = unwrap(w, profile(b), f.keys, NodeId{2});
            if (a == b) {
                EXPECT_TRUE(r.ok());
            }
            else {
                EXPECT_EQ(r.error, UnwrapError::ProfileMismatch)
                    << to_string(a) << " read as " << to_string(b);
            }
        }
    }
}

TEST(Unwrap, RandomSingleBitTamperingIsRejected)
{
    Fixture      f;
    std::mt19937 rng(2024);
    for (ProfileKind k : {ProfileKind::AuthOnly, ProfileKind::AuthEncap}) {
        const auto prof = profile(k);
        const auto sealed = wrap(data(120), prof, f.keys);
        for (int i = 0; i < 100; ++i) {
            Envelope t = sealed;
            switch (rng() % 4) {
            case 0: t.sender.value ^= 1u << (rng() % 32); break;
            case 1: t.receiver.value ^= 1u << (rng() % 32); break;
            case 2: t.payload[rng() % t.payload.size()] ^= 1u << (rng() % 8); break;
            case 3: t.seal.tag[rng() % t.seal.tag.size()] ^= 1u << (rng() % 8); break;
            }
            EXPECT_FALSE(unwrap(t, prof, f.keys, NodeId{2}).ok())
                << to_string(k) << " tamper " << i;
        }
    }
}

TEST(Unwrap, EveryPayloadBitIsCovered)
{
    Fixture f;
    for (ProfileKind k : {ProfileKind::AuthOnly, ProfileKind::AuthEncap}) {
        const auto prof = profile(k);
        const auto sealed = wrap(data(16), prof, f.keys);
        for (std::size_t byte = 0; byte < sealed.payload.size(); ++byte) {
            for (int bit = 0; bit < 8; ++bit) {
                Envelope t = sealed;
                t.payload[byte] ^= static_cast<std::uint8_t>(1u << bit);
                EXPECT_EQ(unwrap(t, prof, f.keys, NodeId{2}).error,
                          UnwrapError::TagMismatch);
            }
        }
        Envelope t = sealed;
        t.sent_at += 1;
        EXPECT_FALSE(unwrap(t, prof, f.keys, NodeId{2}).ok());
    }
}

TEST(Registry, Authorization)
{
    KeyRegistry keys(key_of(1));
    keys.register_hardware(0xA1);
    keys.register_hardware(0xA2);
    const NodeProfile n1{NodeId{1}, 0xA1};
    const NodeProfile n2{NodeId{2}, 0xA1};
    const NodeProfile n3{NodeId{3}, 0xFF};
    EXPECT_EQ(keys.authorize(n1), AuthorizationDecision::Granted);
    EXPECT_EQ(keys.authorize(n1), AuthorizationDecision::Granted);
    EXPECT_EQ(keys.authorize(n2), AuthorizationDecision::DuplicateHardwareId);
    EXPECT_EQ(keys.authorize(n3), AuthorizationDecision::Unregistered);
    EXPECT_TRUE(keys.is_authorized(NodeId{1}));
    EXPECT_FALSE(keys.is_authorized(NodeId{2}));
    EXPECT_FALSE(keys.is_authorized(NodeId{3}));
    EXPECT_TRUE(keys.signing_key(NodeId{1}).has_value());
    EXPECT_FALSE(keys.signing_key(NodeId{3}).has_value());
}

TEST(Registry, SessionKeyIsSymmetric)
{
    KeyRegistry keys(key_of(1));
    EXPECT_EQ(keys.derive_session_key(NodeId{1}, NodeId{2}),
              keys.derive_session_key(NodeId{2}, NodeId{1}));
    EXPECT_NE(keys.derive_session_key(NodeId{1}, NodeId{2}),
              keys.derive_session_key(NodeId{1}, NodeId{3}));
}

TEST(Session, TwoMessagesOf64BytesThenIdempotent)
{
    Fixture f;
    const auto prof = profile(ProfileKind::AuthEncap);
    const auto first = establish_session(NodeId{1}, NodeId{3}, prof, f.keys);
    std::size_t bytes = 0;
    for (const auto& m : first.messages) {
        EXPECT_EQ(m.kind, EnvelopeKind::KeyExchange);
        EXPECT_EQ(category_of(m.kind), Category::Security);
        bytes += m.wire_len;
    }
    EXPECT_EQ(first.messages.size(), 2u);
    EXPECT_EQ(bytes, 2u * 64u);
    EXPECT_EQ(first.messages[0].sender, NodeId{1});
    EXPECT_EQ(first.messages[1].sender, NodeId{3});
    EXPECT_TRUE(f.keys.has_session(NodeId{1}, NodeId{3}));
    EXPECT_TRUE(f.keys.has_session(NodeId{3}, NodeId{1}));

    const auto again = establish_session(NodeId{3}, NodeId{1}, prof, f.keys);
    EXPECT_TRUE(again.messages.empty());
    EXPECT_EQ(again.key, first.key);
}

TEST(Session, Preconditions)
{
    Fixture f;
    EXPECT_THROW(establish_session(NodeId{1}, NodeId{3},
                                   profile(ProfileKind::AuthOnly), f.keys),
                 Error);
    EXPECT_THROW(establish_session(NodeId{1}, NodeId{8},
                                   profile(ProfileKind::AuthEncap), f.keys),
                 Error);
}

TEST(Handshake, LostFirstMessageIsRetried)
{
    const auto prof = profile(ProfileKind::AuthEncap);
    Handshake  a(NodeId{1}, NodeId{2}, true, prof);
    Handshake  b(NodeId{2}, NodeId{1}, false, prof);
    std::size_t bytes = 0;

    const Envelope m0 = a.start();
    bytes += m0.wire_len;  // lost in transit
    const auto resend = a.on_timeout();
    ASSERT_TRUE(resend);
    bytes += resend->wire_len;
    const auto m1 = b.on_message(*resend);
    ASSERT_TRUE(m1);
    bytes += m1->wire_len;
    EXPECT_TRUE(b.established());
    EXPECT_FALSE(a.on_message(*m1));
    EXPECT_TRUE(a.established());
    EXPECT_EQ(bytes, 3u * 64u);
    EXPECT_EQ(a.retries_used(), 1u);
}

TEST(Handshake, DuplicateIsAnsweredAgain)
{
    const auto prof = profile(ProfileKind::AuthEncap);
    Handshake  a(NodeId{1}, NodeId{2}, true, prof);
    Handshake  b(NodeId{2}, NodeId{1}, false, prof);
    const Envelope m0 = a.start();
    const auto r1 = b.on_message(m0);
    const auto r2 = b.on_message(m0);
    ASSERT_TRUE(r1 && r2);
    EXPECT_EQ(r1->correlation, r2->correlation);
}

TEST(Handshake, RetryBudgetExhausts)
{
    const auto prof = profile(ProfileKind::AuthEncap);
    Handshake  a(NodeId{1}, NodeId{2}, true, prof);
    (void)a.start();
    for (int i = 0; i < 3; ++i) {
        EXPECT_TRUE(a.on_timeout());
    }
    EXPECT_FALSE(a.on_timeout());
    EXPECT_EQ(a.state(), Handshake::State::TimedOut);
}

TEST(Tota, StepIsFloorDivision)
{
    TotaState    s(key_of(2), TotaConfig{30'000, 1});
    std::mt19937_64 rng(1);
    for (int i = 0; i < 1000; ++i) {
        const SimTime t = static_cast<SimTime>(rng() % 100'000'000);
        EXPECT_EQ(s.step_at(t), t / 30'000);
    }
}

TEST(Tota, ChallengesAtSameInstantHaveDistinctNonces)
{
    Kernel    k(5, LinkModel{}, {NodeId{0}, NodeId{1}});
    TotaState s(key_of(2), TotaConfig{});
    const auto a = s.challenge(NodeId{0}, NodeId{1}, 100, k.next_random());
    const auto b = s.challenge(NodeId{0}, NodeId{1}, 100, k.next_random());
    EXPECT_NE(a.nonce, b.nonce);
    EXPECT_EQ(a.step, b.step);
}

TEST(Tota, ResponsesBindStepAndProver)
{
    TotaState       s(key_of(2), TotaConfig{30'000, 1});
    std::mt19937_64 rng(9);
    for (int i = 0; i < 1000; ++i) {
        const std::uint64_t nonce = rng();
        const std::int64_t  step = static_cast<std::int64_t>(rng() % 1'000'000);
        const NodeId        p{static_cast<std::uint32_t>(rng() % 1000 + 1)};
        const NodeId        q{p.value + 1};
        const Digest        d = s.expected_digest(p, nonce, step);
        EXPECT_EQ(d, s.expected_digest(p, nonce, step));
        EXPECT_NE(d, s.expected_digest(p, nonce, step + 1));
        EXPECT_NE(d, s.expected_digest(q, nonce, step));
    }
}

TEST(Tota, AcceptThenReplay)
{
    TotaState s(key_of(2), TotaConfig{30'000, 1});
    const auto ch = s.challenge(NodeId{0}, NodeId{4}, 1'000, 42);
    const auto r = s.respond(ch, 1'500);
    EXPECT_EQ(s.verify(r, 2'000), TotaVerdict::Accept);
    EXPECT_EQ(s.verify(r, 2'000), TotaVerdict::ReplayDetected);
    EXPECT_EQ(s.replay_set_size(), 1u);
}

TEST(Tota, SkewWindowEnumerated)
{
    for (std::uint32_t tol = 0; tol <= 3; ++tol) {
        for (int offset = -6; offset <= 6; ++offset) {
            TotaState s(key_of(2), TotaConfig{1'000, tol});
            const auto ch = s.challenge(NodeId{0}, NodeId{1}, 0, 7);
            const SimTime respond_at = 50'000;
            const auto r = s.respond(ch, respond_at);
            const auto v = s.verify(r, respond_at + offset * 1'000);
            const bool inside = std::abs(offset) <= static_cast<int>(tol);
            EXPECT_EQ(v, inside ? TotaVerdict::Accept : TotaVerdict::SkewExceeded)
                << "tol " << tol << " offset " << offset;
        }
    }
}

TEST(Tota, BadDigestAndUnknownNonce)
{
    TotaState s(key_of(2), TotaConfig{});
    const auto ch = s.challenge(NodeId{0}, NodeId{1}, 0, 7);
    auto r = s.respond(ch, 0);
    r.digest[3] ^= 0x10;
    EXPECT_EQ(s.verify(r, 0), TotaVerdict::BadDigest);
    auto stray = s.respond(TotaChallenge{NodeId{0}, NodeId{1}, 99, 0}, 0);
    EXPECT_EQ(s.verify(stray, 0), TotaVerdict::BadDigest);
    TotaState other(key_of(3), TotaConfig{});
    const auto forged = other.respond(ch, 0);
    EXPECT_EQ(s.verify(forged, 0), TotaVerdict::BadDigest);
}

TEST(Tota, EnvelopeRoundTrip)
{
    TotaState  s(key_of(2), TotaConfig{});
    const auto ch = s.challenge(NodeId{0}, NodeId{5}, 61'000, 1234);
    const auto ce = to_envelope(ch);
    EXPECT_EQ(ce.kind, EnvelopeKind::AuthChallenge);
    EXPECT_EQ(ce.wire_len, kTotaChallengeLen);
    const auto back = challenge_from_envelope(ce);
    EXPECT_EQ(back.nonce, ch.nonce);
    EXPECT_EQ(back.step, ch.step);
    EXPECT_EQ(back.prover, ch.prover);
    const auto r = s.respond(back, 62'000);
    const auto re = to_envelope(r, NodeId{0});
    EXPECT_EQ(re.wire_len, kTotaResponseLen);
    EXPECT_EQ(s.verify(response_from_envelope(re), 63'000), TotaVerdict::Accept);
}
