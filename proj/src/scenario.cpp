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

// scenario.cpp                                                   -*-C++-*-
#include <ansim/scenario.hpp>

#include "bundled.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace ansim {
namespace {

using nlohmann::json;

class Reader {
  public:
    explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

    void fail(const std::string& path, const std::string& msg)
    {
        errors_.push_back(path + ": " + msg);
    }

    bool object(const json& j, const std::string& path,
                std::initializer_list<std::string_view> allowed)
    {
        if (!j.is_object()) {
            fail(path, "expected an object");
            return false;
        }
        for (const auto& [key, value] : j.items()) {
            if (std::find(allowed.begin(), allowed.end(), key) ==
                allowed.end()) {
                fail(join(path, key), "unknown key");
            }
        }
        return true;
    }

    template <class T>
    void integer(const json& obj, const std::string& path,
                 const std::string& key, T& out, bool required = false)
    {
        auto it = obj.find(key);
        if (it == obj.end()) {
            if (required) {
                fail(join(path, key), "required");
            }
            return;
        }
        read_integer(*it, join(path, key), out);
    }

    template <class T>
    bool read_integer(const json& v, const std::string& path, T& out)
    {
        if (!v.is_number_integer()) {
            fail(path, "expected an integer");
            return false;
        }
        if (v.is_number_unsigned()) {
            const auto u = v.get<std::uint64_t>();
            if (u > static_cast<std::uint64_t>(std::numeric_limits<T>::max())) {
                fail(path, "out of range");
                return false;
            }
            out = static_cast<T>(u);
            return true;
        }
        const auto s = v.get<std::int64_t>();
        if constexpr (std::is_unsigned_v<T>) {
            if (s < 0) {
                fail(path, "must not be negative");
                return false;
            }
        }
        if (s < static_cast<std::int64_t>(std::numeric_limits<T>::min()) ||
            (s > 0 && static_cast<std::uint64_t>(s) >
                          static_cast<std::uint64_t>(
                              std::numeric_limits<T>::max()))) {
            fail(path, "out of range");
            return false;
        }
        out = static_cast<T>(s);
        return true;
    }

    void number(const json& obj, const std::string& path,
                const std::string& key, double& out)
    {
        auto it = obj.find(key);
        if (it == obj.end()) {
            return;
        }
        if (!it->is_number()) {
            fail(join(path, key), "expected a number");
            return;
        }
        out = it->get<double>();
    }

    void string(const json& obj, const std::string& path,
                const std::string& key, std::string& out)
    {
        auto it = obj.find(key);
        if (it == obj.end()) {
            return;
        }
        if (!it->is_string()) {
            fail(join(path, key), "expected a string");
            return;
        }
        out = it->get<std::string>();
    }

    static std::string join(const std::string& path, std::string_view key)
    {
        return path.empty() ? std::string(key) : path + "." + std::string(key);
    }

  private:
    std::vector<std::string>& errors_;
};

std::string index_path(const std::string& base, std::size_t i)
{
    return base + "[" + std::to_string(i) + "]";
}

bool read_hardware_id(Reader& rd, const json& v, const std::string& path,
                      std::uint64_t& out)
{
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X') &&
            s.size() <= 18) {
            std::uint64_t value = 0;
            for (std::size_t i = 2; i < s.size(); ++i) {
                const char c = s[i];
                int        d = -1;
                if (c >= '0' && c <= '9') d = c - '0';
                if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
                if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
                if (d < 0) {
                    rd.fail(path, "invalid hex digit in '" + s + "'");
                    return false;
                }
                value = value * 16 + static_cast<std::uint64_t>(d);
            }
            out = value;
            return true;
        }
        rd.fail(path, "expected an integer or a '0x...' string");
        return false;
    }
    return rd.read_integer(v, path, out);
}

std::string hex(std::uint64_t v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "0x%llx", static_cast<unsigned long long>(v));
    return buf;
}

void parse_nodes(Reader& rd, const json& root, ScenarioConfig& c)
{
    auto it = root.find("nodes");
    if (it == root.end()) {
        rd.fail("nodes", "required");
        return;
    }
    if (!it->is_array()) {
        rd.fail("nodes", "expected an array");
        return;
    }
    for (std::size_t i = 0; i < it->size(); ++i) {
        const json&       n = (*it)[i];
        const std::string path = index_path("nodes", i);
        if (!rd.object(n, path,
                       {"id", "hardware_id", "processing_power", "position",
                        "role"})) {
            continue;
        }
        NodeSpec spec;
        rd.integer(n, path, "id", spec.id.value, true);
        if (auto hw = n.find("hardware_id"); hw != n.end()) {
            read_hardware_id(rd, *hw, path + ".hardware_id", spec.hardware_id);
        }
        else {
            rd.fail(path + ".hardware_id", "required");
        }
        rd.integer(n, path, "processing_power", spec.processing_power, true);
        if (auto pos = n.find("position"); pos != n.end()) {
            if (!pos->is_array() || pos->size() != 2 || !(*pos)[0].is_number() ||
                !(*pos)[1].is_number()) {
                rd.fail(path + ".position", "expected [x, y]");
            }
            else {
                spec.position = std::array<double, 2>{(*pos)[0].get<double>(),
                                                      (*pos)[1].get<double>()};
            }
        }
        if (auto role = n.find("role"); role != n.end()) {
            std::optional<Role> r;
            if (role->is_string()) {
                r = role_from_string(role->get<std::string>());
            }
            if (!r) {
                rd.fail(path + ".role", "unknown role");
            }
            spec.role = r;
        }
        c.nodes.push_back(spec);
    }
}

void parse_links(Reader& rd, const json& root, ScenarioConfig& c)
{
    auto it = root.find("links");
    if (it == root.end()) {
        return;
    }
    const json& l = *it;
    if (!rd.object(l, "links",
                   {"latency_ms", "jitter_ms", "loss_probability",
                    "overrides"})) {
        return;
    }
    rd.integer(l, "links", "latency_ms", c.links.latency_ms);
    rd.integer(l, "links", "jitter_ms", c.links.jitter_ms);
    rd.number(l, "links", "loss_probability", c.links.loss_probability);
    auto ov = l.find("overrides");
    if (ov == l.end()) {
        return;
    }
    if (!ov->is_array()) {
        rd.fail("links.overrides", "expected an array");
        return;
    }
    for (std::size_t i = 0; i < ov->size(); ++i) {
        const json&       o = (*ov)[i];
        const std::string path = index_path("links.overrides", i);
        if (!rd.object(o, path,
                       {"from", "to", "latency_ms", "loss_probability",
                        "symmetric"})) {
            continue;
        }
        LinkOverride lo;
        rd.integer(o, path, "from", lo.from.value, true);
        rd.integer(o, path, "to", lo.to.value, true);
        if (o.contains("latency_ms")) {
            SimTime v = 0;
            rd.integer(o, path, "latency_ms", v);
            lo.latency_ms = v;
        }
        if (o.contains("loss_probability")) {
            double v = 0;
            rd.number(o, path, "loss_probability", v);
            lo.loss_probability = v;
        }
        if (auto s = o.find("symmetric"); s != o.end()) {
            if (!s->is_boolean()) {
                rd.fail(path + ".symmetric", "expected a boolean");
            }
            else {
                lo.symmetric = s->get<bool>();
            }
        }
        c.links.overrides.push_back(lo);
    }
}

void parse_timers(Reader& rd, const json& root, ScenarioConfig& c)
{
    auto it = root.find("timers");
    if (it == root.end()) {
        return;
    }
    if (!rd.object(*it, "timers",
                   {"status_period_ms", "sensor_data_period_ms",
                    "inspection_period_ms", "rtt_timeout_ms",
                    "probe_interval_ms", "warmup_ms"})) {
        return;
    }
    TimerConfig& t = c.timers;
    rd.integer(*it, "timers", "status_period_ms", t.status_period);
    rd.integer(*it, "timers", "sensor_data_period_ms", t.sensor_data_period);
    rd.integer(*it, "timers", "inspection_period_ms", t.inspection_period);
    rd.integer(*it, "timers", "rtt_timeout_ms", t.rtt_timeout);
    rd.integer(*it, "timers", "probe_interval_ms", t.probe_interval);
    rd.integer(*it, "timers", "warmup_ms", t.warmup);
}

void parse_security(Reader& rd, const json& root, ScenarioConfig& c)
{
    auto it = root.find("security");
    if (it == root.end()) {
        return;
    }
    if (!rd.object(*it, "security",
                   {"sig_len", "encap_overhead", "handshake_msgs",
                    "handshake_msg_len", "handshake_retries",
                    "tota_time_step_ms", "tota_skew_tolerance", "note"})) {
        return;
    }
    SecurityParams& s = c.security;
    rd.integer(*it, "security", "sig_len", s.sig_len);
    rd.integer(*it, "security", "encap_overhead", s.encap_overhead);
    rd.integer(*it, "security", "handshake_msgs", s.handshake_msgs);
    rd.integer(*it, "security", "handshake_msg_len", s.handshake_msg_len);
    rd.integer(*it, "security", "handshake_retries", s.handshake_retries);
    rd.integer(*it, "security", "tota_time_step_ms", s.tota_time_step_ms);
    rd.integer(*it, "security", "tota_skew_tolerance", s.tota_skew_tolerance);
    std::string note;
    rd.string(*it, "security", "note", note);
}

void parse_payloads(Reader& rd, const json& root, ScenarioConfig& c)
{
    auto it = root.find("payload_bytes");
    if (it == root.end()) {
        return;
    }
    if (!it->is_object()) {
        rd.fail("payload_bytes", "expected an object");
        return;
    }
    for (const auto& [key, value] : it->items()) {
        const std::string path = "payload_bytes." + key;
        const auto        kind = envelope_kind_from_string(key);
        if (!kind) {
            rd.fail(path, "unknown envelope kind");
            continue;
        }
        if (*kind == EnvelopeKind::AuthChallenge ||
            *kind == EnvelopeKind::AuthResponse ||
            *kind == EnvelopeKind::KeyExchange) {
            rd.fail(path, "sized by the security parameters");
            continue;
        }
        std::size_t n = 0;
        if (rd.read_integer(value, path, n)) {
            c.payload_bytes[*kind] = n;
        }
    }
}

void parse_faults(Reader& rd, const json& root, ScenarioConfig& c)
{
    auto it = root.find("faults");
    if (it == root.end()) {
        return;
    }
    if (!it->is_array()) {
        rd.fail("faults", "expected an array");
        return;
    }
    for (std::size_t i = 0; i < it->size(); ++i) {
        const json&       f = (*it)[i];
        const std::string path = index_path("faults", i);
        if (!rd.object(f, path, {"target", "kind", "count", "at_ms"})) {
            continue;
        }
        FaultSpec spec;
        rd.integer(f, path, "target", spec.target.value, true);
        rd.integer(f, path, "at_ms", spec.at, true);
        rd.integer(f, path, "count", spec.count);
        auto kind = f.find("kind");
        if (kind == f.end()) {
            rd.fail(path + ".kind", "required");
        }
        else {
            std::optional<FaultKind> k;
            if (kind->is_string()) {
                k = fault_kind_from_string(kind->get<std::string>());
            }
            if (!k) {
                rd.fail(path + ".kind",
                        "expected one of drop_next, crash, restore");
            }
            else {
                spec.kind = *k;
            }
        }
        c.faults.push_back(spec);
    }
}

}  // namespace

ParseResult parse_scenario(std::string_view text)
{
    ParseResult out;
    json        root;
    try {
        root = json::parse(text.begin(), text.end());
    }
    catch (const json::parse_error& e) {
        out.errors.push_back(std::string("<document>: invalid JSON: ") +
                             e.what());
        return out;
    }

    Reader         rd(out.errors);
    ScenarioConfig c;
    if (!rd.object(root, "",
                   {"name", "description", "profile", "seed", "duration_ms",
                    "nodes", "registry", "links", "timers", "security",
                    "payload_bytes", "faults", "max_rounds"})) {
        out.errors.back() = "<document>: expected an object";
        return out;
    }
    rd.string(root, "", "name", c.name);
    rd.string(root, "", "description", c.description);
    if (auto p = root.find("profile"); p != root.end()) {
        std::optional<ProfileKind> k;
        if (p->is_string()) {
            k = profile_from_string(p->get<std::string>());
        }
        if (!k) {
            rd.fail("profile", "expected one of plain, auth, auth-encap");
        }
        else {
            c.profile = *k;
        }
    }
    rd.integer(root, "", "seed", c.seed);
    rd.integer(root, "", "duration_ms", c.duration_ms);
    rd.integer(root, "", "max_rounds", c.max_rounds);
    parse_nodes(rd, root, c);
    if (auto reg = root.find("registry"); reg != root.end()) {
        if (!reg->is_array()) {
            rd.fail("registry", "expected an array");
        }
        else {
            std::vector<std::uint64_t> ids;
            for (std::size_t i = 0; i < reg->size(); ++i) {
                std::uint64_t hw = 0;
                if (read_hardware_id(rd, (*reg)[i], index_path("registry", i),
                                     hw)) {
                    ids.push_back(hw);
                }
            }
            c.registry = ids;
        }
    }
    parse_links(rd, root, c);
    parse_timers(rd, root, c);
    parse_security(rd, root, c);
    parse_payloads(rd, root, c);
    parse_faults(rd, root, c);

    const std::size_t structural = out.errors.size();
    for (auto& e : validate(c)) {
        const auto path = e.substr(0, e.find(':'));
        const bool seen = std::any_of(
            out.errors.begin(), out.errors.begin() + structural,
            [&](const std::string& prior) { return prior.rfind(path, 0) == 0; });
        if (!seen) {
            out.errors.push_back(std::move(e));
        }
    }
    if (out.errors.empty()) {
        out.config = std::move(c);
    }
    return out;
}

std::vector<std::string> validate(const ScenarioConfig& c)
{
    std::vector<std::string> errors;
    auto fail = [&](const std::string& path, const std::string& msg) {
        errors.push_back(path + ": " + msg);
    };

    if (c.duration_ms <= 0) {
        fail("duration_ms", "must be positive");
    }
    if (c.max_rounds == 0) {
        fail("max_rounds", "must be at least 1");
    }
    if (c.nodes.empty()) {
        fail("nodes", "at least one node is required");
    }

    std::map<std::uint32_t, std::size_t> seen;
    for (std::size_t i = 0; i < c.nodes.size(); ++i) {
        const NodeSpec&   n = c.nodes[i];
        const std::string path = index_path("nodes", i);
        if (n.id.is_cmu() || n.id.is_broadcast()) {
            fail(path + ".id",
                 "id " + to_string(n.id) + " is reserved");
        }
        else if (auto [it, fresh] = seen.emplace(n.id.value, i); !fresh) {
            fail(path + ".id", "duplicate id " + to_string(n.id) + " (also " +
                                   index_path("nodes", it->second) + ".id)");
        }
        if (n.processing_power == 0) {
            fail(path + ".processing_power", "must be positive");
        }
        if (n.role && *n.role != Role::FireSensor &&
            *n.role != Role::PolicyApplier &&
            *n.role != Role::AuthenticityProvider) {
            fail(path + ".role",
                 "only FireSensor, PolicyApplier or AuthenticityProvider "
                 "can be designated");
        }
    }
    auto known = [&](NodeId id) { return id.is_cmu() || seen.contains(id.value); };

    const TimerConfig& t = c.timers;
    const std::pair<const char*, SimTime> periods[] = {
        {"timers.status_period_ms", t.status_period},
        {"timers.sensor_data_period_ms", t.sensor_data_period},
        {"timers.inspection_period_ms", t.inspection_period},
        {"timers.rtt_timeout_ms", t.rtt_timeout},
        {"timers.probe_interval_ms", t.probe_interval},
    };
    for (const auto& [path, v] : periods) {
        if (v <= 0) {
            fail(path, "must be positive");
        }
    }
    if (t.warmup < 0) {
        fail("timers.warmup_ms", "must not be negative");
    }

    auto check_loss = [&](const std::string& path, double p) {
        if (!(p >= 0.0 && p <= 1.0)) {
            fail(path, "must be within [0, 1]");
        }
    };
    if (c.links.latency_ms < 0) {
        fail("links.latency_ms", "must not be negative");
    }
    if (c.links.jitter_ms < 0) {
        fail("links.jitter_ms", "must not be negative");
    }
    check_loss("links.loss_probability", c.links.loss_probability);
    SimTime worst = c.links.latency_ms;
    for (std::size_t i = 0; i < c.links.overrides.size(); ++i) {
        const LinkOverride& o = c.links.overrides[i];
        const std::string   path = index_path("links.overrides", i);
        if (!known(o.from)) {
            fail(path + ".from", "unknown node " + to_string(o.from));
        }
        if (!known(o.to)) {
            fail(path + ".to", "unknown node " + to_string(o.to));
        }
        if (o.latency_ms) {
            if (*o.latency_ms < 0) {
                fail(path + ".latency_ms", "must not be negative");
            }
            worst = std::max(worst, *o.latency_ms);
        }
        if (o.loss_probability) {
            check_loss(path + ".loss_probability", *o.loss_probability);
        }
    }
    const SimTime shortest = std::min(t.status_period, t.sensor_data_period);
    if (shortest > 0 && worst + c.links.jitter_ms >= grace_for(shortest)) {
        fail("links",
             "latency + jitter (" + std::to_string(worst + c.links.jitter_ms) +
                 " ms) must stay below the loss-detection grace of " +
                 std::to_string(grace_for(shortest)) + " ms");
    }

    for (std::size_t i = 0; i < c.faults.size(); ++i) {
        const FaultSpec&  f = c.faults[i];
        const std::string path = index_path("faults", i);
        if (f.target.is_cmu()) {
            fail(path + ".target", "the CMU cannot be faulted");
        }
        else if (!known(f.target)) {
            fail(path + ".target", "unknown node " + to_string(f.target));
        }
        if (f.at < 0 || (c.duration_ms > 0 && f.at > c.duration_ms)) {
            fail(path + ".at_ms", "must lie within [0, duration_ms]");
        }
        if (f.kind == FaultKind::DropNextN && f.count == 0) {
            fail(path + ".count", "drop_next needs a positive count");
        }
    }

    try {
        (void)SecurityProfile::make(c.profile, c.security);
    }
    catch (const Error& e) {
        fail("security", e.what());
    }
    if (c.security.tota_time_step_ms <= 0) {
        fail("security.tota_time_step_ms", "must be positive");
    }
    return errors;
}

std::string serialize(const ScenarioConfig& c)
{
    using Json = nlohmann::ordered_json;
    Json j;
    j["name"] = c.name;
    if (!c.description.empty()) {
        j["description"] = c.description;
    }
    j["profile"] = to_string(c.profile);
    j["seed"] = c.seed;
    j["duration_ms"] = c.duration_ms;
    j["max_rounds"] = c.max_rounds;

    Json nodes = Json::array();
    for (const NodeSpec& n : c.nodes) {
        Json o;
        o["id"] = n.id.value;
        o["hardware_id"] = hex(n.hardware_id);
        o["processing_power"] = n.processing_power;
        if (n.position) {
            o["position"] = Json::array({(*n.position)[0], (*n.position)[1]});
        }
        if (n.role) {
            o["role"] = to_string(*n.role);
        }
        nodes.push_back(o);
    }
    j["nodes"] = nodes;
    if (c.registry) {
        Json reg = Json::array();
        for (std::uint64_t hw : *c.registry) {
            reg.push_back(hex(hw));
        }
        j["registry"] = reg;
    }

    Json links;
    links["latency_ms"] = c.links.latency_ms;
    links["jitter_ms"] = c.links.jitter_ms;
    links["loss_probability"] = c.links.loss_probability;
    Json ov = Json::array();
    for (const LinkOverride& o : c.links.overrides) {
        Json e;
        e["from"] = o.from.value;
        e["to"] = o.to.value;
        if (o.latency_ms) {
            e["latency_ms"] = *o.latency_ms;
        }
        if (o.loss_probability) {
            e["loss_probability"] = *o.loss_probability;
        }
        e["symmetric"] = o.symmetric;
        ov.push_back(e);
    }
    links["overrides"] = ov;
    j["links"] = links;

    Json timers;
    timers["status_period_ms"] = c.timers.status_period;
    timers["sensor_data_period_ms"] = c.timers.sensor_data_period;
    timers["inspection_period_ms"] = c.timers.inspection_period;
    timers["rtt_timeout_ms"] = c.timers.rtt_timeout;
    timers["probe_interval_ms"] = c.timers.probe_interval;
    timers["warmup_ms"] = c.timers.warmup;
    j["timers"] = timers;

    Json sec;
    sec["sig_len"] = c.security.sig_len;
    sec["encap_overhead"] = c.security.encap_overhead;
    sec["handshake_msgs"] = c.security.handshake_msgs;
    sec["handshake_msg_len"] = c.security.handshake_msg_len;
    sec["handshake_retries"] = c.security.handshake_retries;
    sec["tota_time_step_ms"] = c.security.tota_time_step_ms;
    sec["tota_skew_tolerance"] = c.security.tota_skew_tolerance;
    j["security"] = sec;

    Json payloads;
    for (const auto& [kind, n] : c.payload_bytes) {
        payloads[std::string(to_string(kind))] = n;
    }
    j["payload_bytes"] = payloads;

    Json faults = Json::array();
    for (const FaultSpec& f : c.faults) {
        Json o;
        o["target"] = f.target.value;
        o["kind"] = to_string(f.kind);
        if (f.kind == FaultKind::DropNextN) {
            o["count"] = f.count;
        }
        o["at_ms"] = f.at;
        faults.push_back(o);
    }
    j["faults"] = faults;
    return j.dump(2) + "\n";
}

std::vector<std::string> bundled_scenario_names()
{
    std::vector<std::string> out;
    for (std::size_t i = 0; i < detail::kBundledScenarioCount; ++i) {
        out.emplace_back(detail::kBundledScenarios[i].name);
    }
    return out;
}

std::optional<std::string_view> bundled_scenario(std::string_view name)
{
    if (name.size() > 5 && name.substr(name.size() - 5) == ".json") {
        name.remove_suffix(5);
    }
    for (std::size_t i = 0; i < detail::kBundledScenarioCount; ++i) {
        if (name == detail::kBundledScenarios[i].name) {
            return std::string_view(detail::kBundledScenarios[i].text);
        }
    }
    return std::nullopt;
}

std::string read_scenario_text(const std::string& path_or_name)
{
    std::ifstream in(path_or_name, std::ios::binary);
    if (in) {
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }
    if (auto text = bundled_scenario(path_or_name)) {
        return std::string(*text);
    }
    throw Error("Io", "cannot read scenario '" + path_or_name +
                          "' (not a file or a bundled scenario)");
}

ScenarioConfig normalize_nodes(ScenarioConfig c, std::size_t count)
{
    if (count == 0 || c.nodes.empty()) {
        return c;
    }
    while (c.nodes.size() > count) {
        const NodeId gone = c.nodes.back().id;
        c.nodes.pop_back();
        std::erase_if(c.faults,
                      [&](const FaultSpec& f) { return f.target == gone; });
        std::erase_if(c.links.overrides, [&](const LinkOverride& o) {
            return o.from == gone || o.to == gone;
        });
    }
    std::uint32_t next_id = 0;
    std::uint64_t next_hw = 0;
    for (const NodeSpec& n : c.nodes) {
        next_id = std::max(next_id, n.id.value);
        next_hw = std::max(next_hw, n.hardware_id);
    }
    while (c.nodes.size() < count) {
        NodeSpec extra = c.nodes.back();
        extra.id = NodeId{++next_id};
        extra.hardware_id = ++next_hw;
        extra.role.reset();
        c.nodes.push_back(extra);
        if (c.registry) {
            c.registry->push_back(extra.hardware_id);
        }
    }
    return c;
}

EngineConfig to_engine_config(const ScenarioConfig& c, ProfileKind profile)
{
    EngineConfig e;
    for (const NodeSpec& n : c.nodes) {
        NodeProfile p;
        p.node_id = n.id;
        p.hardware_id = n.hardware_id;
        p.processing_power = n.processing_power;
        p.role = n.role.value_or(Role::FireSensor);
        e.nodes.push_back(p);
    }
    if (c.registry) {
        e.registry.insert(c.registry->begin(), c.registry->end());
    }
    else {
        for (const NodeSpec& n : c.nodes) {
            e.registry.insert(n.hardware_id);
        }
    }
    e.timers = c.timers;
    e.params = c.security;
    e.profile = SecurityProfile::unchecked(profile, c.security);
    e.payloads = c.payload_bytes;
    e.max_rounds = c.max_rounds;
    return e;
}

LinkModel to_link_model(const ScenarioConfig& c)
{
    LinkModel m(c.links.latency_ms, c.links.jitter_ms,
                c.links.loss_probability);
    for (const LinkOverride& o : c.links.overrides) {
        LinkParams p = m.params(o.from, o.to);
        if (o.latency_ms) {
            p.latency = *o.latency_ms;
        }
        if (o.loss_probability) {
            p.loss_probability = *o.loss_probability;
        }
        m.set(o.from, o.to, p);
        if (o.symmetric) {
            m.set(o.to, o.from, p);
        }
    }
    return m;
}

std::vector<NodeId> kernel_nodes(const ScenarioConfig& c)
{
    std::vector<NodeId> ids{kCmuId};
    for (const NodeSpec& n : c.nodes) {
        ids.push_back(n.id);
    }
    return ids;
}

}  // namespace ansim
