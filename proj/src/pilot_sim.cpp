// Copyright 2026 The Floorsight Authors
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

#include "floorsight/pilot_sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace floorsight::sim {

using nlohmann::json;

void validate_signal(const SignalSpec& spec)
{
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, RandomWalk>) {
                if (!(s.lo <= s.hi)) {
                    throw Error(Errc::invalid_argument, "random_walk clamp bounds are not ordered");
                }
                if (!(s.sigma >= 0.0)) {
                    throw Error(Errc::invalid_argument, "random_walk sigma must be non-negative");
                }
                if (!(s.reversion >= 0.0 && s.reversion <= 1.0)) {
                    throw Error(Errc::invalid_argument, "random_walk reversion must lie in [0, 1]");
                }
            }
            else if constexpr (std::is_same_v<T, Periodic>) {
                if (s.period_ms <= 0) {
                    throw Error(Errc::invalid_argument, "periodic period must be positive");
                }
            }
            else if constexpr (std::is_same_v<T, Distortion>) {
                if (s.kind == Distortion::Kind::noise && !(s.parameter >= 0.0)) {
                    throw Error(Errc::invalid_argument, "noise distortion sigma must be non-negative");
                }
                if (s.kind == Distortion::Kind::lag && !(s.parameter >= 0.0)) {
                    throw Error(Errc::invalid_argument, "lag distortion must be non-negative");
                }
            }
        },
        spec);
}

std::size_t ScenarioConfig::tick_count() const
{
    if (tick_ms <= 0 || duration_s <= 0.0) {
        return 0;
    }
    const auto duration_ms = static_cast<EpochMs>(std::llround(duration_s * 1000.0));
    return static_cast<std::size_t>(duration_ms / tick_ms);
}

void validate_scenario(const ScenarioConfig& config)
{
    if (config.tick_ms <= 0) {
        throw Error(Errc::invalid_argument, "scenario tick must be positive");
    }
    if (!(config.duration_s > 0.0)) {
        throw Error(Errc::invalid_argument, "scenario duration must be positive");
    }
    if (config.release_ticks <= 0) {
        throw Error(Errc::invalid_argument, "release_ticks must be positive");
    }
    const auto duration_ms = static_cast<EpochMs>(std::llround(config.duration_s * 1000.0));
    for (const auto& e : config.events) {
        if (e.at_ms < 0 || e.at_ms > duration_ms) {
            throw Error(Errc::invalid_argument, "event on '" + e.target.str() + "' lies outside the scenario duration");
        }
        if (e.value.has_value() == e.offset.has_value()) {
            throw Error(Errc::invalid_argument, "event on '" + e.target.str() + "' must set exactly one of value/offset");
        }
        if (e.release_ticks && *e.release_ticks <= 0) {
            throw Error(Errc::invalid_argument, "event release_ticks must be positive");
        }
    }
    for (const auto& [path, spec] : config.signals) {
        validate_signal(spec);
    }
}

/***********************************************************************************************************************
 * Scenario file
 **********************************************************************************************************************/

namespace {

double num(const json& j, const char* key, const std::string& where)
{
    if (!j.contains(key) || !j[key].is_number()) {
        throw SchemaError(where.empty() ? key : where + "." + key, "expected number");
    }
    return j[key].get<double>();
}

double num_or(const json& j, const char* key, const std::string& where, double fallback)
{
    return j.contains(key) ? num(j, key, where) : fallback;
}

SignalSpec read_signal(const json& j, const std::string& where)
{
    if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
        throw SchemaError(where + ".type", "expected string");
    }
    const auto type = j["type"].get<std::string>();
    if (type == "random_walk") {
        return RandomWalk {num(j, "mean", where), num(j, "sigma", where), num(j, "lo", where), num(j, "hi", where),
            num_or(j, "reversion", where, 0.05)};
    }
    if (type == "periodic") {
        return Periodic {num(j, "base", where), num(j, "amplitude", where),
            static_cast<EpochMs>(num(j, "period_ms", where))};
    }
    if (type == "constant") {
        return Constant {num(j, "value", where)};
    }
    throw SchemaError(where + ".type", "unknown signal type '" + type + "'");
}

} // namespace

ScenarioConfig parse_scenario(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    }
    catch (const json::parse_error& e) {
        throw SyntaxError(e.byte, std::string("JSON syntax error: ") + e.what());
    }
    if (!doc.is_object()) {
        throw SchemaError("", "scenario must be an object");
    }
    ScenarioConfig cfg;
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_integer()) {
            throw SchemaError("seed", "expected integer");
        }
        cfg.seed = doc["seed"].get<std::uint64_t>();
    }
    cfg.duration_s = num_or(doc, "duration_s", "", cfg.duration_s);
    cfg.tick_ms = static_cast<EpochMs>(num_or(doc, "tick_ms", "", static_cast<double>(cfg.tick_ms)));
    cfg.start_ms = static_cast<EpochMs>(num_or(doc, "start_ms", "", 0.0));
    cfg.release_ticks = static_cast<int>(num_or(doc, "release_ticks", "", cfg.release_ticks));
    if (doc.contains("events")) {
        if (!doc["events"].is_array()) {
            throw SchemaError("events", "expected array");
        }
        for (std::size_t i = 0; i < doc["events"].size(); ++i) {
            const auto& e = doc["events"][i];
            const auto where = "events[" + std::to_string(i) + "]";
            if (!e.is_object()) {
                throw SchemaError(where, "expected object");
            }
            AnomalyEvent ev;
            ev.at_ms = static_cast<EpochMs>(num(e, "at_ms", where));
            if (!e.contains("target") || !e["target"].is_string()) {
                throw SchemaError(where + ".target", "expected string");
            }
            try {
                ev.target = OntologyPath::parse(e["target"].get<std::string>());
            }
            catch (const Error& err) {
                throw SchemaError(where + ".target", err.what());
            }
            if (e.contains("value")) {
                ev.value = num(e, "value", where);
            }
            if (e.contains("offset")) {
                ev.offset = num(e, "offset", where);
            }
            if (e.contains("release_ticks")) {
                ev.release_ticks = static_cast<int>(num(e, "release_ticks", where));
            }
            cfg.events.push_back(std::move(ev));
        }
    }
    if (doc.contains("signals")) {
        if (!doc["signals"].is_object()) {
            throw SchemaError("signals", "expected object");
        }
        for (auto it = doc["signals"].begin(); it != doc["signals"].end(); ++it) {
            cfg.signals[it.key()] = read_signal(it.value(), "signals." + it.key());
        }
    }
    validate_scenario(cfg);
    return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw Error(Errc::not_found, "cannot open scenario file '" + file.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_scenario(buf.str());
    }
    catch (const Error& e) {
        throw Error(e.code(), file.string() + ": " + e.what());
    }
}

/***********************************************************************************************************************
 * Demo site
 **********************************************************************************************************************/

namespace {

DataNode data(std::string id, std::string name, Unit unit, Semantic semantic)
{
    return DataNode {std::move(id), std::move(name), unit, semantic, json::object()};
}

Asset asset(std::string id, std::string name, AssetKind kind, Vec3 position)
{
    Asset a;
    a.id = std::move(id);
    a.name = std::move(name);
    a.kind = kind;
    a.position = position;
    return a;
}

Resource resource(std::string id, std::string name, std::vector<DataNode> data)
{
    Resource r;
    r.id = std::move(id);
    r.name = std::move(name);
    r.data = std::move(data);
    return r;
}

Department department(std::string id, std::string name, Rect2 footprint)
{
    Department d;
    d.id = std::move(id);
    d.name = std::move(name);
    d.footprint = footprint;
    return d;
}

} // namespace

SiteDescriptor build_demo_site()
{
    SiteDescriptor site;
    site.id = "demo";
    site.name = "Demo pilot site";
    site.bounds = Box3 {90.0, 40.0, 12.0};

    auto cooling = department("cooling", "Cooling line", Rect2 {0.0, 0.0, 50.0, 22.0});
    const double compartment_offsets[kCompartmentsPerTunnel] = {-1.8, -0.6, 0.6, 1.8};
    for (int t = 1; t <= 3; ++t) {
        auto tunnel = asset("tunnel-" + std::to_string(t), "Cooling tunnel " + std::to_string(t),
            AssetKind::cooling_tunnel, Vec3 {20.0, 5.0 + 6.0 * (t - 1), 1.5});
        std::vector<DataNode> power {data("momentary", "Momentary power", Unit::kilowatt, Semantic::momentary)};
        for (const auto& model : kPredictionModels) {
            power.push_back(data(model, "Predicted power (" + model + ")", Unit::kilowatt, Semantic::predicted));
        }
        tunnel.resources.push_back(resource("power", "Energy meter", std::move(power)));
        for (std::size_t c = 0; c < kCompartmentsPerTunnel; ++c) {
            auto comp = resource("compartment-" + std::to_string(c + 1), "Compartment " + std::to_string(c + 1),
                {data("temperature", "Temperature", Unit::celsius, Semantic::momentary)});
            comp.offset = Vec3 {compartment_offsets[c], 0.0, 0.0};
            tunnel.resources.push_back(std::move(comp));
        }
        cooling.assets.push_back(std::move(tunnel));
    }

    auto storage = department("storage", "Liquid storage", Rect2 {50.0, 0.0, 40.0, 22.0});
    for (int k = 1; k <= 4; ++k) {
        auto tank = asset("tank-" + std::to_string(k), "Liquid tank " + std::to_string(k), AssetKind::liquid_tank,
            Vec3 {58.0 + 8.0 * (k - 1), 6.0, 2.0});
        tank.resources.push_back(
            resource("temp", "Temperature", {data("temperature", "Temperature", Unit::celsius, Semantic::momentary)}));
        tank.resources.push_back(
            resource("level", "Fill level", {data("fullness", "Fullness", Unit::fraction, Semantic::momentary)}));
        storage.assets.push_back(std::move(tank));
    }

    auto mixing = department("mixing", "Mixing", Rect2 {0.0, 22.0, 45.0, 18.0});
    for (std::size_t m = 1; m <= kMixingMachines; ++m) {
        auto mixer = asset("mixer-" + std::to_string(m), "Mixing machine " + std::to_string(m),
            AssetKind::mixing_machine, Vec3 {12.0 + 16.0 * static_cast<double>(m - 1), 31.0, 1.0});
        mixer.resources.push_back(resource("power", "Energy meter",
            {data("momentary", "Momentary power", Unit::kilowatt, Semantic::momentary)}));
        mixing.assets.push_back(std::move(mixer));
    }

    auto utilities = department("utilities", "Utilities", Rect2 {45.0, 22.0, 45.0, 18.0});
    auto env = asset("env-1", "Ambient conditions", AssetKind::env_sensor, Vec3 {60.0, 36.0, 3.0});
    env.resources.push_back(resource("ambient", "Ambient",
        {data("temperature", "Average temperature", Unit::celsius, Semantic::average),
            data("humidity", "Average relative humidity", Unit::percent_rh, Semantic::average)}));
    utilities.assets.push_back(std::move(env));

    auto panel = asset("panel-1", "Power distribution panel", AssetKind::power_panel, Vec3 {80.0, 30.0, 1.5});
    for (int m = 1; m <= 4; ++m) {
        panel.resources.push_back(resource("meter-" + std::to_string(m), "Meter " + std::to_string(m),
            {data("status", "Meter status", Unit::unitless, Semantic::status),
                data("power", "Momentary power", Unit::kilowatt, Semantic::momentary)}));
    }
    utilities.assets.push_back(std::move(panel));

    site.departments.push_back(std::move(cooling));
    site.departments.push_back(std::move(storage));
    site.departments.push_back(std::move(mixing));
    site.departments.push_back(std::move(utilities));
    return site;
}

std::map<std::string, SignalSpec> demo_signals(const SiteDescriptor& site)
{
    std::map<std::string, SignalSpec> specs;
    for_each_data(site, [&](const OntologyPath& path, const NodeRef& ref) {
        const auto kind = ref.asset->kind;
        const auto& id = ref.data->id;
        SignalSpec spec = Constant {0.0};
        switch (kind) {
        case AssetKind::cooling_tunnel:
            if (ref.resource->offset) {
                spec = RandomWalk {4.0, 0.05, 2.0, 6.0};
            }
            else if (id == "model-a") {
                spec = Distortion {"momentary", Distortion::Kind::bias, 1.03};
            }
            else if (id == "model-b") {
                spec = Distortion {"momentary", Distortion::Kind::noise, 0.2};
            }
            else if (id == "model-c") {
                spec = Distortion {"momentary", Distortion::Kind::lag, 1.0};
            }
            else {
                spec = RandomWalk {5.5, 0.1, 3.0, 8.0};
            }
            break;
        case AssetKind::liquid_tank:
            spec = id == "fullness" ? SignalSpec {RandomWalk {0.6, 0.01, 0.0, 1.0}}
                                    : SignalSpec {RandomWalk {41.5, 0.1, 38.0, 45.0}};
            break;
        case AssetKind::mixing_machine: spec = Periodic {4.0, 1.5, 120'000}; break;
        case AssetKind::env_sensor:
            spec = id == "humidity" ? SignalSpec {RandomWalk {45.0, 0.5, 30.0, 60.0}}
                                    : SignalSpec {Periodic {23.0, 3.0, 600'000}};
            break;
        case AssetKind::power_panel:
            spec = id == "status" ? SignalSpec {Constant {0.0}} : SignalSpec {RandomWalk {1.4, 0.05, 0.5, 2.5}};
            break;
        case AssetKind::generic: break;
        }
        specs.emplace(path.str(), spec);
    });
    return specs;
}

/***********************************************************************************************************************
 * Simulator
 **********************************************************************************************************************/

namespace {

std::uint64_t fnv1a(std::string_view text)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

Simulator::Simulator(SiteDescriptor site, ScenarioConfig config) : site_(std::move(site)), config_(std::move(config))
{
    validate_scenario(config_);
    if (config_.start_ms <= 0) {
        throw Error(Errc::invalid_argument, "scenario start_ms must be set to a positive epoch timestamp");
    }
    auto defaults = site_.id == "demo" ? demo_signals(site_) : std::map<std::string, SignalSpec> {};
    for_each_data(site_, [&](const OntologyPath& path, const NodeRef& ref) {
        const auto key = path.str();
        auto it = config_.signals.find(key);
        const SignalSpec* spec = nullptr;
        if (it != config_.signals.end()) {
            spec = &it->second;
        }
        else if (auto d = defaults.find(key); d != defaults.end()) {
            spec = &d->second;
        }
        if (!spec) {
            throw Error(Errc::invalid_argument, "no signal spec for '" + key + "'");
        }
        validate_signal(*spec);
        Node node {path, ref.data->unit, *spec, std::mt19937_64(splitmix64(config_.seed ^ fnv1a(key))), 0.0, {}, 0.0};
        if (const auto* walk = std::get_if<RandomWalk>(&node.spec)) {
            node.state = std::clamp(walk->mean, walk->lo, walk->hi);
        }
        index_.emplace(key, nodes_.size());
        nodes_.push_back(std::move(node));
    });
    for (const auto& n : nodes_) {
        if (const auto* d = std::get_if<Distortion>(&n.spec)) {
            const auto source = n.path.parent().child(d->source).str();
            auto it = index_.find(source);
            if (it == index_.end() || std::holds_alternative<Distortion>(nodes_[it->second].spec)) {
                throw Error(Errc::invalid_argument, "distortion on '" + n.path.str() + "' needs a generator source '" +
                                                        source + "'");
            }
        }
    }
    for (const auto& e : config_.events) {
        inject_anomaly(e);
    }
}

EpochMs Simulator::next_time() const noexcept
{
    return config_.start_ms + static_cast<EpochMs>(tick_) * config_.tick_ms;
}

void Simulator::inject_anomaly(const AnomalyEvent& event)
{
    if (!event.target.is_full() || !index_.count(event.target.str())) {
        throw Error(Errc::not_found, "anomaly target '" + event.target.str() + "' is not a Data node of site '" +
                                         site_.id + "'");
    }
    if (event.value.has_value() == event.offset.has_value()) {
        throw Error(Errc::invalid_argument, "anomaly must set exactly one of value/offset");
    }
    const auto at = std::max<EpochMs>(event.at_ms, 0);
    auto from = static_cast<std::size_t>((at + config_.tick_ms - 1) / config_.tick_ms);
    from = std::max(from, tick_);
    const auto release = static_cast<std::size_t>(event.release_ticks.value_or(config_.release_ticks));
    overrides_.emplace(event.target.str(), Override {from, from + release, event.value, event.offset});
}

double Simulator::generate(Node& node, EpochMs t)
{
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, RandomWalk>) {
                if (tick_ > 0) {
                    std::normal_distribution<double> step(0.0, s.sigma);
                    const double drift = s.reversion * (s.mean - node.state);
                    node.state = std::clamp(node.state + drift + (s.sigma > 0.0 ? step(node.rng) : 0.0), s.lo, s.hi);
                }
                return node.state;
            }
            else if constexpr (std::is_same_v<T, Periodic>) {
                const double phase = static_cast<double>(t - config_.start_ms) / static_cast<double>(s.period_ms);
                return s.base + s.amplitude * std::sin(2.0 * std::numbers::pi * phase);
            }
            else if constexpr (std::is_same_v<T, Constant>) {
                return s.value;
            }
            else {
                const auto& source = nodes_[index_.at(node.path.parent().child(s.source).str())];
                switch (s.kind) {
                case Distortion::Kind::bias: return source.generated * s.parameter;
                case Distortion::Kind::noise: {
                    std::normal_distribution<double> noise(0.0, s.parameter);
                    return source.generated + (s.parameter > 0.0 ? noise(node.rng) : 0.0);
                }
                case Distortion::Kind::lag: {
                    const auto lag = static_cast<std::size_t>(s.parameter);
                    const auto& h = source.history;
                    return h[h.size() - 1 - std::min(lag, h.size() - 1)];
                }
                }
                return source.generated;
            }
        },
        node.spec);
}

std::vector<TelemetrySample> Simulator::step(EpochMs t)
{
    if (done()) {
        throw Error(Errc::invalid_argument, "scenario has ended");
    }
    if (t != next_time()) {
        throw Error(Errc::invalid_argument, "simulator step at " + std::to_string(t) + ", expected " +
                                                std::to_string(next_time()));
    }
    for (auto& n : nodes_) {
        if (!std::holds_alternative<Distortion>(n.spec)) {
            n.generated = generate(n, t);
            n.history.push_back(n.generated);
            if (n.history.size() > 16) {
                n.history.erase(n.history.begin());
            }
        }
    }
    for (auto& n : nodes_) {
        if (std::holds_alternative<Distortion>(n.spec)) {
            n.generated = generate(n, t);
        }
    }

    std::vector<TelemetrySample> out;
    out.reserve(nodes_.size());
    for (const auto& n : nodes_) {
        double value = n.generated;
        auto [first, last] = overrides_.equal_range(n.path.str());
        for (auto it = first; it != last; ++it) {
            const auto& o = it->second;
            if (tick_ >= o.from_tick && tick_ < o.until_tick) {
                value = o.value ? *o.value : n.generated + *o.offset;
            }
        }
        out.push_back(TelemetrySample {n.path, t, value, n.unit, Quality::good});
    }
    ++tick_;
    return out;
}

} // namespace floorsight::sim
