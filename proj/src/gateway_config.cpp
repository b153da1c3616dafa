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

#include <charconv>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "floorsight/error.hpp"
#include "floorsight/gateway.hpp"

namespace floorsight {

using json = nlohmann::json;

EpochMs system_now_ms()
{
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
        .count();
}

HostPort parse_host_port(std::string_view text, std::uint16_t default_port, std::string_view default_host)
{
    HostPort out {std::string(default_host), default_port};
    const auto colon = text.rfind(':');
    std::string_view host = colon == std::string_view::npos ? text : text.substr(0, colon);
    if (!host.empty()) {
        out.host = std::string(host);
    }
    if (colon != std::string_view::npos) {
        const auto port = text.substr(colon + 1);
        unsigned value = 0;
        const auto [end, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
        if (ec != std::errc {} || end != port.data() + port.size() || value > 65535) {
            throw Error(Errc::invalid_argument, "bad port in address '" + std::string(text) + "'");
        }
        out.port = static_cast<std::uint16_t>(value);
    }
    if (out.host.empty()) {
        throw Error(Errc::invalid_argument, "empty host in address '" + std::string(text) + "'");
    }
    return out;
}

namespace {

double number(const json& j, const char* key, const std::string& where)
{
    if (!j[key].is_number()) {
        throw SchemaError(where.empty() ? key : where + "." + key, "expected number");
    }
    return j[key].get<double>();
}

std::string string_field(const json& j, const char* key)
{
    if (!j[key].is_string()) {
        throw SchemaError(key, "expected string");
    }
    return j[key].get<std::string>();
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p)
{
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base / path;
}

} // namespace

ServerConfig parse_server_config(std::string_view text, const std::filesystem::path& base_dir)
{
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    }
    catch (const json::parse_error& e) {
        throw SyntaxError(e.byte, std::string("JSON syntax error: ") + e.what());
    }
    if (!doc.is_object()) {
        throw SchemaError("", "server config must be an object");
    }
    ServerConfig c;
    if (doc.contains("broker")) {
        c.broker = parse_host_port(string_field(doc, "broker"), 1883);
    }
    if (doc.contains("listen")) {
        c.listen = parse_host_port(string_field(doc, "listen"), 8080);
    }
    if (!doc.contains("descriptors")) {
        throw SchemaError("descriptors", "required");
    }
    const auto& d = doc["descriptors"];
    if (d.is_string()) {
        c.descriptors.push_back(resolve(base_dir, d.get<std::string>()));
    }
    else if (d.is_array() && !d.empty()) {
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (!d[i].is_string()) {
                throw SchemaError("descriptors[" + std::to_string(i) + "]", "expected string");
            }
            c.descriptors.push_back(resolve(base_dir, d[i].get<std::string>()));
        }
    }
    else {
        throw SchemaError("descriptors", "expected a path or a non-empty list of paths");
    }
    if (doc.contains("rules") && !doc["rules"].is_null()) {
        c.rules = resolve(base_dir, string_field(doc, "rules"));
    }
    if (doc.contains("refresh_ms")) {
        c.refresh_ms = static_cast<EpochMs>(number(doc, "refresh_ms", ""));
    }
    if (doc.contains("session_idle_s")) {
        c.session_idle = std::chrono::seconds(static_cast<long>(number(doc, "session_idle_s", "")));
    }
    if (doc.contains("retention")) {
        c.retention = static_cast<std::size_t>(number(doc, "retention", ""));
    }
    if (doc.contains("http_threads")) {
        c.http_threads = static_cast<int>(number(doc, "http_threads", ""));
    }
    if (doc.contains("reconnect")) {
        const auto& r = doc["reconnect"];
        if (!r.is_object()) {
            throw SchemaError("reconnect", "expected object");
        }
        if (r.contains("initial_ms")) {
            c.reconnect_initial = std::chrono::milliseconds(static_cast<long>(number(r, "initial_ms", "reconnect")));
        }
        if (r.contains("max_ms")) {
            c.reconnect_max = std::chrono::milliseconds(static_cast<long>(number(r, "max_ms", "reconnect")));
        }
    }
    if (doc.contains("awareness")) {
        const auto& a = doc["awareness"];
        if (!a.is_object()) {
            throw SchemaError("awareness", "expected object");
        }
        auto& p = c.awareness;
        if (a.contains("r_detail")) p.radii.r_detail = number(a, "r_detail", "awareness");
        if (a.contains("r_prox_enter")) p.radii.r_prox_enter = number(a, "r_prox_enter", "awareness");
        if (a.contains("r_prox_exit")) p.radii.r_prox_exit = number(a, "r_prox_exit", "awareness");
        if (a.contains("fov_half_angle")) p.radii.fov_half_angle = number(a, "fov_half_angle", "awareness");
        if (a.contains("panel_cap")) p.panel_cap = static_cast<std::size_t>(number(a, "panel_cap", "awareness"));
        if (a.contains("detail_cap")) p.detail_cap = static_cast<std::size_t>(number(a, "detail_cap", "awareness"));
        if (a.contains("overview_window_ms")) {
            p.overview_window_ms = static_cast<EpochMs>(number(a, "overview_window_ms", "awareness"));
        }
    }

    if (c.refresh_ms <= 0) {
        throw Error(Errc::invalid_argument, "refresh_ms must be positive");
    }
    if (c.session_idle.count() <= 0) {
        throw Error(Errc::invalid_argument, "session_idle_s must be positive");
    }
    if (c.retention == 0) {
        throw Error(Errc::invalid_argument, "retention must be positive");
    }
    if (c.http_threads < 1) {
        throw Error(Errc::invalid_argument, "http_threads must be at least 1");
    }
    if (c.reconnect_initial.count() <= 0 || c.reconnect_max < c.reconnect_initial) {
        throw Error(Errc::invalid_argument, "reconnect delays must be positive and max >= initial");
    }
    const auto& r = c.awareness.radii;
    if (!(r.r_detail > 0 && r.r_prox_enter > 0 && r.r_prox_exit >= r.r_prox_enter)) {
        throw Error(Errc::invalid_argument, "awareness radii must be positive with r_prox_exit >= r_prox_enter");
    }
    if (r.fov_half_angle && !(*r.fov_half_angle > 0 && *r.fov_half_angle <= std::numbers::pi)) {
        throw Error(Errc::invalid_argument, "awareness fov_half_angle must be in (0, pi]");
    }
    return c;
}

ServerConfig load_server_config(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw Error(Errc::not_found, "cannot open server config '" + file.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_server_config(buf.str(), file.parent_path());
    }
    catch (const Error& e) {
        throw Error(e.code(), file.string() + ": " + e.what());
    }
}

void apply_env_overrides(ServerConfig& config, const std::function<const char*(const char*)>& getenv)
{
    if (const char* b = getenv("FLOORSIGHT_BROKER"); b && *b) {
        config.broker = parse_host_port(b, 1883);
    }
    if (const char* p = getenv("FLOORSIGHT_PORT"); p && *p) {
        config.listen = parse_host_port(std::string(":") + p, 8080, config.listen.host);
    }
}

Platform::Platform(std::shared_ptr<const Deployment> deployment, std::size_t retention, AwarenessParams params,
    WallClock clock)
    : deployment_(std::move(deployment)),
      store_(deployment_, retention),
      alerts_(deployment_),
      params_(std::move(params)),
      clock_(std::move(clock))
{
}

std::vector<Notification> Platform::ingest(const TelemetrySample& sample)
{
    store_.append(sample);
    return alerts_.evaluate(sample);
}

std::unique_ptr<Platform> build_platform(const ServerConfig& config, WallClock clock)
{
    std::vector<SiteDescriptor> sites;
    for (const auto& file : config.descriptors) {
        try {
            sites.push_back(load_descriptor(file));
        }
        catch (const InvariantError& e) {
            throw Error(Errc::invariant, file.string() + ": " + e.what());
        }
        spdlog::info("descriptor loaded file={} site={}", file.string(), sites.back().id);
    }
    auto deployment = std::make_shared<const Deployment>(std::move(sites));
    auto platform = std::make_unique<Platform>(deployment, config.retention, config.awareness, std::move(clock));
    if (config.rules) {
        for (auto& rule : load_rules(*config.rules)) {
            const auto id = rule.id;
            try {
                platform->alerts().register_rule(std::move(rule));
            }
            catch (const Error& e) {
                throw Error(e.code(), config.rules->string() + ": rule '" + id + "': " + e.what());
            }
        }
        spdlog::info("rules loaded file={} count={}", config.rules->string(), platform->alerts().rules().size());
    }
    return platform;
}

} // namespace floorsight
