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

#include <spdlog/spdlog.h>

#include "floorsight/gateway.hpp"

namespace floorsight {

using json = nlohmann::json;

Gateway::Gateway(const ServerConfig& config, WallClock clock)
    : config_(config), platform_(build_platform(config, std::move(clock)))
{
    sessions_ = std::make_unique<SessionRegistry>(*platform_, config_.session_idle);
    platform_->alerts().on_notification([this](const Notification& n) {
        spdlog::info("notification id={} rule={} path={} value={}", n.id, n.rule_id, n.path.str(), n.value);
        sessions_->broadcast(n);
    });
    ingestor_ = std::make_unique<Ingestor>(*platform_, config_.broker, config_.reconnect_initial, config_.reconnect_max);
    api_ = std::make_unique<Api>(*platform_, *sessions_, [this] { return health(); });
    server_ = std::make_unique<HttpServer>(*api_, *sessions_,
        HttpServerOptions {config_.listen, config_.http_threads, std::chrono::milliseconds(config_.refresh_ms)});
}

Gateway::~Gateway() { stop(); }

void Gateway::start()
{
    if (running_.exchange(true)) {
        return;
    }
    try {
        server_->start();
    }
    catch (...) {
        running_ = false;
        throw;
    }
    ingestor_->start();
}

void Gateway::stop()
{
    if (!running_.exchange(false)) {
        return;
    }
    ingestor_->stop();
    server_->stop();
    spdlog::info("gateway stopped sessions={}", sessions_->size());
}

std::uint16_t Gateway::port() const noexcept { return server_->port(); }

json Gateway::health() const
{
    const auto s = ingestor_->stats();
    json sites = json::array();
    for (const auto& site : platform_->deployment().sites()) {
        sites.push_back(site.id);
    }
    return json {{"status", s.connected ? "ok" : "degraded"},
        {"ingest",
            {{"connected", s.connected}, {"broker", s.broker}, {"received", s.received}, {"accepted", s.accepted},
                {"rejected", s.rejected}, {"connects", s.connects}, {"last_error", s.last_error}}},
        {"sites", sites}, {"sessions", sessions_->size()}, {"streams", server_->open_streams()}};
}

} // namespace floorsight
