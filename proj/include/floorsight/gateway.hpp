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

#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "floorsight/alerts.hpp"
#include "floorsight/analytics.hpp"
#include "floorsight/awareness.hpp"
#include "floorsight/ontology.hpp"
#include "floorsight/telemetry.hpp"

namespace floorsight {

using WallClock = std::function<EpochMs()>;

EpochMs system_now_ms();

struct HostPort {
    std::string host;
    std::uint16_t port = 0;

    std::string str() const { return host + ":" + std::to_string(port); }
    friend bool operator==(const HostPort&, const HostPort&) = default;
};

/// "host:port", "host" (default port) or ":port" (default host). Throws
/// Error(invalid_argument).
HostPort parse_host_port(std::string_view text, std::uint16_t default_port, std::string_view default_host = "127.0.0.1");

struct ServerConfig {
    HostPort broker {"127.0.0.1", 1883};
    std::vector<std::filesystem::path> descriptors;
    std::optional<std::filesystem::path> rules;
    HostPort listen {"127.0.0.1", 8080};
    EpochMs refresh_ms = 1000;
    std::chrono::seconds session_idle {300};
    std::size_t retention = TelemetryStore::kDefaultCapacity;
    AwarenessParams awareness;
    std::chrono::milliseconds reconnect_initial {500};
    std::chrono::milliseconds reconnect_max {10'000};
    int http_threads = 2;
};

/// Relative file paths resolve against `base_dir`. Throws SyntaxError,
/// SchemaError or Error(invalid_argument).
ServerConfig parse_server_config(std::string_view text, const std::filesystem::path& base_dir);
ServerConfig load_server_config(const std::filesystem::path& file);

/// FLOORSIGHT_BROKER (host[:port]) and FLOORSIGHT_PORT (listen port).
void apply_env_overrides(ServerConfig& config, const std::function<const char*(const char*)>& getenv);

/// Deployment, store and alert engine shared by ingest, REST and streams.
class Platform {
public:
    Platform(std::shared_ptr<const Deployment> deployment, std::size_t retention, AwarenessParams params,
        WallClock clock = system_now_ms);

    const Deployment& deployment() const noexcept { return *deployment_; }
    std::shared_ptr<const Deployment> deployment_ptr() const noexcept { return deployment_; }
    TelemetryStore& store() noexcept { return store_; }
    const TelemetryStore& store() const noexcept { return store_; }
    AlertEngine& alerts() noexcept { return alerts_; }
    const AlertEngine& alerts() const noexcept { return alerts_; }
    const AwarenessParams& awareness() const noexcept { return params_; }
    EpochMs now() const { return clock_(); }

    /// Stores the sample and evaluates rules against it.
    std::vector<Notification> ingest(const TelemetrySample& sample);

private:
    std::shared_ptr<const Deployment> deployment_;
    TelemetryStore store_;
    AlertEngine alerts_;
    AwarenessParams params_;
    WallClock clock_;
};

/// Loads descriptors and rules named by the config. Errors name the file.
std::unique_ptr<Platform> build_platform(const ServerConfig& config, WallClock clock = system_now_ms);

struct StreamFrame {
    std::uint64_t seq = 0;
    std::string text;
    bool packet = false;
};

/**
 * Per-connection send queue. Packets are state: only the newest pending one
 * is kept. Notifications are events: they queue up to a bound, dropping the
 * oldest beyond it. Frames leave in sequence order.
 */
class StreamOutbox {
public:
    explicit StreamOutbox(std::size_t event_capacity = 256) : event_capacity_(event_capacity) {}

    void push_packet(std::uint64_t seq, std::string text);
    void push_event(std::uint64_t seq, std::string text);
    std::optional<StreamFrame> pop();

    bool empty() const;
    std::uint64_t coalesced() const;
    std::uint64_t dropped_events() const;

private:
    mutable std::mutex mu_;
    std::optional<StreamFrame> packet_;
    std::deque<StreamFrame> events_;
    std::size_t event_capacity_;
    std::uint64_t coalesced_ = 0;
    std::uint64_t dropped_ = 0;
};

/// A connected stream consumer. wake() is called after frames are queued.
class StreamSink {
public:
    virtual ~StreamSink() = default;
    virtual void wake() = 0;
    StreamOutbox outbox;
};

struct PoseUpdate {
    std::uint64_t seq = 0;
    nlohmann::json packet;
};

/**
 * Observer sessions: pose, tier memory and attached streams.
 *
 * Each session has one sequence counter shared by packets and notification
 * events, so every attached stream sees strictly increasing numbers.
 */
class SessionRegistry {
public:
    using SteadyClock = std::function<std::chrono::steady_clock::time_point()>;

    SessionRegistry(Platform& platform, std::chrono::seconds idle_timeout,
        SteadyClock steady = std::chrono::steady_clock::now);

    /// Creates the session on first use. `site` may be empty when the
    /// deployment has exactly one site; a later pose may not switch sites.
    /// Throws Error(invalid_argument) or Error(not_found).
    PoseUpdate update_pose(const std::string& id, const std::string& site, const ObserverPose& pose);

    /// Queues the current packet to the new sink. Throws Error(not_found).
    void attach(const std::string& id, const std::shared_ptr<StreamSink>& sink);
    void detach(const std::string& id, const StreamSink* sink);

    /// Recomposes packets for every session with an attached stream.
    void refresh();

    /// Queues a notification event to the streams of sessions on its site.
    void broadcast(const Notification& n);

    /// Drops sessions without streams that have been idle past the timeout.
    std::size_t expire();

    bool contains(const std::string& id) const;
    std::size_t size() const;
    std::vector<std::string> ids() const;

private:
    struct Session {
        std::mutex mu;
        std::string site;
        ObserverPose pose;
        TierMemory memory;
        std::uint64_t seq = 0;
        std::chrono::steady_clock::time_point last_activity;
        std::vector<std::weak_ptr<StreamSink>> sinks;
    };

    std::shared_ptr<Session> find(const std::string& id) const;
    nlohmann::json compose(Session& s); // caller holds s.mu; bumps seq
    static std::vector<std::shared_ptr<StreamSink>> live_sinks(Session& s);

    Platform& platform_;
    std::chrono::seconds idle_timeout_;
    SteadyClock steady_;
    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
};

struct IngestStats {
    bool connected = false;
    std::string broker;
    std::uint64_t received = 0;
    std::uint64_t accepted = 0;
    std::uint64_t rejected = 0;
    std::uint64_t connects = 0;
    std::string last_error;
};

/// MQTT subscriber feeding the platform, reconnecting with exponential
/// backoff while the broker is unreachable.
class Ingestor {
public:
    Ingestor(Platform& platform, HostPort broker, std::chrono::milliseconds backoff_initial,
        std::chrono::milliseconds backoff_max);
    ~Ingestor();

    void start();
    void stop();
    IngestStats stats() const;

private:
    void run();

    Platform& platform_;
    HostPort broker_;
    std::chrono::milliseconds initial_;
    std::chrono::milliseconds max_;
    mutable std::mutex mu_;
    std::condition_variable cv_;
    bool stopping_ = false;
    bool lost_ = false;
    IngestStats stats_;
    std::thread thread_;
};

struct HttpResponse {
    int status = 200;
    nlohmann::json body;
};

/// REST routing independent of the transport.
class Api {
public:
    using HealthProvider = std::function<nlohmann::json()>;

    Api(Platform& platform, SessionRegistry& sessions, HealthProvider health);

    HttpResponse handle(std::string_view method, std::string_view target, std::string_view body) const;

    /// Session id of a stream target (/api/session/{id}/stream), if it is one.
    static std::optional<std::string> stream_session(std::string_view target);

private:
    Platform& platform_;
    SessionRegistry& sessions_;
    HealthProvider health_;
};

struct HttpServerOptions {
    HostPort listen {"127.0.0.1", 8080};
    int threads = 2;
    std::chrono::milliseconds refresh {1000};
};

/// HTTP/1.1 and WebSocket front end over Api and SessionRegistry.
class HttpServer {
public:
    HttpServer(Api& api, SessionRegistry& sessions, HttpServerOptions options);
    ~HttpServer();

    /// Throws Error(unavailable) when the address cannot be bound.
    void start();

    /// Stops accepting, closes streams with "going away" and joins the
    /// I/O threads. Idempotent.
    void stop();

    std::uint16_t port() const noexcept;
    std::size_t open_streams() const noexcept;

    struct Impl; // connection objects in the .cpp reach it directly

private:
    std::shared_ptr<Impl> impl_;
};

/// Everything `serve` runs: platform, ingest, sessions, REST and streams.
class Gateway {
public:
    explicit Gateway(const ServerConfig& config, WallClock clock = system_now_ms);
    ~Gateway();

    void start();
    void stop();

    std::uint16_t port() const noexcept;
    Platform& platform() noexcept { return *platform_; }
    SessionRegistry& sessions() noexcept { return *sessions_; }
    IngestStats ingest_stats() const { return ingestor_->stats(); }
    nlohmann::json health() const;

private:
    ServerConfig config_;
    std::unique_ptr<Platform> platform_;
    std::unique_ptr<SessionRegistry> sessions_;
    std::unique_ptr<Ingestor> ingestor_;
    std::unique_ptr<Api> api_;
    std::unique_ptr<HttpServer> server_;
    std::atomic<bool> running_ {false};
};

} // namespace floorsight
