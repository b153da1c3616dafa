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

#include <unistd.h>

#include <spdlog/spdlog.h>

#include "floorsight/error.hpp"
#include "floorsight/gateway.hpp"
#include "floorsight/mqtt.hpp"

namespace floorsight {

Ingestor::Ingestor(Platform& platform, HostPort broker, std::chrono::milliseconds backoff_initial,
    std::chrono::milliseconds backoff_max)
    : platform_(platform), broker_(std::move(broker)), initial_(backoff_initial), max_(backoff_max)
{
    stats_.broker = broker_.str();
}

Ingestor::~Ingestor() { stop(); }

void Ingestor::start()
{
    std::lock_guard lock(mu_);
    if (thread_.joinable()) {
        return;
    }
    stopping_ = false;
    thread_ = std::thread([this] { run(); });
}

void Ingestor::stop()
{
    {
        std::lock_guard lock(mu_);
        stopping_ = true;
    }
    cv_.notify_all();
    if (thread_.joinable() && thread_.get_id() != std::this_thread::get_id()) {
        thread_.join();
    }
}

IngestStats Ingestor::stats() const
{
    std::lock_guard lock(mu_);
    return stats_;
}

void Ingestor::run()
{
    mqtt::ClientOptions options;
    options.host = broker_.host;
    options.port = broker_.port;
    options.client_id = "floorsight-gw-" + std::to_string(::getpid()) + "-"
        + std::to_string(reinterpret_cast<std::uintptr_t>(this) & 0xffff);
    options.keepalive = std::chrono::seconds(10);
    mqtt::Client client(options);

    client.on_message([this](const std::string& topic, const std::string& payload) {
        {
            std::lock_guard lock(mu_);
            ++stats_.received;
        }
        try {
            platform_.ingest(parse_sample(platform_.deployment(), topic, payload));
            std::lock_guard lock(mu_);
            ++stats_.accepted;
        }
        catch (const std::exception& e) {
            spdlog::debug("sample rejected topic={} error=\"{}\"", topic, e.what());
            std::lock_guard lock(mu_);
            ++stats_.rejected;
            stats_.last_error = topic + ": " + e.what();
        }
    });
    client.on_disconnect([this](const std::string& reason) {
        spdlog::warn("broker connection lost broker={} reason=\"{}\"", broker_.str(), reason);
        {
            std::lock_guard lock(mu_);
            lost_ = true;
            stats_.connected = false;
            stats_.last_error = reason;
        }
        cv_.notify_all();
    });

    auto delay = initial_;
    std::unique_lock lock(mu_);
    while (!stopping_) {
        lost_ = false;
        lock.unlock();
        std::string failure;
        try {
            client.connect();
            for (const auto& site : platform_.deployment().sites()) {
                client.subscribe(site_topic_filter(site.id), 1);
            }
        }
        catch (const std::exception& e) {
            failure = e.what();
            if (client.connected()) {
                client.disconnect();
            }
        }
        lock.lock();
        if (failure.empty()) {
            stats_.connected = true;
            ++stats_.connects;
            spdlog::info("broker connected broker={} sites={}", broker_.str(), platform_.deployment().sites().size());
            delay = initial_;
            cv_.wait(lock, [this] { return stopping_ || lost_; });
            if (stopping_) {
                break;
            }
        }
        else {
            stats_.connected = false;
            stats_.last_error = failure;
            spdlog::warn("broker unreachable broker={} retry_ms={} error=\"{}\"", broker_.str(), delay.count(), failure);
        }
        cv_.wait_for(lock, delay, [this] { return stopping_; });
        delay = std::min(delay * 2, max_);
    }
    stats_.connected = false;
    lock.unlock();
    if (client.connected()) {
        client.disconnect();
    }
}

} // namespace floorsight
