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

// Minimal MQTT 3.1.1 over TCP: enough of the protocol for telemetry fan-out
// (QoS 0 and 1, wildcard subscriptions, keep-alive). No retained messages,
// wills, persistent sessions or QoS 2.

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace floorsight::mqtt {

enum class PacketType : std::uint8_t {
    connect = 1,
    connack = 2,
    publish = 3,
    puback = 4,
    subscribe = 8,
    suback = 9,
    unsubscribe = 10,
    unsuback = 11,
    pingreq = 12,
    pingresp = 13,
    disconnect = 14,
};

struct Packet {
    PacketType type = PacketType::pingreq;
    std::uint8_t flags = 0; // low nibble of the fixed header
    std::string body;       // variable header + payload

    friend bool operator==(const Packet&, const Packet&) = default;
};

inline constexpr std::size_t kMaxPacketSize = 1 << 20;

std::string encode_remaining_length(std::size_t n);
std::string encode_packet(const Packet& packet);

/// Splits a byte stream into packets. Throws Error(syntax) on a malformed
/// length, a reserved packet type or a packet above kMaxPacketSize.
class Decoder {
public:
    void feed(std::string_view bytes);
    std::optional<Packet> next();
    std::size_t buffered() const noexcept { return buffer_.size(); }

private:
    std::string buffer_;
};

struct Publish {
    std::string topic;
    std::string payload;
    int qos = 0;
    bool dup = false;
    bool retain = false;
    std::uint16_t packet_id = 0; // QoS 1 only

    friend bool operator==(const Publish&, const Publish&) = default;
};

Packet make_publish(const Publish& p);

/// Throws Error(syntax) for a truncated body or QoS 3.
Publish parse_publish(const Packet& packet);

/// Non-empty, no wildcards, no NUL, at most 65535 bytes.
bool valid_topic_name(std::string_view topic) noexcept;

/// '+' must fill a whole level; '#' only as the whole last level.
bool valid_topic_filter(std::string_view filter) noexcept;

/// Wildcards at the first level do not match topics starting with '$'.
bool topic_matches(std::string_view filter, std::string_view topic) noexcept;

struct BrokerOptions {
    std::string host = "127.0.0.1";
    std::uint16_t port = 1883; // 0 picks a free port
};

/// In-process broker on its own I/O thread.
class Broker {
public:
    explicit Broker(BrokerOptions options = {});
    ~Broker();

    Broker(const Broker&) = delete;
    Broker& operator=(const Broker&) = delete;

    /// Throws Error(unavailable) when the address cannot be bound.
    void start();

    /// Closes the listener and every client connection. Idempotent.
    void stop();

    std::uint16_t port() const noexcept;
    std::size_t session_count() const noexcept;
    std::uint64_t messages_routed() const noexcept;

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

struct ClientOptions {
    std::string host = "127.0.0.1";
    std::uint16_t port = 1883;
    std::string client_id;
    std::chrono::seconds keepalive {30};
    std::chrono::milliseconds timeout {3000}; // connect and acknowledgement waits
    int publish_attempts = 3;                  // QoS 1 sends before giving up
};

/**
 * Blocking client facade over an I/O thread.
 *
 * Handlers run on the I/O thread and must not call back into the client
 * synchronously. After a lost connection, connect() may be called again;
 * subscriptions are not restored automatically.
 */
class Client {
public:
    using MessageHandler = std::function<void(const std::string& topic, const std::string& payload)>;
    using DisconnectHandler = std::function<void(const std::string& reason)>;

    explicit Client(ClientOptions options);
    ~Client();

    Client(const Client&) = delete;
    Client& operator=(const Client&) = delete;

    void on_message(MessageHandler handler);
    void on_disconnect(DisconnectHandler handler);

    /// Throws Error(unavailable) when the broker cannot be reached or refuses.
    void connect();

    /// Returns the granted QoS. Throws Error(unavailable) if not connected or
    /// unacknowledged, Error(invalid_argument) for a bad filter or a refusal.
    int subscribe(const std::string& filter, int qos = 1);

    /// QoS 1 blocks until acknowledged, resending with DUP on timeout.
    /// Throws Error(unavailable) or Error(invalid_argument).
    void publish(const std::string& topic, const std::string& payload, int qos = 0);

    /// Sends DISCONNECT and closes. The disconnect handler is not called.
    void disconnect();

    bool connected() const noexcept;

private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

} // namespace floorsight::mqtt
