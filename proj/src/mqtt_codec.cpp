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

#include <vector>

#include "floorsight/error.hpp"
#include "floorsight/mqtt.hpp"

namespace floorsight::mqtt {

std::string encode_remaining_length(std::size_t n)
{
    std::string out;
    do {
        auto byte = static_cast<std::uint8_t>(n % 128);
        n /= 128;
        if (n > 0) {
            byte |= 0x80;
        }
        out.push_back(static_cast<char>(byte));
    } while (n > 0);
    return out;
}

std::string encode_packet(const Packet& packet)
{
    std::string out;
    out.push_back(static_cast<char>((static_cast<std::uint8_t>(packet.type) << 4) | (packet.flags & 0x0f)));
    out += encode_remaining_length(packet.body.size());
    out += packet.body;
    return out;
}

void Decoder::feed(std::string_view bytes) { buffer_.append(bytes); }

std::optional<Packet> Decoder::next()
{
    if (buffer_.size() < 2) {
        return std::nullopt;
    }
    const auto first = static_cast<std::uint8_t>(buffer_[0]);
    const auto type = first >> 4;
    if (type == 0 || type == 15) {
        throw Error(Errc::syntax, "reserved MQTT packet type " + std::to_string(type));
    }
    std::size_t length = 0;
    std::size_t multiplier = 1;
    std::size_t pos = 1;
    for (;;) {
        if (pos >= buffer_.size()) {
            return std::nullopt;
        }
        if (pos > 4) {
            throw Error(Errc::syntax, "MQTT remaining length longer than four bytes");
        }
        const auto byte = static_cast<std::uint8_t>(buffer_[pos++]);
        length += (byte & 0x7f) * multiplier;
        multiplier *= 128;
        if ((byte & 0x80) == 0) {
            break;
        }
    }
    if (length > kMaxPacketSize) {
        throw Error(Errc::syntax, "MQTT packet of " + std::to_string(length) + " bytes exceeds the limit");
    }
    if (buffer_.size() < pos + length) {
        return std::nullopt;
    }
    Packet p {static_cast<PacketType>(type), static_cast<std::uint8_t>(first & 0x0f), buffer_.substr(pos, length)};
    buffer_.erase(0, pos + length);
    return p;
}

namespace {

void put_u16(std::string& out, std::uint16_t v)
{
    out.push_back(static_cast<char>(v >> 8));
    out.push_back(static_cast<char>(v & 0xff));
}

} // namespace

Packet make_publish(const Publish& p)
{
    Packet packet {PacketType::publish, 0, {}};
    packet.flags = static_cast<std::uint8_t>((p.dup ? 0x08 : 0) | ((p.qos & 0x03) << 1) | (p.retain ? 0x01 : 0));
    put_u16(packet.body, static_cast<std::uint16_t>(p.topic.size()));
    packet.body += p.topic;
    if (p.qos > 0) {
        put_u16(packet.body, p.packet_id);
    }
    packet.body += p.payload;
    return packet;
}

Publish parse_publish(const Packet& packet)
{
    Publish p;
    p.dup = (packet.flags & 0x08) != 0;
    p.qos = (packet.flags >> 1) & 0x03;
    p.retain = (packet.flags & 0x01) != 0;
    if (p.qos == 3) {
        throw Error(Errc::syntax, "PUBLISH with QoS 3");
    }
    const auto& b = packet.body;
    if (b.size() < 2) {
        throw Error(Errc::syntax, "truncated PUBLISH");
    }
    const std::size_t len = (static_cast<std::uint8_t>(b[0]) << 8) | static_cast<std::uint8_t>(b[1]);
    std::size_t pos = 2 + len;
    if (b.size() < pos + (p.qos > 0 ? 2 : 0)) {
        throw Error(Errc::syntax, "truncated PUBLISH");
    }
    p.topic = b.substr(2, len);
    if (p.qos > 0) {
        p.packet_id = static_cast<std::uint16_t>((static_cast<std::uint8_t>(b[pos]) << 8) | static_cast<std::uint8_t>(b[pos + 1]));
        pos += 2;
    }
    p.payload = b.substr(pos);
    return p;
}

bool valid_topic_name(std::string_view topic) noexcept
{
    return !topic.empty() && topic.size() <= 65535 && topic.find_first_of(std::string_view("+#\0", 3)) == std::string_view::npos;
}

namespace {

std::vector<std::string_view> levels(std::string_view s)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto slash = s.find('/', start);
        out.push_back(s.substr(start, slash == std::string_view::npos ? std::string_view::npos : slash - start));
        if (slash == std::string_view::npos) {
            return out;
        }
        start = slash + 1;
    }
}

} // namespace

bool valid_topic_filter(std::string_view filter) noexcept
{
    if (filter.empty() || filter.size() > 65535 || filter.find('\0') != std::string_view::npos) {
        return false;
    }
    const auto parts = levels(filter);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto level = parts[i];
        if (level.find('#') != std::string_view::npos && (level != "#" || i + 1 != parts.size())) {
            return false;
        }
        if (level.find('+') != std::string_view::npos && level != "+") {
            return false;
        }
    }
    return true;
}

bool topic_matches(std::string_view filter, std::string_view topic) noexcept
{
    if (!topic.empty() && topic.front() == '$' && !filter.empty() && (filter.front() == '+' || filter.front() == '#')) {
        return false;
    }
    const auto f = levels(filter);
    const auto t = levels(topic);
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] == "#") {
            return true; // also matches the parent level itself
        }
        if (i >= t.size()) {
            return false;
        }
        if (f[i] != "+" && f[i] != t[i]) {
            return false;
        }
    }
    return f.size() == t.size();
}

} // namespace floorsight::mqtt
