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

#include <atomic>
#include <deque>
#include <future>
#include <set>
#include <thread>
#include <vector>

#include <boost/asio.hpp>
#include <spdlog/spdlog.h>

#include "floorsight/error.hpp"
#include "floorsight/mqtt.hpp"

namespace floorsight::mqtt {

namespace asio = boost::asio;
using tcp = asio::ip::tcp;

namespace {

std::uint16_t read_u16(const std::string& b, std::size_t& pos)
{
    if (pos + 2 > b.size()) {
        throw Error(Errc::syntax, "truncated MQTT field");
    }
    const auto v = static_cast<std::uint16_t>((static_cast<std::uint8_t>(b[pos]) << 8) | static_cast<std::uint8_t>(b[pos + 1]));
    pos += 2;
    return v;
}

std::string read_str(const std::string& b, std::size_t& pos)
{
    const auto len = read_u16(b, pos);
    if (pos + len > b.size()) {
        throw Error(Errc::syntax, "truncated MQTT string");
    }
    auto s = b.substr(pos, len);
    pos += len;
    return s;
}

std::string u16(std::uint16_t v) { return std::string {static_cast<char>(v >> 8), static_cast<char>(v & 0xff)}; }

} // namespace

struct Broker::Impl : std::enable_shared_from_this<Broker::Impl> {
    struct Session : std::enable_shared_from_this<Session> {
        Impl& broker;
        tcp::socket socket;
        asio::steady_timer idle;
        Decoder decoder;
        std::array<char, 8192> rbuf {};
        std::deque<std::string> wq;
        std::vector<std::pair<std::string, int>> subs;
        std::string client_id;
        std::string peer;
        bool connected = false;
        bool closed = false;
        std::chrono::seconds keepalive {0};
        std::uint16_t next_id = 1;

        Session(Impl& b, tcp::socket s) : broker(b), socket(std::move(s)), idle(socket.get_executor())
        {
            boost::system::error_code ec;
            const auto ep = socket.remote_endpoint(ec);
            peer = ec ? "?" : ep.address().to_string() + ":" + std::to_string(ep.port());
        }

        void start()
        {
            arm_idle(std::chrono::seconds(10)); // CONNECT must arrive promptly
            read();
        }

        void arm_idle(std::chrono::steady_clock::duration d)
        {
            idle.expires_after(d);
            idle.async_wait([self = shared_from_this()](boost::system::error_code ec) {
                if (!ec) {
                    self->close("keep-alive expired");
                }
            });
        }

        void touch()
        {
            if (keepalive.count() > 0) {
                arm_idle(keepalive + keepalive / 2);
            }
            else if (connected) {
                idle.cancel();
            }
        }

        void read()
        {
            socket.async_read_some(asio::buffer(rbuf), [self = shared_from_this()](boost::system::error_code ec, std::size_t n) {
                if (ec) {
                    self->close(ec == asio::error::eof ? "peer closed" : ec.message());
                    return;
                }
                try {
                    self->decoder.feed(std::string_view(self->rbuf.data(), n));
                    while (auto p = self->decoder.next()) {
                        self->handle(*p);
                        if (self->closed) {
                            return;
                        }
                    }
                }
                catch (const Error& e) {
                    self->close(std::string("protocol error: ") + e.what());
                    return;
                }
                self->read();
            });
        }

        void send(const Packet& p)
        {
            if (closed) {
                return;
            }
            wq.push_back(encode_packet(p));
            if (wq.size() == 1) {
                write();
            }
        }

        void write()
        {
            asio::async_write(socket, asio::buffer(wq.front()), [self = shared_from_this()](boost::system::error_code ec, std::size_t) {
                if (ec) {
                    self->close(ec.message());
                    return;
                }
                self->wq.pop_front();
                if (!self->wq.empty()) {
                    self->write();
                }
            });
        }

        void close(const std::string& why)
        {
            if (closed) {
                return;
            }
            closed = true;
            boost::system::error_code ignored;
            idle.cancel();
            socket.shutdown(tcp::socket::shutdown_both, ignored);
            socket.close(ignored);
            broker.sessions.erase(shared_from_this());
            broker.session_count = broker.sessions.size();
            spdlog::debug("broker: session {} ({}) closed: {}", client_id, peer, why);
        }

        void handle(const Packet& p)
        {
            if (!connected && p.type != PacketType::connect) {
                throw Error(Errc::syntax, "first packet is not CONNECT");
            }
            switch (p.type) {
            case PacketType::connect:
                return on_connect(p);
            case PacketType::publish:
                touch();
                return on_publish(p);
            case PacketType::puback:
                touch();
                return;
            case PacketType::subscribe:
                touch();
                return on_subscribe(p);
            case PacketType::unsubscribe:
                touch();
                return on_unsubscribe(p);
            case PacketType::pingreq:
                touch();
                return send(Packet {PacketType::pingresp, 0, {}});
            case PacketType::disconnect:
                return close("client disconnect");
            default:
                throw Error(Errc::syntax, "unexpected packet type " + std::to_string(static_cast<int>(p.type)));
            }
        }

        void on_connect(const Packet& p)
        {
            if (connected) {
                throw Error(Errc::syntax, "second CONNECT");
            }
            std::size_t pos = 0;
            const auto protocol = read_str(p.body, pos);
            if (pos + 4 > p.body.size()) {
                throw Error(Errc::syntax, "truncated CONNECT");
            }
            const auto level = static_cast<std::uint8_t>(p.body[pos++]);
            const auto flags = static_cast<std::uint8_t>(p.body[pos++]);
            keepalive = std::chrono::seconds(read_u16(p.body, pos));
            if (protocol != "MQTT" || level != 4) {
                send(Packet {PacketType::connack, 0, std::string("\x00\x01", 2)});
                return close("unsupported protocol level");
            }
            client_id = read_str(p.body, pos);
            if (flags & 0x04) { // will topic and message are accepted and ignored
                read_str(p.body, pos);
                read_str(p.body, pos);
            }
            if (flags & 0x80) {
                read_str(p.body, pos);
            }
            if (flags & 0x40) {
                read_str(p.body, pos);
            }
            if (client_id.empty()) {
                if ((flags & 0x02) == 0) {
                    send(Packet {PacketType::connack, 0, std::string("\x00\x02", 2)});
                    return close("empty client id without clean session");
                }
                client_id = "anon-" + std::to_string(++broker.anon_counter);
            }
            // session takeover
            for (const auto& other : std::vector<std::shared_ptr<Session>>(broker.sessions.begin(), broker.sessions.end())) {
                if (other.get() != this && other->connected && other->client_id == client_id) {
                    other->close("taken over by a new connection");
                }
            }
            connected = true;
            send(Packet {PacketType::connack, 0, std::string("\x00\x00", 2)});
            touch();
            spdlog::debug("broker: {} connected from {}", client_id, peer);
        }

        void on_publish(const Packet& p)
        {
            const auto pub = parse_publish(p);
            if (pub.qos == 2) {
                throw Error(Errc::syntax, "QoS 2 is not supported");
            }
            if (!valid_topic_name(pub.topic)) {
                throw Error(Errc::syntax, "invalid topic name in PUBLISH");
            }
            if (pub.qos == 1) {
                send(Packet {PacketType::puback, 0, u16(pub.packet_id)});
            }
            broker.route(pub);
        }

        void on_subscribe(const Packet& p)
        {
            if (p.flags != 0x02) {
                throw Error(Errc::syntax, "SUBSCRIBE with bad flags");
            }
            std::size_t pos = 0;
            const auto id = read_u16(p.body, pos);
            std::string codes;
            while (pos < p.body.size()) {
                const auto filter = read_str(p.body, pos);
                if (pos >= p.body.size()) {
                    throw Error(Errc::syntax, "SUBSCRIBE without QoS byte");
                }
                const int qos = static_cast<std::uint8_t>(p.body[pos++]) & 0x03;
                if (!valid_topic_filter(filter) || qos > 2) {
                    codes.push_back(static_cast<char>(0x80));
                    continue;
                }
                const int granted = std::min(qos, 1);
                auto it = std::find_if(subs.begin(), subs.end(), [&](const auto& s) { return s.first == filter; });
                if (it != subs.end()) {
                    it->second = granted;
                }
                else {
                    subs.emplace_back(filter, granted);
                }
                codes.push_back(static_cast<char>(granted));
            }
            if (codes.empty()) {
                throw Error(Errc::syntax, "SUBSCRIBE without filters");
            }
            send(Packet {PacketType::suback, 0, u16(id) + codes});
        }

        void on_unsubscribe(const Packet& p)
        {
            std::size_t pos = 0;
            const auto id = read_u16(p.body, pos);
            while (pos < p.body.size()) {
                const auto filter = read_str(p.body, pos);
                std::erase_if(subs, [&](const auto& s) { return s.first == filter; });
            }
            send(Packet {PacketType::unsuback, 0, u16(id)});
        }

        void deliver(const Publish& pub, int qos)
        {
            Publish out {pub.topic, pub.payload, qos, false, false, 0};
            if (qos == 1) {
                out.packet_id = next_id++;
                if (next_id == 0) {
                    next_id = 1;
                }
            }
            send(make_publish(out));
        }
    };

    BrokerOptions options;
    asio::io_context ioc;
    tcp::acceptor acceptor {ioc};
    std::thread thread;
    std::set<std::shared_ptr<Session>> sessions; // I/O thread only
    std::atomic<std::size_t> session_count {0};
    std::atomic<std::uint64_t> routed {0};
    std::atomic<std::uint16_t> bound_port {0};
    std::uint64_t anon_counter = 0;
    bool running = false;

    void accept()
    {
        acceptor.async_accept([self = shared_from_this()](boost::system::error_code ec, tcp::socket socket) {
            if (ec) {
                if (ec != asio::error::operation_aborted) {
                    spdlog::warn("broker: accept failed: {}", ec.message());
                    self->accept();
                }
                return;
            }
            socket.set_option(tcp::no_delay(true));
            auto s = std::make_shared<Session>(*self, std::move(socket));
            self->sessions.insert(s);
            self->session_count = self->sessions.size();
            s->start();
            self->accept();
        });
    }

    void route(const Publish& pub)
    {
        ++routed;
        for (const auto& s : std::vector<std::shared_ptr<Session>>(sessions.begin(), sessions.end())) {
            if (!s->connected) {
                continue;
            }
            int best = -1;
            for (const auto& [filter, qos] : s->subs) {
                if (topic_matches(filter, pub.topic)) {
                    best = std::max(best, qos);
                }
            }
            if (best >= 0) {
                s->deliver(pub, std::min(best, pub.qos));
            }
        }
    }
};

Broker::Broker(BrokerOptions options) : impl_(std::make_shared<Impl>())
{
    impl_->options = std::move(options);
}

Broker::~Broker() { stop(); }

void Broker::start()
{
    if (impl_->running) {
        return;
    }
    try {
        const tcp::endpoint ep(asio::ip::make_address(impl_->options.host), impl_->options.port);
        impl_->acceptor.open(ep.protocol());
        impl_->acceptor.set_option(tcp::acceptor::reuse_address(true));
        impl_->acceptor.bind(ep);
        impl_->acceptor.listen();
    }
    catch (const boost::system::system_error& e) {
        boost::system::error_code ignored;
        impl_->acceptor.close(ignored);
        throw Error(Errc::unavailable, "broker cannot listen on " + impl_->options.host + ":" +
                                           std::to_string(impl_->options.port) + ": " + e.code().message());
    }
    impl_->bound_port = impl_->acceptor.local_endpoint().port();
    impl_->running = true;
    impl_->accept();
    impl_->thread = std::thread([impl = impl_] { impl->ioc.run(); });
    spdlog::info("broker: listening on {}:{}", impl_->options.host, impl_->bound_port.load());
}

void Broker::stop()
{
    if (!impl_->running) {
        return;
    }
    impl_->running = false;
    std::promise<void> done;
    asio::post(impl_->ioc, [impl = impl_, &done] {
        boost::system::error_code ignored;
        impl->acceptor.close(ignored);
        for (const auto& s : std::vector<std::shared_ptr<Impl::Session>>(impl->sessions.begin(), impl->sessions.end())) {
            s->close("broker shutting down");
        }
        done.set_value();
    });
    done.get_future().wait();
    impl_->ioc.stop();
    impl_->thread.join();
    impl_->sessions.clear();
    impl_->session_count = 0;
}

std::uint16_t Broker::port() const noexcept { return impl_->bound_port; }
std::size_t Broker::session_count() const noexcept { return impl_->session_count; }
std::uint64_t Broker::messages_routed() const noexcept { return impl_->routed; }

} // namespace floorsight::mqtt
