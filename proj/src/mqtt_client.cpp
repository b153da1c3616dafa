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

#include <deque>
#include <future>
#include <map>
#include <utility>
#include <mutex>
#include <thread>

#include <boost/asio.hpp>

#include "floorsight/error.hpp"
#include "floorsight/mqtt.hpp"

namespace floorsight::mqtt {

namespace asio = boost::asio;
using tcp = asio::ip::tcp;
using Clock = std::chrono::steady_clock;

namespace {

std::string u16(std::uint16_t v) { return std::string {static_cast<char>(v >> 8), static_cast<char>(v & 0xff)}; }

std::string str(std::string_view s) { return u16(static_cast<std::uint16_t>(s.size())) + std::string(s); }

std::uint16_t get_u16(const std::string& b, std::size_t pos)
{
    if (pos + 2 > b.size()) {
        throw Error(Errc::syntax, "truncated MQTT acknowledgement");
    }
    return static_cast<std::uint16_t>((static_cast<std::uint8_t>(b[pos]) << 8) | static_cast<std::uint8_t>(b[pos + 1]));
}


} // namespace

struct Client::Impl : std::enable_shared_from_this<Client::Impl> {
    using Waiter = std::shared_ptr<std::promise<Packet>>;

    ClientOptions opt;
    asio::io_context ioc;
    asio::executor_work_guard<asio::io_context::executor_type> work {ioc.get_executor()};
    std::thread thread;

    // I/O thread only
    std::unique_ptr<tcp::socket> socket;
    std::unique_ptr<tcp::resolver> resolver;
    asio::steady_timer ping {ioc};
    asio::steady_timer connack_timer {ioc};
    std::shared_ptr<std::promise<void>> pending_connect;
    Decoder decoder;
    std::array<char, 8192> rbuf {};
    std::deque<std::string> wq;
    std::shared_ptr<std::promise<void>> drained; // set by disconnect(): close once wq empties
    Clock::time_point last_rx, last_tx;
    std::uint64_t generation = 0;

    // shared
    mutable std::mutex mu;
    bool is_connected = false;
    std::map<std::uint16_t, Waiter> waiters;
    std::uint16_t next_id = 1;
    MessageHandler on_msg;
    DisconnectHandler on_disc;

    std::uint16_t allocate(Waiter w)
    {
        std::lock_guard lock(mu);
        while (next_id == 0 || waiters.count(next_id)) {
            ++next_id;
        }
        const auto id = next_id++;
        waiters[id] = std::move(w);
        return id;
    }

    void resolve_waiter(std::uint16_t key, Packet p)
    {
        Waiter w;
        {
            std::lock_guard lock(mu);
            auto it = waiters.find(key);
            if (it == waiters.end()) {
                return; // late duplicate acknowledgement
            }
            w = std::move(it->second);
            waiters.erase(it);
        }
        w->set_value(std::move(p));
    }

    void drop_waiter(std::uint16_t key)
    {
        std::lock_guard lock(mu);
        waiters.erase(key);
    }

    // Runs on the I/O thread.
    void lost(const std::string& reason, bool notify = true)
    {
        if (!socket) {
            return;
        }
        boost::system::error_code ignored;
        socket->shutdown(tcp::socket::shutdown_both, ignored);
        socket->close(ignored);
        socket.reset();
        ++generation;
        wq.clear();
        if (drained) {
            std::exchange(drained, nullptr)->set_value();
        }
        ping.cancel();
        connack_timer.cancel();
        if (pending_connect) {
            std::exchange(pending_connect, nullptr)
                ->set_exception(std::make_exception_ptr(Error(Errc::unavailable,
                    "cannot connect to broker " + opt.host + ":" + std::to_string(opt.port) + ": " + reason)));
        }
        bool was_connected;
        std::map<std::uint16_t, Waiter> failed;
        DisconnectHandler handler;
        {
            std::lock_guard lock(mu);
            was_connected = is_connected;
            is_connected = false;
            failed.swap(waiters);
            handler = on_disc;
        }
        for (auto& [id, w] : failed) {
            w->set_exception(std::make_exception_ptr(Error(Errc::unavailable, "connection lost: " + reason)));
        }
        if (notify && was_connected && handler) {
            handler(reason);
        }
    }

    void send(std::string bytes)
    {
        if (!socket) {
            return;
        }
        last_tx = Clock::now();
        wq.push_back(std::move(bytes));
        if (wq.size() == 1) {
            write();
        }
    }

    void write()
    {
        asio::async_write(*socket, asio::buffer(wq.front()),
            [self = shared_from_this(), gen = generation](boost::system::error_code ec, std::size_t) {
                if (gen != self->generation) {
                    return;
                }
                if (ec) {
                    self->lost(ec.message());
                    return;
                }
                self->wq.pop_front();
                if (!self->wq.empty()) {
                    self->write();
                }
                else if (self->drained) {
                    self->lost("client disconnect", false);
                }
            });
    }

    void read()
    {
        socket->async_read_some(asio::buffer(rbuf), [self = shared_from_this(), gen = generation](boost::system::error_code ec, std::size_t n) {
            if (gen != self->generation) {
                return;
            }
            if (ec) {
                self->lost(ec == asio::error::eof ? "broker closed the connection" : ec.message());
                return;
            }
            self->last_rx = Clock::now();
            try {
                self->decoder.feed(std::string_view(self->rbuf.data(), n));
                while (auto p = self->decoder.next()) {
                    self->handle(std::move(*p));
                    if (gen != self->generation) {
                        return;
                    }
                }
            }
            catch (const Error& e) {
                self->lost(std::string("protocol error: ") + e.what());
                return;
            }
            self->read();
        });
    }

    void handle(Packet p)
    {
        switch (p.type) {
        case PacketType::connack: {
            if (p.body.size() != 2) {
                throw Error(Errc::syntax, "bad CONNACK");
            }
            on_connack(p);
            return;
        }
        case PacketType::puback:
        case PacketType::suback:
        case PacketType::unsuback: {
            const auto id = get_u16(p.body, 0);
            resolve_waiter(id, std::move(p));
            return;
        }
        case PacketType::publish: {
            const auto pub = parse_publish(p);
            if (pub.qos == 1) {
                send(encode_packet(Packet {PacketType::puback, 0, u16(pub.packet_id)}));
            }
            MessageHandler handler;
            {
                std::lock_guard lock(mu);
                handler = on_msg;
            }
            if (handler) {
                handler(pub.topic, pub.payload);
            }
            return;
        }
        case PacketType::pingresp:
            return;
        default:
            throw Error(Errc::syntax, "unexpected packet from broker");
        }
    }

    void schedule_ping()
    {
        if (opt.keepalive.count() == 0) {
            return;
        }
        ping.expires_after(opt.keepalive / 2);
        ping.async_wait([self = shared_from_this(), gen = generation](boost::system::error_code ec) {
            if (ec || gen != self->generation) {
                return;
            }
            const auto now = Clock::now();
            if (now - self->last_rx > self->opt.keepalive + self->opt.keepalive / 2) {
                self->lost("keep-alive timeout");
                return;
            }
            if (now - self->last_tx >= self->opt.keepalive / 2) {
                self->send(encode_packet(Packet {PacketType::pingreq, 0, {}}));
            }
            self->schedule_ping();
        });
    }

    void start_connect(std::shared_ptr<std::promise<void>> done)
    {
        lost("reconnecting", false);
        decoder = Decoder {};
        socket = std::make_unique<tcp::socket>(ioc);
        resolver = std::make_unique<tcp::resolver>(ioc);
        const auto gen = generation;
        auto fail = [this, done](const std::string& why) {
            lost(why, false);
            done->set_exception(std::make_exception_ptr(
                Error(Errc::unavailable, "cannot connect to broker " + opt.host + ":" + std::to_string(opt.port) + ": " + why)));
        };
        resolver->async_resolve(opt.host, std::to_string(opt.port),
            [self = shared_from_this(), done, gen, fail](boost::system::error_code ec, tcp::resolver::results_type results) {
                if (gen != self->generation) {
                    return;
                }
                if (ec) {
                    return fail(ec.message());
                }
                asio::async_connect(*self->socket, results,
                    [self, done, gen, fail](boost::system::error_code ec, const tcp::endpoint&) {
                        if (gen != self->generation) {
                            return;
                        }
                        if (ec) {
                            return fail(ec.message());
                        }
                        self->socket->set_option(tcp::no_delay(true));
                        self->handshake(done);
                    });
            });
    }

    void handshake(std::shared_ptr<std::promise<void>> done)
    {
        pending_connect = std::move(done);
        std::string body = str("MQTT");
        body.push_back(4);    // protocol level 3.1.1
        body.push_back(0x02); // clean session
        body += u16(static_cast<std::uint16_t>(opt.keepalive.count()));
        body += str(opt.client_id);
        last_rx = Clock::now();
        send(encode_packet(Packet {PacketType::connect, 0, body}));
        read();
        connack_timer.expires_after(opt.timeout);
        connack_timer.async_wait([self = shared_from_this(), gen = generation](boost::system::error_code ec) {
            if (!ec && gen == self->generation && self->pending_connect) {
                self->lost("broker did not acknowledge CONNECT", false);
            }
        });
    }

    void on_connack(const Packet& p)
    {
        if (!pending_connect) {
            throw Error(Errc::syntax, "unexpected CONNACK");
        }
        connack_timer.cancel();
        const auto rc = static_cast<std::uint8_t>(p.body[1]);
        if (rc != 0) {
            lost("broker refused connection (code " + std::to_string(rc) + ")", false);
            return;
        }
        {
            std::lock_guard lock(mu);
            is_connected = true;
        }
        schedule_ping();
        std::exchange(pending_connect, nullptr)->set_value();
    }
};

Client::Client(ClientOptions options) : impl_(std::make_shared<Impl>())
{
    impl_->opt = std::move(options);
    if (impl_->opt.client_id.empty()) {
        impl_->opt.client_id = "floorsight-" + std::to_string(reinterpret_cast<std::uintptr_t>(impl_.get()) % 1000000);
    }
    impl_->thread = std::thread([impl = impl_] { impl->ioc.run(); });
}

Client::~Client()
{
    try {
        disconnect();
    }
    catch (...) {
    }
    impl_->work.reset();
    asio::post(impl_->ioc, [impl = impl_] { impl->lost("client destroyed", false); });
    impl_->ioc.stop();
    impl_->thread.join();
}

void Client::on_message(MessageHandler handler)
{
    std::lock_guard lock(impl_->mu);
    impl_->on_msg = std::move(handler);
}

void Client::on_disconnect(DisconnectHandler handler)
{
    std::lock_guard lock(impl_->mu);
    impl_->on_disc = std::move(handler);
}

void Client::connect()
{
    auto done = std::make_shared<std::promise<void>>();
    auto fut = done->get_future();
    asio::post(impl_->ioc, [impl = impl_, done] { impl->start_connect(done); });
    // the handshake enforces its own deadline after the TCP connect; this
    // bounds resolution and connection time as well
    if (fut.wait_for(impl_->opt.timeout * 2) != std::future_status::ready) {
        asio::post(impl_->ioc, [impl = impl_] { impl->lost("connect timeout", false); });
        throw Error(Errc::unavailable, "timed out connecting to broker " + impl_->opt.host + ":" + std::to_string(impl_->opt.port));
    }
    fut.get();
}

int Client::subscribe(const std::string& filter, int qos)
{
    if (!valid_topic_filter(filter) || qos < 0 || qos > 1) {
        throw Error(Errc::invalid_argument, "invalid subscription '" + filter + "'");
    }
    if (!connected()) {
        throw Error(Errc::unavailable, "not connected");
    }
    auto w = std::make_shared<std::promise<Packet>>();
    auto fut = w->get_future();
    const auto id = impl_->allocate(w);
    const std::string body = u16(id) + str(filter) + std::string(1, static_cast<char>(qos));
    asio::post(impl_->ioc, [impl = impl_, bytes = encode_packet(Packet {PacketType::subscribe, 0x02, body})]() mutable {
        impl->send(std::move(bytes));
    });
    if (fut.wait_for(impl_->opt.timeout) != std::future_status::ready) {
        impl_->drop_waiter(id);
        throw Error(Errc::unavailable, "SUBSCRIBE not acknowledged");
    }
    const auto ack = fut.get();
    if (ack.body.size() < 3) {
        throw Error(Errc::unavailable, "malformed SUBACK");
    }
    const auto code = static_cast<std::uint8_t>(ack.body[2]);
    if (code == 0x80) {
        throw Error(Errc::invalid_argument, "broker refused subscription '" + filter + "'");
    }
    return code;
}

void Client::publish(const std::string& topic, const std::string& payload, int qos)
{
    if (!valid_topic_name(topic) || qos < 0 || qos > 1) {
        throw Error(Errc::invalid_argument, "invalid publish to '" + topic + "'");
    }
    if (!connected()) {
        throw Error(Errc::unavailable, "not connected");
    }
    if (qos == 0) {
        asio::post(impl_->ioc, [impl = impl_, bytes = encode_packet(make_publish(Publish {topic, payload, 0}))]() mutable {
            impl->send(std::move(bytes));
        });
        return;
    }
    auto w = std::make_shared<std::promise<Packet>>();
    auto fut = w->get_future();
    const auto id = impl_->allocate(w);
    for (int attempt = 0; attempt < std::max(1, impl_->opt.publish_attempts); ++attempt) {
        const Publish pub {topic, payload, 1, attempt > 0, false, id};
        asio::post(impl_->ioc, [impl = impl_, bytes = encode_packet(make_publish(pub))]() mutable { impl->send(std::move(bytes)); });
        if (fut.wait_for(impl_->opt.timeout) == std::future_status::ready) {
            fut.get(); // rethrows a lost connection
            return;
        }
    }
    impl_->drop_waiter(id);
    throw Error(Errc::unavailable, "PUBLISH to '" + topic + "' not acknowledged");
}

void Client::disconnect()
{
    if (impl_->ioc.stopped()) {
        return;
    }
    auto drained = std::make_shared<std::promise<void>>();
    auto done = drained->get_future();
    asio::post(impl_->ioc, [impl = impl_, drained] {
        bool was;
        {
            std::lock_guard lock(impl->mu);
            was = impl->is_connected;
        }
        if (!impl->socket || !was || impl->drained) {
            impl->lost("client disconnect", false);
            drained->set_value();
            return;
        }
        // Queued publishes go out before DISCONNECT; the socket closes once written.
        impl->drained = drained;
        impl->send(encode_packet(Packet {PacketType::disconnect, 0, {}}));
    });
    if (done.wait_for(impl_->opt.timeout) == std::future_status::timeout) {
        asio::post(impl_->ioc, [impl = impl_] { impl->lost("client disconnect", false); });
        done.wait();
    }
}

bool Client::connected() const noexcept
{
    std::lock_guard lock(impl_->mu);
    return impl_->is_connected;
}

} // namespace floorsight::mqtt
