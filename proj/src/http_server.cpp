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

#include <set>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <spdlog/spdlog.h>

#include "floorsight/error.hpp"
#include "floorsight/gateway.hpp"

namespace floorsight {

namespace net = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;
using json = nlohmann::json;

namespace {

constexpr std::size_t kBodyLimit = 1 << 20;
constexpr auto kReadTimeout = std::chrono::seconds(30);
constexpr auto kExpirePeriod = std::chrono::seconds(10);

class StreamConnection;

} // namespace

struct HttpServer::Impl {
    Impl(Api& a, SessionRegistry& s, HttpServerOptions o) : api(a), sessions(s), options(std::move(o)) {}

    Api& api;
    SessionRegistry& sessions;
    HttpServerOptions options;
    net::io_context ioc;
    tcp::acceptor acceptor {ioc};
    net::steady_timer refresh_timer {ioc};
    net::steady_timer expire_timer {ioc};
    std::vector<std::thread> threads;
    std::atomic<std::uint16_t> port {0};
    std::atomic<std::size_t> open_streams {0};
    std::atomic<bool> stopping {false};
    std::mutex streams_mu;
    std::set<std::shared_ptr<StreamConnection>> streams;

    void do_accept();
    void schedule_refresh();
    void schedule_expire();
};

namespace {

template <class Body>
void common_headers(http::response<Body>& res)
{
    res.set(http::field::server, "floorsight");
    res.set(http::field::access_control_allow_origin, "*");
}

class StreamConnection : public StreamSink, public std::enable_shared_from_this<StreamConnection> {
public:
    StreamConnection(HttpServer::Impl* server, tcp::socket&& socket, std::string session)
        : server_(server), ws_(std::move(socket)), session_(std::move(session))
    {
    }

    void run(http::request<http::string_body> req)
    {
        ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
        ws_.set_option(websocket::stream_base::decorator(
            [](websocket::response_type& res) { res.set(http::field::server, "floorsight"); }));
        ws_.read_message_max(64 * 1024);
        ws_.async_accept(req, beast::bind_front_handler(&StreamConnection::on_accept, shared_from_this()));
    }

    void wake() override
    {
        net::post(ws_.get_executor(), [self = shared_from_this()] { self->write_next(); });
    }

    void close(websocket::close_code code)
    {
        net::post(ws_.get_executor(), [self = shared_from_this(), code] {
            if (!self->open_ || self->closing_) {
                return;
            }
            self->closing_ = true;
            self->ws_.async_close(code, [self](beast::error_code) {});
        });
    }

    /// Only once the I/O threads are gone.
    void force_close()
    {
        beast::error_code ignored;
        beast::get_lowest_layer(ws_).socket().close(ignored);
    }

private:
    void on_accept(beast::error_code ec)
    {
        if (ec) {
            spdlog::debug("stream handshake failed session={} error=\"{}\"", session_, ec.message());
            return;
        }
        open_ = true;
        ++server_->open_streams;
        {
            std::lock_guard lock(server_->streams_mu);
            server_->streams.insert(shared_from_this());
        }
        if (server_->stopping) {
            close(websocket::close_code::going_away);
        }
        ws_.text(true);
        try {
            server_->sessions.attach(session_, shared_from_this());
        }
        catch (const Error& e) {
            spdlog::info("stream rejected session={} error=\"{}\"", session_, e.what());
            close(websocket::close_code::policy_error);
        }
        spdlog::info("stream opened session={}", session_);
        read_next();
    }

    void read_next()
    {
        ws_.async_read(in_, beast::bind_front_handler(&StreamConnection::on_read, shared_from_this()));
    }

    void on_read(beast::error_code ec, std::size_t)
    {
        if (ec) {
            finish(ec);
            return;
        }
        const auto text = beast::buffers_to_string(in_.data());
        in_.consume(in_.size());
        try {
            const auto doc = json::parse(text);
            std::string site;
            if (doc.is_object() && doc.contains("site") && doc["site"].is_string()) {
                site = doc["site"].get<std::string>();
            }
            const auto& pose = doc.is_object() && doc.contains("pose") ? doc["pose"] : doc;
            server_->sessions.update_pose(session_, site, pose_from_json(pose));
        }
        catch (const std::exception& e) {
            spdlog::debug("stream frame ignored session={} error=\"{}\"", session_, e.what());
        }
        read_next();
    }

    void write_next()
    {
        if (writing_ || !open_ || closing_) {
            return;
        }
        auto frame = outbox.pop();
        if (!frame) {
            return;
        }
        writing_ = true;
        current_ = std::move(frame->text);
        ws_.async_write(net::buffer(current_), [self = shared_from_this()](beast::error_code ec, std::size_t) {
            self->writing_ = false;
            if (ec) {
                self->finish(ec);
                return;
            }
            self->write_next();
        });
    }

    void finish(beast::error_code ec)
    {
        if (!open_) {
            return;
        }
        open_ = false;
        --server_->open_streams;
        server_->sessions.detach(session_, this);
        {
            std::lock_guard lock(server_->streams_mu);
            server_->streams.erase(shared_from_this());
        }
        spdlog::info("stream closed session={} reason=\"{}\" coalesced={} dropped_events={}", session_, ec.message(),
            outbox.coalesced(), outbox.dropped_events());
    }

    HttpServer::Impl* server_;
    websocket::stream<beast::tcp_stream> ws_;
    std::string session_;
    beast::flat_buffer in_;
    std::string current_;
    bool open_ = false;
    bool closing_ = false;
    bool writing_ = false;
};

class HttpConnection : public std::enable_shared_from_this<HttpConnection> {
public:
    HttpConnection(HttpServer::Impl* server, tcp::socket&& socket)
        : server_(server), stream_(std::move(socket))
    {
    }

    void run()
    {
        net::dispatch(stream_.get_executor(), beast::bind_front_handler(&HttpConnection::read, shared_from_this()));
    }

private:
    void read()
    {
        parser_.emplace();
        parser_->body_limit(kBodyLimit);
        stream_.expires_after(kReadTimeout);
        http::async_read(stream_, buffer_, *parser_, beast::bind_front_handler(&HttpConnection::on_read, shared_from_this()));
    }

    void on_read(beast::error_code ec, std::size_t)
    {
        if (ec == http::error::end_of_stream) {
            beast::error_code ignored;
            stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
            return;
        }
        if (ec) {
            return;
        }
        auto req = parser_->release();
        const auto target = std::string(req.target());

        if (websocket::is_upgrade(req)) {
            if (const auto id = Api::stream_session(target); id && server_->sessions.contains(*id)) {
                stream_.expires_never();
                std::make_shared<StreamConnection>(server_, stream_.release_socket(), *id)->run(std::move(req));
                return;
            }
        }

        auto res = std::make_shared<http::response<http::string_body>>();
        res->version(req.version());
        res->keep_alive(req.keep_alive());
        common_headers(*res);
        if (req.method() == http::verb::options) {
            res->result(http::status::no_content);
            res->set(http::field::access_control_allow_methods, "GET, POST, OPTIONS");
            res->set(http::field::access_control_allow_headers, "Content-Type");
        }
        else {
            const auto out = server_->api.handle(std::string(req.method_string()), target, req.body());
            res->result(static_cast<unsigned>(out.status));
            res->set(http::field::content_type, "application/json");
            res->body() = out.body.dump();
            spdlog::debug("http method={} target={} status={}", std::string(req.method_string()), target, out.status);
        }
        res->prepare_payload();
        http::async_write(stream_, *res, [self = shared_from_this(), res](beast::error_code ec, std::size_t) {
            if (ec) {
                return;
            }
            if (!res->keep_alive()) {
                beast::error_code ignored;
                self->stream_.socket().shutdown(tcp::socket::shutdown_send, ignored);
                return;
            }
            self->read();
        });
    }

    HttpServer::Impl* server_;
    beast::tcp_stream stream_;
    beast::flat_buffer buffer_;
    std::optional<http::request_parser<http::string_body>> parser_;
};

} // namespace

void HttpServer::Impl::do_accept()
{
    acceptor.async_accept(net::make_strand(ioc), [self = this](beast::error_code ec, tcp::socket socket) {
        if (ec) {
            if (ec != net::error::operation_aborted && self->acceptor.is_open()) {
                spdlog::warn("accept failed error=\"{}\"", ec.message());
            }
            if (!self->acceptor.is_open()) {
                return;
            }
        }
        else {
            std::make_shared<HttpConnection>(self, std::move(socket))->run();
        }
        self->do_accept();
    });
}

void HttpServer::Impl::schedule_refresh()
{
    refresh_timer.expires_after(options.refresh);
    refresh_timer.async_wait([self = this](beast::error_code ec) {
        if (ec || self->stopping) {
            return;
        }
        try {
            self->sessions.refresh();
        }
        catch (const std::exception& e) {
            spdlog::error("refresh failed error=\"{}\"", e.what());
        }
        self->schedule_refresh();
    });
}

void HttpServer::Impl::schedule_expire()
{
    expire_timer.expires_after(kExpirePeriod);
    expire_timer.async_wait([self = this](beast::error_code ec) {
        if (ec || self->stopping) {
            return;
        }
        self->sessions.expire();
        self->schedule_expire();
    });
}

HttpServer::HttpServer(Api& api, SessionRegistry& sessions, HttpServerOptions options)
    : impl_(std::make_shared<Impl>(api, sessions, std::move(options)))
{
    if (impl_->options.threads < 1 || impl_->options.refresh.count() <= 0) {
        throw Error(Errc::invalid_argument, "http server needs at least one thread and a positive refresh period");
    }
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::start()
{
    auto& s = *impl_;
    const auto& listen = s.options.listen;
    try {
        const auto address = net::ip::make_address(listen.host == "localhost" ? "127.0.0.1" : listen.host);
        const tcp::endpoint endpoint(address, listen.port);
        s.acceptor.open(endpoint.protocol());
        s.acceptor.set_option(net::socket_base::reuse_address(true));
        s.acceptor.bind(endpoint);
        s.acceptor.listen(net::socket_base::max_listen_connections);
    }
    catch (const std::exception& e) {
        beast::error_code ignored;
        s.acceptor.close(ignored);
        throw Error(Errc::unavailable, "cannot listen on " + listen.str() + ": " + e.what());
    }
    s.port = s.acceptor.local_endpoint().port();
    s.do_accept();
    s.schedule_refresh();
    s.schedule_expire();
    for (int i = 0; i < s.options.threads; ++i) {
        s.threads.emplace_back([impl = impl_] { impl->ioc.run(); });
    }
    spdlog::info("http listening address={}:{} threads={}", listen.host, s.port.load(), s.options.threads);
}

void HttpServer::stop()
{
    auto& s = *impl_;
    if (s.stopping.exchange(true)) {
        return;
    }
    net::post(s.ioc, [impl = impl_] {
        beast::error_code ignored;
        impl->acceptor.close(ignored);
        impl->refresh_timer.cancel();
        impl->expire_timer.cancel();
    });
    {
        std::lock_guard lock(s.streams_mu);
        for (const auto& c : s.streams) {
            c->close(websocket::close_code::going_away);
        }
    }
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(2);
    while (s.open_streams > 0 && std::chrono::steady_clock::now() < deadline && !s.threads.empty()) {
        std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    s.ioc.stop();
    for (auto& t : s.threads) {
        if (t.joinable()) {
            t.join();
        }
    }
    s.threads.clear();
    std::lock_guard lock(s.streams_mu);
    for (const auto& c : s.streams) {
        c->force_close();
    }
    s.streams.clear();
    if (s.port) {
        spdlog::info("http stopped");
    }
}

std::uint16_t HttpServer::port() const noexcept { return impl_->port; }

std::size_t HttpServer::open_streams() const noexcept { return impl_->open_streams; }

} // namespace floorsight
