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

// Blocking HTTP and WebSocket clients for talking to a live gateway.

#include <chrono>
#include <optional>
#include <string>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>
#include <nlohmann/json.hpp>

namespace floorsight::testing {

struct HttpResult {
    int status = 0;
    nlohmann::json body;
    std::string raw;
};

inline HttpResult http_request(std::uint16_t port, boost::beast::http::verb verb, const std::string& target,
    const std::string& body = "", const std::string& upgrade_headers = "")
{
    namespace beast = boost::beast;
    namespace http = beast::http;
    boost::asio::io_context ioc;
    beast::tcp_stream stream(ioc);
    stream.expires_after(std::chrono::seconds(5));
    stream.connect(boost::asio::ip::tcp::endpoint(boost::asio::ip::make_address("127.0.0.1"), port));
    http::request<http::string_body> req {verb, target, 11};
    req.set(http::field::host, "127.0.0.1");
    if (!body.empty()) {
        req.set(http::field::content_type, "application/json");
        req.body() = body;
    }
    if (!upgrade_headers.empty()) {
        req.set(http::field::connection, "Upgrade");
        req.set(http::field::upgrade, upgrade_headers);
    }
    req.prepare_payload();
    http::write(stream, req);
    beast::flat_buffer buffer;
    http::response<http::string_body> res;
    http::read(stream, buffer, res);
    HttpResult out;
    out.status = static_cast<int>(res.result_int());
    out.raw = res.body();
    out.body = nlohmann::json::parse(out.raw, nullptr, false);
    beast::error_code ignored;
    stream.socket().shutdown(boost::asio::ip::tcp::socket::shutdown_both, ignored);
    return out;
}

inline HttpResult http_get(std::uint16_t port, const std::string& target)
{
    return http_request(port, boost::beast::http::verb::get, target);
}

inline HttpResult http_post(std::uint16_t port, const std::string& target, const std::string& body)
{
    return http_request(port, boost::beast::http::verb::post, target, body);
}

class WsClient {
public:
    WsClient(std::uint16_t port, const std::string& target) : ws_(ioc_)
    {
        auto& layer = boost::beast::get_lowest_layer(ws_);
        layer.expires_after(std::chrono::seconds(5));
        layer.connect(boost::asio::ip::tcp::endpoint(boost::asio::ip::make_address("127.0.0.1"), port));
        ws_.handshake("127.0.0.1", target);
        layer.expires_never();
    }

    /// Next frame, or nullopt on timeout or close.
    std::optional<nlohmann::json> read(std::chrono::milliseconds timeout)
    {
        namespace beast = boost::beast;
        beast::flat_buffer buffer;
        beast::error_code ec;
        bool done = false;
        ws_.async_read(buffer, [&](beast::error_code e, std::size_t) {
            ec = e;
            done = true;
        });
        ioc_.restart();
        ioc_.run_for(timeout);
        if (!done) {
            beast::get_lowest_layer(ws_).cancel();
            ioc_.restart();
            ioc_.run();
            closed_ = true;
            return std::nullopt;
        }
        if (ec) {
            closed_ = true;
            close_reason_ = ws_.reason().code;
            return std::nullopt;
        }
        return nlohmann::json::parse(beast::buffers_to_string(buffer.data()));
    }

    void send(const std::string& text)
    {
        ws_.text(true);
        ws_.write(boost::asio::buffer(text));
    }

    void close()
    {
        boost::beast::error_code ignored;
        ws_.close(boost::beast::websocket::close_code::normal, ignored);
    }

    bool closed() const { return closed_; }
    unsigned close_reason() const { return close_reason_; }

private:
    boost::asio::io_context ioc_;
    boost::beast::websocket::stream<boost::beast::tcp_stream> ws_;
    bool closed_ = false;
    unsigned close_reason_ = 0;
};

} // namespace floorsight::testing
