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

#include <algorithm>
#include <charconv>
#include <cmath>

#include <spdlog/spdlog.h>

#include "floorsight/error.hpp"
#include "floorsight/gateway.hpp"

namespace floorsight {

using json = nlohmann::json;

namespace {

constexpr EpochMs kDefaultRangeMs = 60 * 60 * 1000;
constexpr std::size_t kDefaultNotificationLimit = 20;

std::string percent_decode(std::string_view in, bool plus_is_space)
{
    std::string out;
    out.reserve(in.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        const char c = in[i];
        if (c == '%') {
            unsigned v = 0;
            if (i + 2 >= in.size()) {
                throw Error(Errc::invalid_argument, "truncated percent escape");
            }
            const auto [end, ec] = std::from_chars(in.data() + i + 1, in.data() + i + 3, v, 16);
            if (ec != std::errc {} || end != in.data() + i + 3) {
                throw Error(Errc::invalid_argument, "bad percent escape");
            }
            out.push_back(static_cast<char>(v));
            i += 2;
        }
        else if (c == '+' && plus_is_space) {
            out.push_back(' ');
        }
        else {
            out.push_back(c);
        }
    }
    return out;
}

std::vector<std::string> split_path(std::string_view path)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= path.size()) {
        const auto slash = path.find('/', start);
        const auto end = slash == std::string_view::npos ? path.size() : slash;
        out.push_back(percent_decode(path.substr(start, end - start), false));
        if (slash == std::string_view::npos) {
            break;
        }
        start = slash + 1;
    }
    return out;
}

class Query {
public:
    explicit Query(std::string_view text)
    {
        while (!text.empty()) {
            const auto amp = text.find('&');
            const auto part = text.substr(0, amp);
            if (!part.empty()) {
                const auto eq = part.find('=');
                auto key = percent_decode(part.substr(0, eq), true);
                auto value = eq == std::string_view::npos ? std::string() : percent_decode(part.substr(eq + 1), true);
                values_[std::move(key)] = std::move(value);
            }
            text = amp == std::string_view::npos ? std::string_view() : text.substr(amp + 1);
        }
    }

    std::optional<std::string> get(const std::string& key) const
    {
        const auto it = values_.find(key);
        return it == values_.end() ? std::nullopt : std::optional(it->second);
    }

    std::optional<EpochMs> integer(const std::string& key) const
    {
        const auto v = get(key);
        if (!v) {
            return std::nullopt;
        }
        EpochMs out = 0;
        const auto [end, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
        if (ec != std::errc {} || end != v->data() + v->size()) {
            throw Error(Errc::invalid_argument, "query parameter '" + key + "' must be an integer");
        }
        return out;
    }

    bool flag(const std::string& key) const
    {
        const auto v = get(key);
        if (!v) {
            return false;
        }
        if (*v == "" || *v == "1" || *v == "true") {
            return true;
        }
        if (*v == "0" || *v == "false") {
            return false;
        }
        throw Error(Errc::invalid_argument, "query parameter '" + key + "' must be true or false");
    }

private:
    std::map<std::string, std::string> values_;
};

OntologyPath path_param(const Query& q, const std::string& key, bool required)
{
    const auto v = q.get(key);
    if (!v || v->empty()) {
        if (required) {
            throw Error(Errc::invalid_argument, "query parameter '" + key + "' is required");
        }
        return {};
    }
    return OntologyPath::parse(*v);
}

struct Window {
    EpochMs t0;
    EpochMs t1;
};

/// t1 defaults to now; t0 defaults to t1 - window (or `fallback`).
Window window_params(const Query& q, EpochMs now, EpochMs fallback)
{
    const auto t1 = q.integer("t1").value_or(now);
    const auto w = q.integer("window");
    if (w && *w <= 0) {
        throw Error(Errc::invalid_argument, "'window' must be positive");
    }
    const auto t0 = q.integer("t0").value_or(std::max<EpochMs>(0, t1 - w.value_or(fallback)));
    if (t0 > t1) {
        throw Error(Errc::invalid_argument, "t0 must not exceed t1");
    }
    return {t0, t1};
}

int status_for(Errc code)
{
    switch (code) {
    case Errc::not_found:
        return 404;
    case Errc::conflict:
        return 409;
    case Errc::unavailable:
        return 503;
    default:
        return 400;
    }
}

HttpResponse error_response(int status, std::string_view code, const std::string& message)
{
    return {status, json {{"error", {{"code", code}, {"message", message}}}}};
}

json site_summary(const SiteDescriptor& s)
{
    json departments = json::array();
    for (const auto& d : s.departments) {
        departments.push_back(d.id);
    }
    return json {{"id", s.id}, {"name", s.name},
        {"bounds", {{"w", s.bounds.w}, {"d", s.bounds.d}, {"h", s.bounds.h}}}, {"departments", departments},
        {"data_nodes", data_paths(s).size()}};
}

} // namespace

Api::Api(Platform& platform, SessionRegistry& sessions, HealthProvider health)
    : platform_(platform), sessions_(sessions), health_(std::move(health))
{
}

std::optional<std::string> Api::stream_session(std::string_view target)
{
    const auto path = target.substr(0, target.find('?'));
    constexpr std::string_view prefix = "/api/session/";
    constexpr std::string_view suffix = "/stream";
    if (path.size() <= prefix.size() + suffix.size() || !path.starts_with(prefix) || !path.ends_with(suffix)) {
        return std::nullopt;
    }
    const auto id = path.substr(prefix.size(), path.size() - prefix.size() - suffix.size());
    if (id.find('/') != std::string_view::npos) {
        return std::nullopt;
    }
    try {
        return percent_decode(id, false);
    }
    catch (const Error&) {
        return std::nullopt;
    }
}

HttpResponse Api::handle(std::string_view method, std::string_view target, std::string_view body) const
{
    const auto qpos = target.find('?');
    const auto path = target.substr(0, qpos);
    const auto qtext = qpos == std::string_view::npos ? std::string_view() : target.substr(qpos + 1);

    const bool get = method == "GET";
    const bool post = method == "POST";
    auto wrong_method = [&](std::string_view allowed) {
        return error_response(405, "method_not_allowed", "use " + std::string(allowed));
    };

    try {
        const Query q(qtext);
        auto seg = split_path(path.substr(path.empty() || path[0] != '/' ? 0 : 1));

        if (seg.size() == 1 && seg[0] == "healthz") {
            if (!get) return wrong_method("GET");
            return {200, health_()};
        }
        if (seg.size() < 2 || seg[0] != "api") {
            return error_response(404, "not_found", "no route for '" + std::string(path) + "'");
        }
        const auto& area = seg[1];
        const auto now = platform_.now();

        if (area == "sites") {
            if (!get) return wrong_method("GET");
            if (seg.size() == 2) {
                json out = json::array();
                for (const auto& s : platform_.deployment().sites()) {
                    out.push_back(site_summary(s));
                }
                return {200, out};
            }
            if (seg.size() == 4 && seg[3] == "descriptor") {
                const auto* site = platform_.deployment().find_site(seg[2]);
                if (!site) {
                    throw Error(Errc::not_found, "unknown site '" + seg[2] + "'");
                }
                return {200, to_json(*site)};
            }
        }
        else if (area == "data" && seg.size() >= 4 && (seg.back() == "latest" || seg.back() == "range")) {
            if (!get) return wrong_method("GET");
            const OntologyPath data(std::vector<std::string>(seg.begin() + 2, seg.end() - 1));
            const auto& node = platform_.deployment().data_node(data);
            if (seg.back() == "latest") {
                const auto latest = platform_.store().latest(data);
                return {200, latest ? json(*latest) : json(nullptr)};
            }
            const auto w = window_params(q, now, kDefaultRangeMs);
            json out {{"path", data.str()}, {"unit", to_string(node.unit)}, {"t0", w.t0}, {"t1", w.t1}};
            const auto bucket = q.integer("bucket");
            json points = json::array();
            if (bucket) {
                out["bucket"] = *bucket;
                for (const auto& b : platform_.store().buckets(data, w.t0, w.t1, *bucket)) {
                    points.push_back(json {{"ts", b.start}, {"value", b.mean}, {"count", b.count}});
                }
            }
            else {
                out["bucket"] = nullptr;
                for (const auto& s : platform_.store().range(SeriesQuery {data, w.t0, w.t1, std::nullopt})) {
                    points.push_back(json {{"ts", s.timestamp}, {"value", s.value}, {"quality", to_string(s.quality)}});
                }
            }
            out["points"] = std::move(points);
            return {200, out};
        }
        else if (area == "analytics" && seg.size() == 3 && seg[2] == "aggregate") {
            if (!get) return wrong_method("GET");
            const auto scope = path_param(q, "scope", true);
            const auto fn_text = q.get("fn").value_or("sum");
            const auto fn = aggregate_fn_from_string(fn_text);
            if (!fn) {
                throw Error(Errc::invalid_argument, "unknown fn '" + fn_text + "'");
            }
            const auto sem_text = q.get("semantic").value_or("momentary");
            const auto semantic = semantic_from_string(sem_text);
            if (!semantic) {
                throw Error(Errc::invalid_argument, "unknown semantic '" + sem_text + "'");
            }
            std::optional<Unit> unit = Unit::kilowatt;
            if (const auto u = q.get("unit")) {
                if (*u == "any") {
                    unit.reset();
                }
                else if (!(unit = unit_from_string(*u))) {
                    throw Error(Errc::invalid_argument, "unknown unit '" + *u + "'");
                }
            }
            const auto w = window_params(q, now, platform_.awareness().overview_window_ms);
            return {200, json(area_aggregate(platform_.store(), scope, *semantic, w.t0, w.t1, *fn, unit))};
        }
        else if (area == "analytics" && seg.size() == 3 && seg[2] == "pairs") {
            if (!get) return wrong_method("GET");
            const auto actual = path_param(q, "actual", true);
            platform_.deployment().data_node(actual);
            std::vector<PredictionSeries> models;
            if (const auto m = q.get("models"); m && !m->empty()) {
                std::string_view rest(*m);
                while (!rest.empty()) {
                    const auto comma = rest.find(',');
                    const auto p = OntologyPath::parse(rest.substr(0, comma));
                    platform_.deployment().data_node(p);
                    models.push_back(PredictionSeries {p.segments().back(), p});
                    rest = comma == std::string_view::npos ? std::string_view() : rest.substr(comma + 1);
                }
            }
            else {
                for (const auto& p : platform_.deployment().data_paths(actual.parent())) {
                    if (platform_.deployment().data_node(p).semantic == Semantic::predicted) {
                        models.push_back(PredictionSeries {p.segments().back(), p});
                    }
                }
            }
            const auto tolerance = q.integer("tolerance").value_or(kDefaultPairingToleranceMs);
            const auto w = window_params(q, now, kDefaultRangeMs);
            const auto paired = pair_predictions(platform_.store(), actual, models, w.t0, w.t1, tolerance);
            json errors = json::object();
            for (const auto& model : models) {
                const bool any = std::any_of(paired.begin(), paired.end(), [&](const PairedPoint& p) {
                    const auto it = p.predictions.find(model.model_id);
                    return it != p.predictions.end() && it->second.has_value();
                });
                errors[model.model_id] = any ? json(prediction_error(paired, model.model_id)) : json(nullptr);
            }
            json model_list = json::array();
            for (const auto& m : models) {
                model_list.push_back(json {{"id", m.model_id}, {"path", m.path.str()}});
            }
            return {200, json {{"actual", actual.str()}, {"models", model_list}, {"t0", w.t0}, {"t1", w.t1},
                             {"tolerance", tolerance}, {"points", paired}, {"errors", errors}}};
        }
        else if (area == "notifications") {
            if (seg.size() == 2) {
                if (!get) return wrong_method("GET");
                const auto scope = path_param(q, "scope", false);
                if (!scope.empty()) {
                    platform_.deployment().resolve(scope);
                }
                const auto limit = q.integer("limit").value_or(kDefaultNotificationLimit);
                if (limit < 0) {
                    throw Error(Errc::invalid_argument, "'limit' must not be negative");
                }
                return {200,
                    json(platform_.alerts().recent_notifications(
                        scope, static_cast<std::size_t>(limit), q.flag("active_only")))};
            }
            if (seg.size() == 4 && seg[3] == "ack") {
                if (!post) return wrong_method("POST");
                std::uint64_t id = 0;
                const auto& text = seg[2];
                const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), id);
                if (ec != std::errc {} || end != text.data() + text.size()) {
                    throw Error(Errc::not_found, "unknown notification '" + text + "'");
                }
                const auto n = platform_.alerts().acknowledge(id);
                spdlog::info("notification acknowledged id={} rule={}", n.id, n.rule_id);
                return {200, json(n)};
            }
        }
        else if (area == "status" && seg.size() >= 3) {
            if (!get) return wrong_method("GET");
            const OntologyPath resource(std::vector<std::string>(seg.begin() + 2, seg.end()));
            platform_.deployment().resolve(resource);
            return {200, json {{"path", resource.str()}, {"status", to_string(platform_.alerts().meter_status(resource))}}};
        }
        else if (area == "session" && seg.size() == 4) {
            if (seg[3] == "stream") {
                if (!sessions_.contains(seg[2])) {
                    throw Error(Errc::not_found, "unknown session '" + seg[2] + "'");
                }
                return error_response(426, "upgrade_required", "the stream endpoint requires a WebSocket upgrade");
            }
            if (seg[3] == "pose") {
                if (!post) return wrong_method("POST");
                json doc;
                try {
                    doc = json::parse(body.begin(), body.end());
                }
                catch (const json::parse_error& e) {
                    throw SyntaxError(e.byte, std::string("JSON syntax error: ") + e.what());
                }
                if (!doc.is_object()) {
                    throw SchemaError("", "pose body must be an object");
                }
                std::string site;
                if (doc.contains("site")) {
                    if (!doc["site"].is_string()) {
                        throw SchemaError("site", "expected string");
                    }
                    site = doc["site"].get<std::string>();
                }
                const auto update = sessions_.update_pose(seg[2], site, pose_from_json(doc));
                return {200, json {{"session", seg[2]}, {"seq", update.seq}, {"packet", update.packet}}};
            }
        }
        return error_response(404, "not_found", "no route for '" + std::string(path) + "'");
    }
    catch (const Error& e) {
        return error_response(status_for(e.code()), to_string(e.code()), e.what());
    }
    catch (const std::exception& e) {
        spdlog::error("request failed method={} target={} error=\"{}\"", method, target, e.what());
        return error_response(500, "internal", e.what());
    }
}

} // namespace floorsight
