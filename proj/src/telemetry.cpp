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

#include "floorsight/telemetry.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

namespace floorsight {

using nlohmann::json;

std::string_view to_string(Quality quality) noexcept { return quality == Quality::good ? "good" : "suspect"; }

std::string topic_for(const Deployment& deployment, const OntologyPath& path)
{
    deployment.data_node(path);
    std::string topic(kTopicRoot);
    for (const auto& s : path.segments()) {
        topic += '/';
        topic += s;
    }
    return topic;
}

OntologyPath parse_topic(std::string_view topic)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto slash = topic.find('/', start);
        parts.emplace_back(topic.substr(start, slash == std::string_view::npos ? std::string_view::npos : slash - start));
        if (slash == std::string_view::npos) {
            break;
        }
        start = slash + 1;
    }
    if (parts.size() != kFullDepth + 1 || parts.front() != kTopicRoot) {
        throw Error(Errc::invalid_argument, "malformed topic '" + std::string(topic) + "': expected " +
                                                std::string(kTopicRoot) +
                                                "/<site>/<department>/<asset>/<resource>/<data>");
    }
    for (std::size_t i = 1; i < parts.size(); ++i) {
        if (!is_valid_id(parts[i])) {
            throw Error(Errc::invalid_argument, "malformed topic '" + std::string(topic) + "': bad segment '" + parts[i] + "'");
        }
    }
    return OntologyPath(std::vector<std::string>(parts.begin() + 1, parts.end()));
}

std::string site_topic_filter(std::string_view site_id)
{
    return std::string(kTopicRoot) + "/" + std::string(site_id) + "/#";
}

TelemetrySample parse_sample(const Deployment& deployment, std::string_view topic, std::string_view payload)
{
    TelemetrySample sample;
    sample.path = parse_topic(topic);
    const auto& node = deployment.data_node(sample.path);

    json doc;
    try {
        doc = json::parse(payload.begin(), payload.end());
    }
    catch (const json::parse_error& e) {
        throw Error(Errc::invalid_argument, "malformed payload on '" + std::string(topic) + "': " + e.what());
    }
    auto bad = [&](const std::string& why) {
        return Error(Errc::invalid_argument, "malformed payload on '" + std::string(topic) + "': " + why);
    };
    if (!doc.is_object()) {
        throw bad("expected object");
    }
    if (!doc.contains("ts") || !doc["ts"].is_number_integer()) {
        throw bad("'ts' must be an integer epoch-milliseconds timestamp");
    }
    sample.timestamp = doc["ts"].get<EpochMs>();
    if (sample.timestamp < 0) {
        throw bad("'ts' must not be negative");
    }
    if (!doc.contains("value") || !doc["value"].is_number()) {
        throw bad("'value' must be a number");
    }
    sample.value = doc["value"].get<double>();
    if (!doc.contains("unit") || !doc["unit"].is_string()) {
        throw bad("'unit' must be a string");
    }
    const auto unit_text = doc["unit"].get<std::string>();
    const auto unit = unit_from_string(unit_text);
    if (!unit) {
        throw bad("unknown unit '" + unit_text + "'");
    }
    if (*unit != node.unit) {
        throw Error(Errc::invalid_argument, "unit mismatch on '" + sample.path.str() + "': payload has '" + unit_text +
                                                "', node declares '" + std::string(to_string(node.unit)) + "'");
    }
    sample.unit = *unit;
    if (doc.contains("quality")) {
        const auto& q = doc["quality"];
        if (q == "good") {
            sample.quality = Quality::good;
        }
        else if (q == "suspect") {
            sample.quality = Quality::suspect;
        }
        else {
            throw bad("'quality' must be \"good\" or \"suspect\"");
        }
    }
    return sample;
}

std::string encode_payload(const TelemetrySample& sample)
{
    json doc {{"ts", sample.timestamp}, {"value", sample.value}, {"unit", to_string(sample.unit)}};
    if (sample.quality != Quality::good) {
        doc["quality"] = to_string(sample.quality);
    }
    return doc.dump();
}

void to_json(json& j, const TelemetrySample& sample)
{
    j = json {{"path", sample.path.str()}, {"ts", sample.timestamp}, {"value", sample.value},
        {"unit", to_string(sample.unit)}, {"quality", to_string(sample.quality)}};
}

/***********************************************************************************************************************
 * TelemetryStore
 **********************************************************************************************************************/

TelemetryStore::TelemetryStore(std::shared_ptr<const Deployment> deployment, std::size_t capacity)
    : deployment_(std::move(deployment)), capacity_(capacity)
{
    if (capacity_ == 0) {
        throw Error(Errc::invalid_argument, "retention capacity must be positive");
    }
    for (const auto& site : deployment_->sites()) {
        for_each_data(site, [&](const OntologyPath& p, const NodeRef& ref) {
            auto s = std::make_unique<Series>();
            s->unit = ref.data->unit;
            series_.emplace(p.str(), std::move(s));
        });
    }
}

TelemetryStore::Series& TelemetryStore::series(const OntologyPath& path) const
{
    auto it = series_.find(path.str());
    if (it == series_.end()) {
        throw Error(Errc::not_found, "unknown data path '" + path.str() + "'");
    }
    return *it->second;
}

void TelemetryStore::check_window(EpochMs t0, EpochMs t1)
{
    if (t0 > t1) {
        throw Error(Errc::invalid_argument, "window start is after its end");
    }
}

AppendOutcome TelemetryStore::append(const TelemetrySample& sample)
{
    auto& s = series(sample.path);
    if (sample.unit != s.unit) {
        throw Error(Errc::invalid_argument, "unit mismatch on '" + sample.path.str() + "'");
    }
    if (sample.timestamp < 0) {
        throw Error(Errc::invalid_argument, "timestamp must not be negative");
    }
    const Point point {sample.timestamp, sample.value, sample.quality};

    std::unique_lock lock(s.mutex);
    auto& pts = s.points;
    if (pts.empty() || pts.back().ts < point.ts) {
        pts.push_back(point);
    }
    else {
        auto pos = std::lower_bound(pts.begin(), pts.end(), point.ts, [](const Point& p, EpochMs t) { return p.ts < t; });
        if (pos != pts.end() && pos->ts == point.ts) {
            *pos = point;
            return AppendOutcome::replaced;
        }
        if (pos == pts.begin() && pts.size() >= capacity_) {
            return AppendOutcome::dropped;
        }
        pts.insert(pos, point);
    }
    if (pts.size() > capacity_) {
        pts.pop_front();
    }
    return AppendOutcome::inserted;
}

std::optional<TelemetrySample> TelemetryStore::latest(const OntologyPath& path) const
{
    const auto& s = series(path);
    std::shared_lock lock(s.mutex);
    if (s.points.empty()) {
        return std::nullopt;
    }
    const auto& p = s.points.back();
    return TelemetrySample {path, p.ts, p.value, s.unit, p.quality};
}

std::optional<TelemetrySample> TelemetryStore::latest_in(const OntologyPath& path, EpochMs t0, EpochMs t1) const
{
    check_window(t0, t1);
    const auto& s = series(path);
    std::shared_lock lock(s.mutex);
    auto end = std::upper_bound(s.points.begin(), s.points.end(), t1, [](EpochMs t, const Point& p) { return t < p.ts; });
    if (end == s.points.begin()) {
        return std::nullopt;
    }
    const auto& p = *std::prev(end);
    if (p.ts < t0) {
        return std::nullopt;
    }
    return TelemetrySample {path, p.ts, p.value, s.unit, p.quality};
}

std::vector<TelemetrySample> TelemetryStore::range(const SeriesQuery& query) const
{
    check_window(query.t0, query.t1);
    if (query.bucket_ms) {
        const auto& s = series(query.path);
        std::vector<TelemetrySample> out;
        for (const auto& b : buckets(query.path, query.t0, query.t1, *query.bucket_ms)) {
            out.push_back(TelemetrySample {query.path, b.start, b.mean, s.unit, Quality::good});
        }
        return out;
    }
    const auto& s = series(query.path);
    std::shared_lock lock(s.mutex);
    auto first = std::lower_bound(s.points.begin(), s.points.end(), query.t0,
        [](const Point& p, EpochMs t) { return p.ts < t; });
    std::vector<TelemetrySample> out;
    for (auto it = first; it != s.points.end() && it->ts <= query.t1; ++it) {
        out.push_back(TelemetrySample {query.path, it->ts, it->value, s.unit, it->quality});
    }
    return out;
}

std::vector<Bucket> TelemetryStore::buckets(const OntologyPath& path, EpochMs t0, EpochMs t1, EpochMs bucket_ms) const
{
    check_window(t0, t1);
    if (bucket_ms <= 0) {
        throw Error(Errc::invalid_argument, "bucket width must be positive");
    }
    const auto& s = series(path);
    std::shared_lock lock(s.mutex);
    auto first = std::lower_bound(s.points.begin(), s.points.end(), t0, [](const Point& p, EpochMs t) { return p.ts < t; });
    std::vector<Bucket> out;
    double sum = 0.0;
    for (auto it = first; it != s.points.end() && it->ts <= t1; ++it) {
        const EpochMs start = t0 + ((it->ts - t0) / bucket_ms) * bucket_ms;
        if (out.empty() || out.back().start != start) {
            if (!out.empty()) {
                out.back().mean = sum / static_cast<double>(out.back().count);
            }
            out.push_back(Bucket {start, 0.0, 0});
            sum = 0.0;
        }
        sum += it->value;
        ++out.back().count;
    }
    if (!out.empty()) {
        out.back().mean = sum / static_cast<double>(out.back().count);
    }
    return out;
}

std::size_t TelemetryStore::size(const OntologyPath& path) const
{
    const auto& s = series(path);
    std::shared_lock lock(s.mutex);
    return s.points.size();
}

} // namespace floorsight
