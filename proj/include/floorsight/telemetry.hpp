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

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "floorsight/ontology.hpp"

namespace floorsight {

using EpochMs = std::int64_t;

enum class Quality { good, suspect };

std::string_view to_string(Quality quality) noexcept;

struct TelemetrySample {
    OntologyPath path;
    EpochMs timestamp = 0;
    double value = 0.0;
    Unit unit = Unit::unitless;
    Quality quality = Quality::good;

    friend bool operator==(const TelemetrySample&, const TelemetrySample&) = default;
};

// Topics: enerman/<site>/<department>/<asset>/<resource>/<data>

inline constexpr std::string_view kTopicRoot = "enerman";

/// Throws Error(invalid_argument) for paths that are not full depth and
/// Error(not_found) when the path does not resolve.
std::string topic_for(const Deployment& deployment, const OntologyPath& path);

/// Purely syntactic inverse of topic_for; throws Error(invalid_argument).
OntologyPath parse_topic(std::string_view topic);

/// MQTT filter covering every topic of one site.
std::string site_topic_filter(std::string_view site_id);

/// Builds a sample from a topic and a JSON payload with keys `ts`, `value`,
/// `unit` and optional `quality`. Throws Error(invalid_argument) for a
/// malformed topic or payload or a unit that differs from the Data node's,
/// and Error(not_found) for an unknown path.
TelemetrySample parse_sample(const Deployment& deployment, std::string_view topic, std::string_view payload);

std::string encode_payload(const TelemetrySample& sample);

/// {path, ts, value, unit, quality}.
void to_json(nlohmann::json& j, const TelemetrySample& sample);

struct SeriesQuery {
    OntologyPath path;
    EpochMs t0 = 0;
    EpochMs t1 = 0;
    std::optional<EpochMs> bucket_ms;
};

/// Downsampled point; `start` is t0 + k * bucket.
struct Bucket {
    EpochMs start = 0;
    double mean = 0.0;
    std::size_t count = 0;

    friend bool operator==(const Bucket&, const Bucket&) = default;
};

enum class AppendOutcome { inserted, replaced, dropped };

/**
 * Latest values plus bounded per-path history for every Data node of a
 * deployment.
 *
 * Each path keeps the `capacity` greatest-timestamp samples in timestamp
 * order. A sample older than everything retained in a full series is dropped;
 * a sample whose timestamp is already present replaces it. The set of paths is
 * fixed at construction, so lookups need no global lock; each series has its
 * own reader/writer lock.
 */
class TelemetryStore {
public:
    static constexpr std::size_t kDefaultCapacity = 10'000;

    explicit TelemetryStore(std::shared_ptr<const Deployment> deployment, std::size_t capacity = kDefaultCapacity);

    TelemetryStore(const TelemetryStore&) = delete;
    TelemetryStore& operator=(const TelemetryStore&) = delete;

    /// Throws Error(not_found) for unknown paths and Error(invalid_argument)
    /// for a unit mismatch or a negative timestamp.
    AppendOutcome append(const TelemetrySample& sample);

    std::optional<TelemetrySample> latest(const OntologyPath& path) const;

    /// Greatest-timestamp sample with t0 <= ts <= t1.
    std::optional<TelemetrySample> latest_in(const OntologyPath& path, EpochMs t0, EpochMs t1) const;

    /// Raw samples in [t0, t1] ascending, or one mean per bucket when the
    /// query sets a bucket width. Throws Error(invalid_argument) when t0 > t1
    /// or the bucket is not positive.
    std::vector<TelemetrySample> range(const SeriesQuery& query) const;

    std::vector<Bucket> buckets(const OntologyPath& path, EpochMs t0, EpochMs t1, EpochMs bucket_ms) const;

    std::size_t size(const OntologyPath& path) const;
    std::size_t capacity() const noexcept { return capacity_; }

    const Deployment& deployment() const noexcept { return *deployment_; }

private:
    struct Point {
        EpochMs ts;
        double value;
        Quality quality;
    };

    struct Series {
        Unit unit;
        mutable std::shared_mutex mutex;
        std::deque<Point> points;
    };

    Series& series(const OntologyPath& path) const;
    static void check_window(EpochMs t0, EpochMs t1);

    std::shared_ptr<const Deployment> deployment_;
    std::size_t capacity_;
    std::unordered_map<std::string, std::unique_ptr<Series>> series_;
};

} // namespace floorsight
