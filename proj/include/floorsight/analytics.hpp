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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "floorsight/telemetry.hpp"

// Historical and derived views over the telemetry store: area aggregates,
// actual-versus-prediction pairing and prediction error summaries. All
// functions are pure reads of the store.

namespace floorsight {

enum class AggregateFn { sum, mean };

std::string_view to_string(AggregateFn fn) noexcept;
std::optional<AggregateFn> aggregate_fn_from_string(std::string_view text) noexcept;

struct AggregateResult {
    OntologyPath scope;
    Semantic semantic = Semantic::momentary;
    std::optional<Unit> unit;
    AggregateFn fn = AggregateFn::sum;
    EpochMs t0 = 0;
    EpochMs t1 = 0;
    std::optional<double> value;            // empty when nothing contributed
    std::vector<OntologyPath> contributors; // had a sample in the window
    std::vector<OntologyPath> excluded;     // matched but had no sample in the window
};

/// Aggregates the latest in-window sample of every Data node under `scope`
/// with the given semantic (and unit, when set). Throws Error(not_found) if
/// the scope does not resolve and Error(invalid_argument) if the matching
/// nodes mix units and no unit filter was given.
AggregateResult area_aggregate(const TelemetryStore& store, const OntologyPath& scope, Semantic semantic, EpochMs t0,
    EpochMs t1, AggregateFn fn, std::optional<Unit> unit = std::nullopt);

struct PredictionSeries {
    std::string model_id;
    OntologyPath path;
};

struct PredictionMatch {
    double value = 0.0;
    EpochMs source_timestamp = 0;

    friend bool operator==(const PredictionMatch&, const PredictionMatch&) = default;
};

struct PairedPoint {
    EpochMs timestamp = 0;
    double actual = 0.0;
    std::map<std::string, std::optional<PredictionMatch>> predictions; // empty optional: no sample within tolerance

    friend bool operator==(const PairedPoint&, const PairedPoint&) = default;
};

inline constexpr EpochMs kDefaultPairingToleranceMs = 1000;

/// For each actual sample in [t0, t1], attaches the nearest-timestamp sample
/// of every prediction series within +/- tolerance; equidistant candidates
/// resolve to the earlier one.
std::vector<PairedPoint> pair_predictions(const TelemetryStore& store, const OntologyPath& actual,
    const std::vector<PredictionSeries>& models, EpochMs t0, EpochMs t1,
    EpochMs tolerance_ms = kDefaultPairingToleranceMs);

struct PredictionError {
    double mae = 0.0;
    std::optional<double> mape; // percent, over points with a non-zero actual
    std::size_t n = 0;
};

/// Throws Error(invalid_argument) when no paired point carries the model.
PredictionError prediction_error(const std::vector<PairedPoint>& paired, const std::string& model_id);

void to_json(nlohmann::json& j, const AggregateResult& r);
void to_json(nlohmann::json& j, const PairedPoint& p);
void to_json(nlohmann::json& j, const PredictionError& e);

} // namespace floorsight
