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

#include "floorsight/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace floorsight {

using nlohmann::json;

std::string_view to_string(AggregateFn fn) noexcept { return fn == AggregateFn::sum ? "sum" : "mean"; }

std::optional<AggregateFn> aggregate_fn_from_string(std::string_view text) noexcept
{
    if (text == "sum") {
        return AggregateFn::sum;
    }
    if (text == "mean") {
        return AggregateFn::mean;
    }
    return std::nullopt;
}

AggregateResult area_aggregate(const TelemetryStore& store, const OntologyPath& scope, Semantic semantic, EpochMs t0,
    EpochMs t1, AggregateFn fn, std::optional<Unit> unit)
{
    const auto& deployment = store.deployment();
    deployment.resolve(scope);
    if (t0 > t1) {
        throw Error(Errc::invalid_argument, "window start is after its end");
    }

    AggregateResult result;
    result.scope = scope;
    result.semantic = semantic;
    result.unit = unit;
    result.fn = fn;
    result.t0 = t0;
    result.t1 = t1;

    std::set<Unit> units;
    std::vector<OntologyPath> matching;
    for (const auto& path : deployment.data_paths(scope)) {
        const auto& node = deployment.data_node(path);
        if (node.semantic != semantic || (unit && node.unit != *unit)) {
            continue;
        }
        units.insert(node.unit);
        matching.push_back(path);
    }
    if (!unit && units.size() > 1) {
        throw Error(Errc::invalid_argument, "data under '" + scope.str() + "' mixes units; pass a unit filter");
    }
    if (!unit && units.size() == 1) {
        result.unit = *units.begin();
    }

    double sum = 0.0;
    for (const auto& path : matching) {
        if (auto s = store.latest_in(path, t0, t1)) {
            sum += s->value;
            result.contributors.push_back(path);
        }
        else {
            result.excluded.push_back(path);
        }
    }
    if (!result.contributors.empty()) {
        result.value = fn == AggregateFn::sum ? sum : sum / static_cast<double>(result.contributors.size());
    }
    return result;
}

namespace {

std::optional<PredictionMatch> nearest(const std::vector<TelemetrySample>& series, EpochMs at, EpochMs tolerance)
{
    // series is ascending by timestamp
    auto after = std::upper_bound(series.begin(), series.end(), at,
        [](EpochMs t, const TelemetrySample& s) { return t < s.timestamp; });
    const TelemetrySample* best = nullptr;
    if (after != series.begin()) {
        best = &*std::prev(after);
    }
    if (after != series.end()) {
        if (!best || (after->timestamp - at) < (at - best->timestamp)) {
            best = &*after;
        }
    }
    if (!best) {
        return std::nullopt;
    }
    const EpochMs gap = best->timestamp > at ? best->timestamp - at : at - best->timestamp;
    if (gap > tolerance) {
        return std::nullopt;
    }
    return PredictionMatch {best->value, best->timestamp};
}

} // namespace

std::vector<PairedPoint> pair_predictions(const TelemetryStore& store, const OntologyPath& actual,
    const std::vector<PredictionSeries>& models, EpochMs t0, EpochMs t1, EpochMs tolerance_ms)
{
    const auto& deployment = store.deployment();
    deployment.data_node(actual);
    if (tolerance_ms <= 0) {
        throw Error(Errc::invalid_argument, "pairing tolerance must be positive");
    }
    if (t0 > t1) {
        throw Error(Errc::invalid_argument, "window start is after its end");
    }
    std::set<std::string> ids;
    for (const auto& m : models) {
        deployment.data_node(m.path);
        if (!ids.insert(m.model_id).second) {
            throw Error(Errc::invalid_argument, "duplicate model id '" + m.model_id + "'");
        }
    }

    std::vector<std::vector<TelemetrySample>> model_series;
    for (const auto& m : models) {
        model_series.push_back(store.range(SeriesQuery {m.path, t0 - tolerance_ms, t1 + tolerance_ms, std::nullopt}));
    }

    std::vector<PairedPoint> out;
    for (const auto& a : store.range(SeriesQuery {actual, t0, t1, std::nullopt})) {
        PairedPoint p;
        p.timestamp = a.timestamp;
        p.actual = a.value;
        for (std::size_t i = 0; i < models.size(); ++i) {
            p.predictions[models[i].model_id] = nearest(model_series[i], a.timestamp, tolerance_ms);
        }
        out.push_back(std::move(p));
    }
    return out;
}

PredictionError prediction_error(const std::vector<PairedPoint>& paired, const std::string& model_id)
{
    double abs_sum = 0.0;
    double pct_sum = 0.0;
    std::size_t n = 0;
    std::size_t n_pct = 0;
    for (const auto& p : paired) {
        auto it = p.predictions.find(model_id);
        if (it == p.predictions.end() || !it->second) {
            continue;
        }
        const double err = std::abs(p.actual - it->second->value);
        abs_sum += err;
        ++n;
        if (p.actual != 0.0) {
            pct_sum += err / std::abs(p.actual);
            ++n_pct;
        }
    }
    if (n == 0) {
        throw Error(Errc::invalid_argument, "no usable paired points for model '" + model_id + "'");
    }
    PredictionError e;
    e.n = n;
    e.mae = abs_sum / static_cast<double>(n);
    if (n_pct > 0) {
        e.mape = 100.0 * pct_sum / static_cast<double>(n_pct);
    }
    return e;
}

namespace {

json paths_json(const std::vector<OntologyPath>& paths)
{
    json out = json::array();
    for (const auto& p : paths) {
        out.push_back(p.str());
    }
    return out;
}

} // namespace

void to_json(json& j, const AggregateResult& r)
{
    j = json {{"scope", r.scope.str()}, {"semantic", to_string(r.semantic)}, {"fn", to_string(r.fn)},
        {"window", {{"t0", r.t0}, {"t1", r.t1}}}, {"contributors", paths_json(r.contributors)},
        {"excluded", paths_json(r.excluded)}};
    j["unit"] = r.unit ? json(to_string(*r.unit)) : json(nullptr);
    j["value"] = r.value ? json(*r.value) : json(nullptr);
}

void to_json(json& j, const PairedPoint& p)
{
    json preds = json::object();
    for (const auto& [model, match] : p.predictions) {
        preds[model] = match ? json {{"value", match->value}, {"ts", match->source_timestamp}} : json(nullptr);
    }
    j = json {{"ts", p.timestamp}, {"actual", p.actual}, {"predictions", std::move(preds)}};
}

void to_json(json& j, const PredictionError& e)
{
    j = json {{"mae", e.mae}, {"n", e.n}};
    j["mape"] = e.mape ? json(*e.mape) : json(nullptr);
}

} // namespace floorsight
