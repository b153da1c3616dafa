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
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "floorsight/ontology.hpp"
#include "floorsight/telemetry.hpp"

namespace floorsight::sim {

/// Gaussian steps around `mean`, pulled back by `reversion` per tick and
/// clamped to [lo, hi]. Starts at `mean`.
struct RandomWalk {
    double mean = 0.0;
    double sigma = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    double reversion = 0.05;
};

struct Periodic {
    double base = 0.0;
    double amplitude = 0.0;
    EpochMs period_ms = 60'000;
};

struct Constant {
    double value = 0.0;
};

/// Prediction stream derived from another node's generator output (not its
/// published, possibly overridden, value).
struct Distortion {
    enum class Kind { bias, noise, lag };
    std::string source; // data id of the actual series in the same resource
    Kind kind = Kind::bias;
    double parameter = 0.0; // bias: factor; noise: sigma; lag: ticks
};

using SignalSpec = std::variant<RandomWalk, Periodic, Constant, Distortion>;

/// Throws Error(invalid_argument) when clamp bounds are unordered, sigma is
/// negative or the period is not positive.
void validate_signal(const SignalSpec& spec);

struct AnomalyEvent {
    EpochMs at_ms = 0; // offset from the scenario start
    OntologyPath target;
    std::optional<double> value;  // forced absolute value
    std::optional<double> offset; // added to the generator output
    std::optional<int> release_ticks;
};

struct ScenarioConfig {
    std::uint64_t seed = 1;
    double duration_s = 60.0;
    EpochMs tick_ms = 1000;
    EpochMs start_ms = 0; // 0: filled in by the caller (wall clock for live runs)
    int release_ticks = 10;
    std::vector<AnomalyEvent> events;
    std::map<std::string, SignalSpec> signals; // per-path overrides of the defaults

    std::size_t tick_count() const;
};

/// Throws Error(invalid_argument) for a non-positive tick, an event outside the
/// duration, or an event that sets both or neither of value/offset.
void validate_scenario(const ScenarioConfig& config);

/// Reads a JSON scenario file. Throws SyntaxError/SchemaError/Error.
ScenarioConfig parse_scenario(std::string_view text);
ScenarioConfig load_scenario(const std::filesystem::path& file);

inline constexpr std::size_t kCompartmentsPerTunnel = 4;
inline constexpr std::size_t kMixingMachines = 2;
inline const std::vector<std::string> kPredictionModels {"model-a", "model-b", "model-c"};

/// The demo pilot site: 90 x 40 x 12 m with an environmental sensor, four
/// liquid tanks, three cooling tunnels (each with four compartments and three
/// prediction streams), mixing machines and a four-meter power panel.
SiteDescriptor build_demo_site();

/// Default generators for every Data node of the demo site.
std::map<std::string, SignalSpec> demo_signals(const SiteDescriptor& site);

/**
 * Deterministic tick-driven telemetry generator.
 *
 * Each Data node draws from its own random stream seeded from the scenario
 * seed and the node path, so the published stream is a pure function of the
 * scenario and the signal specs.
 */
class Simulator {
public:
    /// Uses demo_signals() for nodes without an explicit spec. Throws
    /// Error(invalid_argument) when a node has no spec or a spec is invalid,
    /// and Error(not_found) for scenario events targeting unknown paths.
    Simulator(SiteDescriptor site, ScenarioConfig config);

    const SiteDescriptor& site() const noexcept { return site_; }
    const ScenarioConfig& config() const noexcept { return config_; }

    EpochMs next_time() const noexcept;
    std::size_t ticks_done() const noexcept { return tick_; }
    bool done() const noexcept { return tick_ >= config_.tick_count(); }

    /// One sample per Data node. Throws Error(invalid_argument) unless `t`
    /// equals next_time() and the scenario has ticks left.
    std::vector<TelemetrySample> step(EpochMs t);
    std::vector<TelemetrySample> step() { return step(next_time()); }

    /// Overrides the target from the event's tick (the first tick at or after
    /// `at_ms`, or the next tick if that is already past) for the release
    /// period. Throws Error(not_found) for unknown targets.
    void inject_anomaly(const AnomalyEvent& event);

private:
    struct Node {
        OntologyPath path;
        Unit unit;
        SignalSpec spec;
        std::mt19937_64 rng;
        double state = 0.0;
        std::vector<double> history; // generator outputs, newest last (lag sources)
        double generated = 0.0;
    };

    struct Override {
        std::size_t from_tick;
        std::size_t until_tick; // exclusive
        std::optional<double> value;
        std::optional<double> offset;
    };

    double generate(Node& node, EpochMs t);

    SiteDescriptor site_;
    ScenarioConfig config_;
    std::vector<Node> nodes_;
    std::map<std::string, std::size_t> index_;
    std::multimap<std::string, Override> overrides_;
    std::size_t tick_ = 0;
};

} // namespace floorsight::sim
