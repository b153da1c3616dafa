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
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "floorsight/alerts.hpp"
#include "floorsight/analytics.hpp"
#include "floorsight/geometry.hpp"
#include "floorsight/ontology.hpp"
#include "floorsight/telemetry.hpp"

/**
 * Observer-driven situational awareness.
 *
 * Every asset is classified into a tier relative to the observer pose:
 *
 *  - detail:    within r_detail and inside the field of view
 *  - proximity: within r_prox_enter, or within r_prox_exit when the asset was
 *               already at proximity or detail (hysteresis on this boundary only)
 *  - area:      everything else
 *
 * compose_view_packet() turns the tiers plus the current store and alert log
 * into a ViewPacket: an always-present overview of the observer's department,
 * one panel per nearby asset, per-compartment readouts for assets in detail
 * range, and the newest active site notifications.
 */
namespace floorsight {

enum class Tier { none, area, proximity, detail };

std::string_view to_string(Tier tier) noexcept;
std::optional<Tier> tier_from_string(std::string_view text) noexcept;

inline constexpr double kDefaultFovHalfAngle = std::numbers::pi / 4.0;

/// Points closer than this (floor plane) to the observer count as in view.
inline constexpr double kCoincidenceEpsilon = 0.01;

struct ObserverPose {
    Vec3 position;
    double yaw = 0.0; // floor-plane heading, 0 = +x, counter-clockwise
    double fov_half_angle = kDefaultFovHalfAngle;

    friend bool operator==(const ObserverPose&, const ObserverPose&) = default;
};

/// Throws Error(invalid_argument) if the pose lies outside the site or the
/// half angle is not in (0, pi].
void validate_pose(const ObserverPose& pose, const SiteDescriptor& site);

struct TierRadii {
    double r_detail = 3.0;
    double r_prox_enter = 8.0;
    double r_prox_exit = 10.0;
    std::optional<double> fov_half_angle; // overrides the pose's when set

    /// Applies an asset's `awareness` overrides on top of these radii.
    TierRadii with(const AwarenessOverride& o) const;
};

struct AwarenessParams {
    TierRadii radii;
    std::size_t panel_cap = 5;
    std::size_t detail_cap = 8;
    std::size_t asset_notification_limit = 2;
    std::size_t site_notification_limit = 5;
    EpochMs overview_window_ms = 5 * 60 * 1000;
};

bool in_field_of_view(const ObserverPose& pose, const Vec3& point);

struct TierAssignment {
    OntologyPath target;
    Tier tier = Tier::none;
    double distance = 0.0;
    bool in_fov = false;

    friend bool operator==(const TierAssignment&, const TierAssignment&) = default;
};

/// Classifies one target; `target` in the result is left empty.
TierAssignment classify_tier(const ObserverPose& pose, const Vec3& target, Tier previous, const TierRadii& radii = {});

/// Previous tier per asset path, carried between packets of one session.
using TierMemory = std::map<std::string, Tier>;

struct Reading {
    OntologyPath path;
    std::string name;
    Unit unit = Unit::unitless;
    Semantic semantic = Semantic::momentary;
    EpochMs timestamp = 0;
    double value = 0.0;
    Quality quality = Quality::good;
};

struct AreaOverview {
    OntologyPath department;
    std::string name;
    bool observer_inside = false;
    AggregateResult power; // sum of momentary kW over the department
    std::vector<Reading> environment;
};

struct MeterReading {
    OntologyPath resource;
    std::string name;
    MeterStatus status = MeterStatus::ok;
    std::optional<double> power_kw;
};

struct AssetPanel {
    OntologyPath asset;
    std::string name;
    AssetKind kind = AssetKind::generic;
    Tier tier = Tier::proximity;
    double distance = 0.0;
    bool in_fov = false;
    std::string status;            // "normal" or "attention"
    std::optional<double> power_kw; // latest momentary kW summed over the asset
    std::vector<Reading> readings; // non-compartment data; empty for power panels
    std::vector<Notification> notifications;
    std::vector<MeterReading> meters; // power panels at detail tier only
};

struct DetailPanel {
    OntologyPath resource;
    std::string name;
    Vec3 position;
    double distance = 0.0;
    MeterStatus status = MeterStatus::ok;
    std::vector<Reading> readings;
};

struct ViewPacket {
    std::string site;
    ObserverPose pose;
    EpochMs generated_at = 0;
    AreaOverview overview;
    std::vector<AssetPanel> asset_panels;
    std::vector<DetailPanel> detail_panels;
    std::vector<Notification> notifications;
    std::vector<TierAssignment> tiers; // every asset, document order
};

/// Deterministic given identical inputs. `previous` supplies hysteresis
/// state; the returned packet's `tiers` is the state for the next call.
ViewPacket compose_view_packet(const ObserverPose& pose, const SiteDescriptor& site, const TelemetryStore& store,
    const AlertEngine& alerts, const TierMemory& previous, EpochMs now, const AwarenessParams& params = {});

TierMemory tier_memory(const ViewPacket& packet);

void to_json(nlohmann::json& j, const ObserverPose& pose);
void to_json(nlohmann::json& j, const TierAssignment& t);
void to_json(nlohmann::json& j, const Reading& r);
void to_json(nlohmann::json& j, const ViewPacket& packet);

/// Reads {"position": {x, y, z}, "yaw": r, "fov_half_angle": r?}.
/// Throws SchemaError.
ObserverPose pose_from_json(const nlohmann::json& j);

} // namespace floorsight
