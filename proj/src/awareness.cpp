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

#include "floorsight/awareness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace floorsight {

using nlohmann::json;

std::string_view to_string(Tier tier) noexcept
{
    switch (tier) {
    case Tier::none: return "none";
    case Tier::area: return "area";
    case Tier::proximity: return "proximity";
    case Tier::detail: return "detail";
    }
    return "?";
}

std::optional<Tier> tier_from_string(std::string_view text) noexcept
{
    for (Tier t : {Tier::none, Tier::area, Tier::proximity, Tier::detail}) {
        if (to_string(t) == text) {
            return t;
        }
    }
    return std::nullopt;
}

void validate_pose(const ObserverPose& pose, const SiteDescriptor& site)
{
    if (!site.bounds.contains(pose.position)) {
        throw Error(Errc::invalid_argument, "observer position is outside the bounds of site '" + site.id + "'");
    }
    if (!std::isfinite(pose.yaw)) {
        throw Error(Errc::invalid_argument, "observer yaw must be finite");
    }
    if (!(pose.fov_half_angle > 0.0 && pose.fov_half_angle <= std::numbers::pi)) {
        throw Error(Errc::invalid_argument, "fov_half_angle must lie in (0, pi]");
    }
}

TierRadii TierRadii::with(const AwarenessOverride& o) const
{
    TierRadii r = *this;
    if (o.r_detail) r.r_detail = *o.r_detail;
    if (o.r_prox_enter) r.r_prox_enter = *o.r_prox_enter;
    if (o.r_prox_exit) r.r_prox_exit = *o.r_prox_exit;
    if (o.fov_half_angle) r.fov_half_angle = *o.fov_half_angle;
    return r;
}

namespace {

bool within_view_cone(const Vec3& observer, double yaw, double half_angle, const Vec3& point)
{
    const double dx = point.x - observer.x;
    const double dy = point.y - observer.y;
    if (std::hypot(dx, dy) <= kCoincidenceEpsilon) {
        return true;
    }
    const double hx = std::cos(yaw);
    const double hy = std::sin(yaw);
    const double dot = hx * dx + hy * dy;
    const double cross = hx * dy - hy * dx;
    return std::atan2(std::abs(cross), dot) <= half_angle;
}

} // namespace

bool in_field_of_view(const ObserverPose& pose, const Vec3& point)
{
    return within_view_cone(pose.position, pose.yaw, pose.fov_half_angle, point);
}

TierAssignment classify_tier(const ObserverPose& pose, const Vec3& target, Tier previous, const TierRadii& radii)
{
    TierAssignment out;
    out.distance = distance(pose.position, target);
    out.in_fov = within_view_cone(pose.position, pose.yaw, radii.fov_half_angle.value_or(pose.fov_half_angle), target);

    const bool was_near = previous == Tier::proximity || previous == Tier::detail;
    if (out.distance <= radii.r_detail && out.in_fov) {
        out.tier = Tier::detail;
    }
    else if (out.distance <= radii.r_prox_enter || (was_near && out.distance <= radii.r_prox_exit)) {
        out.tier = Tier::proximity;
    }
    else {
        out.tier = Tier::area;
    }
    return out;
}

TierMemory tier_memory(const ViewPacket& packet)
{
    TierMemory memory;
    for (const auto& t : packet.tiers) {
        memory[t.target.str()] = t.tier;
    }
    return memory;
}

/***********************************************************************************************************************
 * Packet composition
 **********************************************************************************************************************/

namespace {

struct Candidate {
    const Department* department;
    const Asset* asset;
    OntologyPath path;
    TierAssignment tier;
    TierRadii radii;
};

bool nearer(const OntologyPath& a_path, double a_dist, const OntologyPath& b_path, double b_dist)
{
    if (a_dist != b_dist) {
        return a_dist < b_dist;
    }
    const auto& a_id = a_path.segments().back();
    const auto& b_id = b_path.segments().back();
    return a_id != b_id ? a_id < b_id : a_path < b_path;
}

std::optional<Reading> read_latest(const TelemetryStore& store, const OntologyPath& path, const DataNode& node)
{
    auto s = store.latest(path);
    if (!s) {
        return std::nullopt;
    }
    return Reading {path, node.name, node.unit, node.semantic, s->timestamp, s->value, s->quality};
}

std::vector<Reading> resource_readings(const TelemetryStore& store, const OntologyPath& resource_path,
    const Resource& resource)
{
    std::vector<Reading> out;
    for (const auto& dn : resource.data) {
        if (auto r = read_latest(store, resource_path.child(dn.id), dn)) {
            out.push_back(std::move(*r));
        }
    }
    return out;
}

std::optional<double> momentary_kw(const TelemetryStore& store, const OntologyPath& parent, const Resource& resource)
{
    std::optional<double> total;
    for (const auto& dn : resource.data) {
        if (dn.unit != Unit::kilowatt || dn.semantic != Semantic::momentary) {
            continue;
        }
        if (auto s = store.latest(parent.child(dn.id))) {
            total = total.value_or(0.0) + s->value;
        }
    }
    return total;
}

AreaOverview overview_for(const ObserverPose& pose, const SiteDescriptor& site, const TelemetryStore& store,
    EpochMs now, const AwarenessParams& params)
{
    AreaOverview ov;
    const OntologyPath site_path({site.id});
    const Department* chosen = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& d : site.departments) {
        const double gap = d.footprint.distance_to(pose.position.x, pose.position.y);
        if (gap < best) {
            best = gap;
            chosen = &d;
        }
    }
    if (chosen) {
        ov.department = site_path.child(chosen->id);
        ov.name = chosen->name;
        ov.observer_inside = best == 0.0;
        ov.power = area_aggregate(store, ov.department, Semantic::momentary, now - params.overview_window_ms, now,
            AggregateFn::sum, Unit::kilowatt);
    }
    else {
        ov.power.scope = site_path;
        ov.power.unit = Unit::kilowatt;
        ov.power.t0 = now - params.overview_window_ms;
        ov.power.t1 = now;
    }
    for (const auto& d : site.departments) {
        for (const auto& a : d.assets) {
            if (a.kind != AssetKind::env_sensor) {
                continue;
            }
            const auto apath = site_path.child(d.id).child(a.id);
            for (const auto& r : a.resources) {
                auto readings = resource_readings(store, apath.child(r.id), r);
                ov.environment.insert(ov.environment.end(), readings.begin(), readings.end());
            }
        }
    }
    return ov;
}

AssetPanel panel_for(const Candidate& c, const TelemetryStore& store, const AlertEngine& alerts,
    const AwarenessParams& params)
{
    AssetPanel p;
    p.asset = c.path;
    p.name = c.asset->name;
    p.kind = c.asset->kind;
    p.tier = c.tier.tier;
    p.distance = c.tier.distance;
    p.in_fov = c.tier.in_fov;
    p.notifications = alerts.recent_notifications(c.path, params.asset_notification_limit);
    p.status = alerts.recent_notifications(c.path, 1, true).empty() ? "normal" : "attention";

    const bool panel_box = c.asset->kind == AssetKind::power_panel;
    for (const auto& r : c.asset->resources) {
        const auto rpath = c.path.child(r.id);
        if (auto kw = momentary_kw(store, rpath, r)) {
            p.power_kw = p.power_kw.value_or(0.0) + *kw;
        }
        if (panel_box) {
            if (p.tier == Tier::detail) {
                p.meters.push_back(MeterReading {rpath, r.name, alerts.meter_status(rpath), momentary_kw(store, rpath, r)});
            }
            continue;
        }
        if (r.offset) {
            continue; // compartments are reported through detail panels
        }
        auto readings = resource_readings(store, rpath, r);
        p.readings.insert(p.readings.end(), readings.begin(), readings.end());
    }
    return p;
}

} // namespace

ViewPacket compose_view_packet(const ObserverPose& pose, const SiteDescriptor& site, const TelemetryStore& store,
    const AlertEngine& alerts, const TierMemory& previous, EpochMs now, const AwarenessParams& params)
{
    ViewPacket packet;
    packet.site = site.id;
    packet.pose = pose;
    packet.generated_at = now;
    packet.overview = overview_for(pose, site, store, now, params);

    const OntologyPath site_path({site.id});
    std::vector<Candidate> near;
    for (const auto& d : site.departments) {
        for (const auto& a : d.assets) {
            Candidate c {&d, &a, site_path.child(d.id).child(a.id), {}, params.radii.with(a.awareness)};
            auto prev = previous.find(c.path.str());
            c.tier = classify_tier(pose, a.position, prev == previous.end() ? Tier::none : prev->second, c.radii);
            c.tier.target = c.path;
            packet.tiers.push_back(c.tier);
            if (c.tier.tier == Tier::proximity || c.tier.tier == Tier::detail) {
                near.push_back(std::move(c));
            }
        }
    }
    std::sort(near.begin(), near.end(), [](const Candidate& a, const Candidate& b) {
        return nearer(a.path, a.tier.distance, b.path, b.tier.distance);
    });

    for (std::size_t i = 0; i < near.size() && i < params.panel_cap; ++i) {
        packet.asset_panels.push_back(panel_for(near[i], store, alerts, params));
    }

    for (const auto& c : near) {
        if (c.tier.tier != Tier::detail) {
            continue;
        }
        ObserverPose cone = pose;
        cone.fov_half_angle = c.radii.fov_half_angle.value_or(pose.fov_half_angle);
        for (const auto& r : c.asset->resources) {
            if (!r.offset) {
                continue;
            }
            const Vec3 world = c.asset->position + *r.offset;
            if (!in_field_of_view(cone, world)) {
                continue;
            }
            const auto rpath = c.path.child(r.id);
            packet.detail_panels.push_back(DetailPanel {rpath, r.name, world, distance(pose.position, world),
                alerts.meter_status(rpath), resource_readings(store, rpath, r)});
        }
    }
    std::stable_sort(packet.detail_panels.begin(), packet.detail_panels.end(),
        [](const DetailPanel& a, const DetailPanel& b) { return nearer(a.resource, a.distance, b.resource, b.distance); });
    if (packet.detail_panels.size() > params.detail_cap) {
        packet.detail_panels.resize(params.detail_cap);
    }

    packet.notifications = alerts.recent_notifications(site_path, params.site_notification_limit, true);
    return packet;
}

/***********************************************************************************************************************
 * JSON
 **********************************************************************************************************************/

namespace {

json vec3_json(const Vec3& v) { return json {{"x", v.x}, {"y", v.y}, {"z", v.z}}; }

json opt_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

} // namespace

void to_json(json& j, const ObserverPose& pose)
{
    j = json {{"position", vec3_json(pose.position)}, {"yaw", pose.yaw}, {"fov_half_angle", pose.fov_half_angle}};
}

void to_json(json& j, const TierAssignment& t)
{
    j = json {{"target", t.target.str()}, {"tier", to_string(t.tier)}, {"distance", t.distance}, {"in_fov", t.in_fov}};
}

void to_json(json& j, const Reading& r)
{
    j = json {{"path", r.path.str()}, {"name", r.name}, {"unit", to_string(r.unit)},
        {"semantic", to_string(r.semantic)}, {"ts", r.timestamp}, {"value", r.value},
        {"quality", to_string(r.quality)}};
}

void to_json(json& j, const ViewPacket& packet)
{
    json overview {{"department", packet.overview.department.str()}, {"name", packet.overview.name},
        {"observer_inside", packet.overview.observer_inside}, {"power", packet.overview.power},
        {"environment", packet.overview.environment}};

    json panels = json::array();
    for (const auto& p : packet.asset_panels) {
        json meters = json::array();
        for (const auto& m : p.meters) {
            meters.push_back(json {{"resource", m.resource.str()}, {"name", m.name}, {"status", to_string(m.status)},
                {"power_kw", opt_number(m.power_kw)}});
        }
        panels.push_back(json {{"asset", p.asset.str()}, {"name", p.name}, {"kind", to_string(p.kind)},
            {"tier", to_string(p.tier)}, {"distance", p.distance}, {"in_fov", p.in_fov}, {"status", p.status},
            {"power_kw", opt_number(p.power_kw)}, {"readings", p.readings}, {"notifications", p.notifications},
            {"meters", std::move(meters)}});
    }

    json details = json::array();
    for (const auto& d : packet.detail_panels) {
        details.push_back(json {{"resource", d.resource.str()}, {"name", d.name}, {"position", vec3_json(d.position)},
            {"distance", d.distance}, {"status", to_string(d.status)}, {"readings", d.readings}});
    }

    j = json {{"site", packet.site}, {"pose", packet.pose}, {"generated_at", packet.generated_at},
        {"overview", std::move(overview)}, {"asset_panels", std::move(panels)}, {"detail_panels", std::move(details)},
        {"notifications", packet.notifications}, {"tiers", packet.tiers}};
}

ObserverPose pose_from_json(const json& j)
{
    if (!j.is_object()) {
        throw SchemaError("", "pose must be an object");
    }
    auto number = [](const json& obj, const char* key, const std::string& where) {
        if (!obj.contains(key) || !obj[key].is_number()) {
            throw SchemaError(where.empty() ? key : where + "." + key, "expected number");
        }
        return obj[key].get<double>();
    };
    if (!j.contains("position") || !j["position"].is_object()) {
        throw SchemaError("position", "expected object");
    }
    ObserverPose pose;
    const auto& p = j["position"];
    pose.position = Vec3 {number(p, "x", "position"), number(p, "y", "position"), number(p, "z", "position")};
    pose.yaw = number(j, "yaw", "");
    if (j.contains("fov_half_angle")) {
        pose.fov_half_angle = number(j, "fov_half_angle", "");
    }
    return pose;
}

} // namespace floorsight
