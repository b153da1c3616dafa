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

#include <compare>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "floorsight/error.hpp"
#include "floorsight/geometry.hpp"

/**
 * Five-level asset ontology: Site / Department / Asset / Resource / Data.
 *
 * A site descriptor is a JSON document holding one site tree. Every node has
 * an `id` and a `name`; geometry lives at the levels where it is meaningful
 * (site bounds, department floor footprint, asset position, optional
 * resource offset). Keys the parser does not know are kept in `extras` and
 * written back out unchanged.
 */
namespace floorsight {

enum class AssetKind { cooling_tunnel, liquid_tank, mixing_machine, env_sensor, power_panel, generic };
enum class Unit { celsius, percent_rh, kilowatt, kilowatt_hour, fraction, count, unitless };
enum class Semantic { momentary, predicted, average, status };

std::string_view to_string(AssetKind kind) noexcept;
std::string_view to_string(Unit unit) noexcept;
std::string_view to_string(Semantic semantic) noexcept;

/// Unrecognised kinds map to `generic`.
AssetKind asset_kind_from_string(std::string_view text) noexcept;
std::optional<Unit> unit_from_string(std::string_view text) noexcept;
std::optional<Semantic> semantic_from_string(std::string_view text) noexcept;

enum class Level : std::size_t { site = 1, department = 2, asset = 3, resource = 4, data = 5 };

inline constexpr std::size_t kFullDepth = 5;

/// True for ids made of [A-Za-z0-9_.-], other than "." and "..".
bool is_valid_id(std::string_view id) noexcept;

/// Address of a node: site[/department[/asset[/resource[/data]]]].
class OntologyPath {
public:
    OntologyPath() = default;
    explicit OntologyPath(std::vector<std::string> segments);

    /// Splits on '/'. Throws Error(invalid_argument) on empty segments or
    /// more than five of them.
    static OntologyPath parse(std::string_view text);

    const std::vector<std::string>& segments() const noexcept { return segments_; }
    std::size_t depth() const noexcept { return segments_.size(); }
    bool empty() const noexcept { return segments_.empty(); }
    bool is_full() const noexcept { return segments_.size() == kFullDepth; }

    const std::string& segment(Level level) const { return segments_.at(static_cast<std::size_t>(level) - 1); }

    OntologyPath child(std::string id) const;
    OntologyPath parent() const;
    OntologyPath truncated(Level level) const;

    /// Segment-wise prefix test; the empty path is a prefix of everything.
    bool starts_with(const OntologyPath& prefix) const noexcept;

    std::string str() const;

    friend auto operator<=>(const OntologyPath&, const OntologyPath&) = default;
    friend bool operator==(const OntologyPath&, const OntologyPath&) = default;

private:
    std::vector<std::string> segments_;
};

struct AwarenessOverride {
    std::optional<double> r_detail;
    std::optional<double> r_prox_enter;
    std::optional<double> r_prox_exit;
    std::optional<double> fov_half_angle;

    bool empty() const noexcept { return !r_detail && !r_prox_enter && !r_prox_exit && !fov_half_angle; }

    friend bool operator==(const AwarenessOverride&, const AwarenessOverride&) = default;
};

struct DataNode {
    std::string id;
    std::string name;
    Unit unit = Unit::unitless;
    Semantic semantic = Semantic::momentary;
    nlohmann::json extras = nlohmann::json::object();

    friend bool operator==(const DataNode&, const DataNode&) = default;
};

struct Resource {
    std::string id;
    std::string name;
    std::optional<Vec3> offset; // compartments: relative to the owning asset
    std::vector<DataNode> data;
    nlohmann::json extras = nlohmann::json::object();

    friend bool operator==(const Resource&, const Resource&) = default;
};

struct Asset {
    std::string id;
    std::string name;
    AssetKind kind = AssetKind::generic;
    Vec3 position;
    std::vector<Resource> resources;
    AwarenessOverride awareness; // `awareness` extension object
    nlohmann::json extras = nlohmann::json::object();

    friend bool operator==(const Asset&, const Asset&) = default;
};

struct Department {
    std::string id;
    std::string name;
    Rect2 footprint;
    std::vector<Asset> assets;
    nlohmann::json extras = nlohmann::json::object();

    friend bool operator==(const Department&, const Department&) = default;
};

struct SiteDescriptor {
    std::string id;
    std::string name;
    Box3 bounds;
    std::vector<Department> departments;
    nlohmann::json extras = nlohmann::json::object();

    friend bool operator==(const SiteDescriptor&, const SiteDescriptor&) = default;
};

/// Chain of nodes from the site down to the resolved node. Pointers below
/// `level` are null.
struct NodeRef {
    const SiteDescriptor* site = nullptr;
    const Department* department = nullptr;
    const Asset* asset = nullptr;
    const Resource* resource = nullptr;
    const DataNode* data = nullptr;
    Level level = Level::site;
};

/// Where resolution stopped: 1-based depth and the offending segment.
struct Unresolved {
    std::size_t depth = 0;
    std::string segment;
};

std::variant<NodeRef, Unresolved> try_resolve(const SiteDescriptor& site, const OntologyPath& path);

/// Throws Error(not_found) naming the first unresolvable segment.
NodeRef resolve(const SiteDescriptor& site, const OntologyPath& path);

/// Visits every Data node in document order.
void for_each_data(const SiteDescriptor& site, const std::function<void(const OntologyPath&, const NodeRef&)>& visit);

std::vector<OntologyPath> data_paths(const SiteDescriptor& site);

// Validation

enum class ViolationKind { bad_id, duplicate_id, bad_bounds, out_of_bounds, bad_override };

std::string_view to_string(ViolationKind kind) noexcept;

struct Violation {
    OntologyPath path;
    ViolationKind kind;
    std::string message;
};

using ValidationReport = std::vector<Violation>;

ValidationReport validate(const SiteDescriptor& site);

/// Adds the cross-site check: site ids unique within the deployment.
ValidationReport validate(std::span<const SiteDescriptor> sites);

std::string format_report(const ValidationReport& report);

class InvariantError : public Error {
public:
    explicit InvariantError(ValidationReport report);

    const ValidationReport& report() const noexcept { return report_; }

private:
    ValidationReport report_;
};

// JSON descriptor format

/// Schema-checked conversion without invariant validation.
SiteDescriptor descriptor_from_json(const nlohmann::json& doc);

/// Parses and validates. Throws SyntaxError, SchemaError or InvariantError.
SiteDescriptor parse_descriptor(std::string_view text);

/// Reads and parses a file; errors are prefixed with the file path.
SiteDescriptor load_descriptor(const std::filesystem::path& file);

nlohmann::json to_json(const SiteDescriptor& site);

std::string serialize(const SiteDescriptor& site, int indent = 2);

/// The set of sites served by one deployment. Immutable once built.
class Deployment {
public:
    /// Throws InvariantError if any site is invalid or ids collide.
    explicit Deployment(std::vector<SiteDescriptor> sites);

    std::span<const SiteDescriptor> sites() const noexcept { return sites_; }

    const SiteDescriptor* find_site(std::string_view id) const noexcept;

    /// Throws Error(not_found).
    NodeRef resolve(const OntologyPath& path) const;

    /// Throws Error(invalid_argument) unless the path has full depth, and
    /// Error(not_found) if it does not resolve.
    const DataNode& data_node(const OntologyPath& path) const;

    /// All full-depth paths under `prefix` (every path when empty).
    std::vector<OntologyPath> data_paths(const OntologyPath& prefix = {}) const;

private:
    std::vector<SiteDescriptor> sites_;
};

} // namespace floorsight
