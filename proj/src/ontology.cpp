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

#include "floorsight/ontology.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <utility>

namespace floorsight {

using nlohmann::json;

const char* to_string(Errc code) noexcept
{
    switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::syntax: return "syntax";
    case Errc::schema: return "schema";
    case Errc::invariant: return "invariant";
    case Errc::not_found: return "not_found";
    case Errc::conflict: return "conflict";
    case Errc::unavailable: return "unavailable";
    }
    return "unknown";
}

namespace {

constexpr std::array<std::pair<AssetKind, std::string_view>, 6> kAssetKinds{{
    {AssetKind::cooling_tunnel, "cooling_tunnel"},
    {AssetKind::liquid_tank, "liquid_tank"},
    {AssetKind::mixing_machine, "mixing_machine"},
    {AssetKind::env_sensor, "env_sensor"},
    {AssetKind::power_panel, "power_panel"},
    {AssetKind::generic, "generic"},
}};

constexpr std::array<std::pair<Unit, std::string_view>, 7> kUnits{{
    {Unit::celsius, "celsius"},
    {Unit::percent_rh, "percent_rh"},
    {Unit::kilowatt, "kilowatt"},
    {Unit::kilowatt_hour, "kilowatt_hour"},
    {Unit::fraction, "fraction"},
    {Unit::count, "count"},
    {Unit::unitless, "unitless"},
}};

constexpr std::array<std::pair<Semantic, std::string_view>, 4> kSemantics{{
    {Semantic::momentary, "momentary"},
    {Semantic::predicted, "predicted"},
    {Semantic::average, "average"},
    {Semantic::status, "status"},
}};

template <typename Enum, std::size_t N>
std::string_view lookup_name(const std::array<std::pair<Enum, std::string_view>, N>& table, Enum value) noexcept
{
    for (const auto& [e, name] : table) {
        if (e == value) {
            return name;
        }
    }
    return "?";
}

template <typename Enum, std::size_t N>
std::optional<Enum> lookup_value(const std::array<std::pair<Enum, std::string_view>, N>& table,
    std::string_view text) noexcept
{
    for (const auto& [e, name] : table) {
        if (name == text) {
            return e;
        }
    }
    return std::nullopt;
}

} // namespace

std::string_view to_string(AssetKind kind) noexcept { return lookup_name(kAssetKinds, kind); }
std::string_view to_string(Unit unit) noexcept { return lookup_name(kUnits, unit); }
std::string_view to_string(Semantic semantic) noexcept { return lookup_name(kSemantics, semantic); }

AssetKind asset_kind_from_string(std::string_view text) noexcept
{
    return lookup_value(kAssetKinds, text).value_or(AssetKind::generic);
}

std::optional<Unit> unit_from_string(std::string_view text) noexcept { return lookup_value(kUnits, text); }

std::optional<Semantic> semantic_from_string(std::string_view text) noexcept
{
    return lookup_value(kSemantics, text);
}

bool is_valid_id(std::string_view id) noexcept
{
    if (id.empty() || id == "." || id == "..") {
        return false;
    }
    for (char c : id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                        c == '-' || c == '.';
        if (!ok) {
            return false;
        }
    }
    return true;
}

/***********************************************************************************************************************
 * OntologyPath
 **********************************************************************************************************************/

OntologyPath::OntologyPath(std::vector<std::string> segments) : segments_(std::move(segments))
{
    if (segments_.size() > kFullDepth) {
        throw Error(Errc::invalid_argument, "ontology path has more than 5 segments");
    }
}

OntologyPath OntologyPath::parse(std::string_view text)
{
    std::vector<std::string> segments;
    if (text.empty()) {
        return OntologyPath {};
    }
    std::size_t start = 0;
    while (true) {
        const auto slash = text.find('/', start);
        const auto piece = text.substr(start, slash == std::string_view::npos ? std::string_view::npos : slash - start);
        if (piece.empty()) {
            throw Error(Errc::invalid_argument, "empty segment in ontology path '" + std::string(text) + "'");
        }
        segments.emplace_back(piece);
        if (slash == std::string_view::npos) {
            break;
        }
        start = slash + 1;
    }
    if (segments.size() > kFullDepth) {
        throw Error(Errc::invalid_argument, "ontology path '" + std::string(text) + "' has more than 5 segments");
    }
    return OntologyPath(std::move(segments));
}

OntologyPath OntologyPath::child(std::string id) const
{
    auto segments = segments_;
    segments.push_back(std::move(id));
    return OntologyPath(std::move(segments));
}

OntologyPath OntologyPath::parent() const
{
    if (segments_.empty()) {
        return {};
    }
    return OntologyPath(std::vector<std::string>(segments_.begin(), segments_.end() - 1));
}

OntologyPath OntologyPath::truncated(Level level) const
{
    const auto n = std::min(segments_.size(), static_cast<std::size_t>(level));
    return OntologyPath(std::vector<std::string>(segments_.begin(), segments_.begin() + static_cast<long>(n)));
}

bool OntologyPath::starts_with(const OntologyPath& prefix) const noexcept
{
    if (prefix.segments_.size() > segments_.size()) {
        return false;
    }
    return std::equal(prefix.segments_.begin(), prefix.segments_.end(), segments_.begin());
}

std::string OntologyPath::str() const
{
    std::string out;
    for (const auto& s : segments_) {
        if (!out.empty()) {
            out += '/';
        }
        out += s;
    }
    return out;
}

/***********************************************************************************************************************
 * Navigation
 **********************************************************************************************************************/

namespace {

template <typename Node>
const Node* find_by_id(const std::vector<Node>& nodes, const std::string& id)
{
    for (const auto& n : nodes) {
        if (n.id == id) {
            return &n;
        }
    }
    return nullptr;
}

} // namespace

std::variant<NodeRef, Unresolved> try_resolve(const SiteDescriptor& site, const OntologyPath& path)
{
    const auto& seg = path.segments();
    if (seg.empty()) {
        return Unresolved {0, ""};
    }
    NodeRef ref;
    if (seg[0] != site.id) {
        return Unresolved {1, seg[0]};
    }
    ref.site = &site;
    ref.level = Level::site;
    if (seg.size() >= 2) {
        ref.department = find_by_id(site.departments, seg[1]);
        if (!ref.department) {
            return Unresolved {2, seg[1]};
        }
        ref.level = Level::department;
    }
    if (seg.size() >= 3) {
        ref.asset = find_by_id(ref.department->assets, seg[2]);
        if (!ref.asset) {
            return Unresolved {3, seg[2]};
        }
        ref.level = Level::asset;
    }
    if (seg.size() >= 4) {
        ref.resource = find_by_id(ref.asset->resources, seg[3]);
        if (!ref.resource) {
            return Unresolved {4, seg[3]};
        }
        ref.level = Level::resource;
    }
    if (seg.size() >= 5) {
        ref.data = find_by_id(ref.resource->data, seg[4]);
        if (!ref.data) {
            return Unresolved {5, seg[4]};
        }
        ref.level = Level::data;
    }
    return ref;
}

NodeRef resolve(const SiteDescriptor& site, const OntologyPath& path)
{
    auto result = try_resolve(site, path);
    if (auto* miss = std::get_if<Unresolved>(&result)) {
        if (path.empty()) {
            throw Error(Errc::not_found, "empty ontology path");
        }
        throw Error(Errc::not_found, "no node '" + miss->segment + "' at depth " + std::to_string(miss->depth) +
                                         " of path '" + path.str() + "'");
    }
    return std::get<NodeRef>(result);
}

void for_each_data(const SiteDescriptor& site, const std::function<void(const OntologyPath&, const NodeRef&)>& visit)
{
    for (const auto& dept : site.departments) {
        for (const auto& asset : dept.assets) {
            for (const auto& res : asset.resources) {
                for (const auto& data : res.data) {
                    NodeRef ref {&site, &dept, &asset, &res, &data, Level::data};
                    visit(OntologyPath({site.id, dept.id, asset.id, res.id, data.id}), ref);
                }
            }
        }
    }
}

std::vector<OntologyPath> data_paths(const SiteDescriptor& site)
{
    std::vector<OntologyPath> out;
    for_each_data(site, [&](const OntologyPath& p, const NodeRef&) { out.push_back(p); });
    return out;
}

/***********************************************************************************************************************
 * Validation
 **********************************************************************************************************************/

std::string_view to_string(ViolationKind kind) noexcept
{
    switch (kind) {
    case ViolationKind::bad_id: return "bad_id";
    case ViolationKind::duplicate_id: return "duplicate_id";
    case ViolationKind::bad_bounds: return "bad_bounds";
    case ViolationKind::out_of_bounds: return "out_of_bounds";
    case ViolationKind::bad_override: return "bad_override";
    }
    return "?";
}

namespace {

std::string fmt_vec(const Vec3& v)
{
    std::ostringstream os;
    os << '(' << v.x << ", " << v.y << ", " << v.z << ')';
    return os.str();
}

class Validator {
public:
    explicit Validator(ValidationReport& out) : out_(out) {}

    void site(const SiteDescriptor& s)
    {
        const OntologyPath path({s.id});
        check_id(path, s.id);
        const auto& b = s.bounds;
        const bool bounds_ok = std::isfinite(b.w) && std::isfinite(b.d) && std::isfinite(b.h) && b.w > 0.0 &&
                               b.d > 0.0 && b.h > 0.0;
        if (!bounds_ok) {
            add(path, ViolationKind::bad_bounds, "site bounds must be strictly positive in all three dimensions");
        }
        siblings(path, s.departments);
        for (const auto& d : s.departments) {
            department(path.child(d.id), d, s.bounds, bounds_ok);
        }
    }

private:
    void department(const OntologyPath& path, const Department& d, const Box3& bounds, bool bounds_ok)
    {
        check_id(path, d.id);
        const auto& f = d.footprint;
        if (!(f.w > 0.0 && f.d > 0.0)) {
            add(path, ViolationKind::bad_bounds, "department footprint must have positive width and depth");
        }
        else if (bounds_ok && !f.inside(bounds)) {
            add(path, ViolationKind::out_of_bounds, "department footprint extends outside the site bounds");
        }
        siblings(path, d.assets);
        for (const auto& a : d.assets) {
            asset(path.child(a.id), a, bounds, bounds_ok);
        }
    }

    void asset(const OntologyPath& path, const Asset& a, const Box3& bounds, bool bounds_ok)
    {
        check_id(path, a.id);
        if (!a.position.finite() || (bounds_ok && !bounds.contains(a.position))) {
            add(path, ViolationKind::out_of_bounds, "asset position " + fmt_vec(a.position) + " is outside the site bounds");
        }
        override_checks(path, a.awareness);
        siblings(path, a.resources);
        for (const auto& r : a.resources) {
            const auto rpath = path.child(r.id);
            check_id(rpath, r.id);
            if (r.offset) {
                const Vec3 world = a.position + *r.offset;
                if (!world.finite() || (bounds_ok && !bounds.contains(world))) {
                    add(rpath, ViolationKind::out_of_bounds,
                        "resource position " + fmt_vec(world) + " (asset + offset) is outside the site bounds");
                }
            }
            siblings(rpath, r.data);
            for (const auto& dn : r.data) {
                check_id(rpath.child(dn.id), dn.id);
            }
        }
    }

    void override_checks(const OntologyPath& path, const AwarenessOverride& o)
    {
        auto positive = [&](const std::optional<double>& v, const char* name) {
            if (v && !(std::isfinite(*v) && *v > 0.0)) {
                add(path, ViolationKind::bad_override, std::string("awareness.") + name + " must be positive");
            }
        };
        positive(o.r_detail, "r_detail");
        positive(o.r_prox_enter, "r_prox_enter");
        positive(o.r_prox_exit, "r_prox_exit");
        if (o.fov_half_angle && !(*o.fov_half_angle > 0.0 && *o.fov_half_angle <= std::numbers::pi)) {
            add(path, ViolationKind::bad_override, "awareness.fov_half_angle must lie in (0, pi]");
        }
        if (o.r_prox_enter && o.r_prox_exit && *o.r_prox_exit < *o.r_prox_enter) {
            add(path, ViolationKind::bad_override, "awareness.r_prox_exit must not be smaller than r_prox_enter");
        }
    }

    template <typename Node>
    void siblings(const OntologyPath& parent, const std::vector<Node>& nodes)
    {
        std::set<std::string> seen;
        for (const auto& n : nodes) {
            if (!seen.insert(n.id).second) {
                add(parent.child(n.id), ViolationKind::duplicate_id, "duplicate id '" + n.id + "' among siblings");
            }
        }
    }

    void check_id(const OntologyPath& path, const std::string& id)
    {
        if (!is_valid_id(id)) {
            add(path, ViolationKind::bad_id, "id '" + id + "' is empty or contains characters outside [A-Za-z0-9_.-]");
        }
    }

    void add(OntologyPath path, ViolationKind kind, std::string message)
    {
        out_.push_back(Violation {std::move(path), kind, std::move(message)});
    }

    ValidationReport& out_;
};

} // namespace

ValidationReport validate(const SiteDescriptor& site)
{
    ValidationReport report;
    Validator(report).site(site);
    return report;
}

ValidationReport validate(std::span<const SiteDescriptor> sites)
{
    ValidationReport report;
    std::set<std::string> seen;
    for (const auto& s : sites) {
        Validator(report).site(s);
        if (!seen.insert(s.id).second) {
            report.push_back(Violation {OntologyPath({s.id}), ViolationKind::duplicate_id,
                "duplicate site id '" + s.id + "' in deployment"});
        }
    }
    return report;
}

std::string format_report(const ValidationReport& report)
{
    std::string out;
    for (const auto& v : report) {
        out += v.path.str();
        out += ": ";
        out += to_string(v.kind);
        out += ": ";
        out += v.message;
        out += '\n';
    }
    return out;
}

InvariantError::InvariantError(ValidationReport report)
    : Error(Errc::invariant,
          report.empty() ? std::string("invariant violation")
                         : report.front().path.str() + ": " + report.front().message +
                               (report.size() > 1 ? " (and " + std::to_string(report.size() - 1) + " more)" : ""))
    , report_(std::move(report))
{
}

/***********************************************************************************************************************
 * JSON
 **********************************************************************************************************************/

namespace {

class Reader {
public:
    Reader(const json& j, std::string where) : j_(j), where_(std::move(where))
    {
        if (!j_.is_object()) {
            throw SchemaError(where_, "expected object");
        }
    }

    std::string str(const char* key) const
    {
        const auto& v = get(key);
        if (!v.is_string()) {
            throw SchemaError(at(key), "expected string");
        }
        return v.get<std::string>();
    }

    double num(const char* key) const
    {
        const auto& v = get(key);
        if (!v.is_number()) {
            throw SchemaError(at(key), "expected number");
        }
        return v.get<double>();
    }

    std::optional<double> opt_num(const char* key) const
    {
        if (!j_.contains(key)) {
            return std::nullopt;
        }
        return num(key);
    }

    const json& array(const char* key, bool required) const
    {
        static const json kEmpty = json::array();
        if (!j_.contains(key)) {
            if (required) {
                throw SchemaError(at(key), "missing field");
            }
            return kEmpty;
        }
        const auto& v = j_.at(key);
        if (!v.is_array()) {
            throw SchemaError(at(key), "expected array");
        }
        return v;
    }

    Reader object(const char* key) const { return Reader(get(key), at(key)); }

    bool has(const char* key) const { return j_.contains(key); }

    std::string at(const std::string& key) const { return where_.empty() ? key : where_ + "." + key; }

    json extras(std::initializer_list<const char*> known) const
    {
        json out = json::object();
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            bool is_known = false;
            for (const char* k : known) {
                if (it.key() == k) {
                    is_known = true;
                    break;
                }
            }
            if (!is_known) {
                out[it.key()] = it.value();
            }
        }
        return out;
    }

private:
    const json& get(const char* key) const
    {
        if (!j_.contains(key)) {
            throw SchemaError(at(key), "missing field");
        }
        return j_.at(key);
    }

    const json& j_;
    std::string where_;
};

std::string index_at(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

Vec3 read_vec3(const Reader& r) { return Vec3 {r.num("x"), r.num("y"), r.num("z")}; }

DataNode read_data(const Reader& r)
{
    DataNode d;
    d.id = r.str("id");
    d.name = r.str("name");
    const auto unit = r.str("unit");
    const auto u = unit_from_string(unit);
    if (!u) {
        throw SchemaError(r.at("unit"), "unknown unit '" + unit + "'");
    }
    d.unit = *u;
    const auto semantic = r.str("semantic");
    const auto s = semantic_from_string(semantic);
    if (!s) {
        throw SchemaError(r.at("semantic"), "unknown semantic '" + semantic + "'");
    }
    d.semantic = *s;
    d.extras = r.extras({"id", "name", "unit", "semantic"});
    return d;
}

Resource read_resource(const Reader& r)
{
    Resource res;
    res.id = r.str("id");
    res.name = r.str("name");
    if (r.has("offset")) {
        res.offset = read_vec3(r.object("offset"));
    }
    const auto& data = r.array("data", false);
    const auto where = r.at("data");
    for (std::size_t i = 0; i < data.size(); ++i) {
        res.data.push_back(read_data(Reader(data[i], index_at(where, i))));
    }
    res.extras = r.extras({"id", "name", "offset", "data"});
    return res;
}

Asset read_asset(const Reader& r)
{
    Asset a;
    a.id = r.str("id");
    a.name = r.str("name");
    a.kind = asset_kind_from_string(r.str("kind"));
    a.position = read_vec3(r.object("position"));
    if (r.has("awareness")) {
        const auto o = r.object("awareness");
        a.awareness.r_detail = o.opt_num("r_detail");
        a.awareness.r_prox_enter = o.opt_num("r_prox_enter");
        a.awareness.r_prox_exit = o.opt_num("r_prox_exit");
        a.awareness.fov_half_angle = o.opt_num("fov_half_angle");
    }
    const auto& resources = r.array("resources", false);
    const auto where = r.at("resources");
    for (std::size_t i = 0; i < resources.size(); ++i) {
        a.resources.push_back(read_resource(Reader(resources[i], index_at(where, i))));
    }
    a.extras = r.extras({"id", "name", "kind", "position", "awareness", "resources"});
    return a;
}

Department read_department(const Reader& r)
{
    Department d;
    d.id = r.str("id");
    d.name = r.str("name");
    const auto f = r.object("footprint");
    d.footprint = Rect2 {f.num("x"), f.num("y"), f.num("w"), f.num("d")};
    const auto& assets = r.array("assets", false);
    const auto where = r.at("assets");
    for (std::size_t i = 0; i < assets.size(); ++i) {
        d.assets.push_back(read_asset(Reader(assets[i], index_at(where, i))));
    }
    d.extras = r.extras({"id", "name", "footprint", "assets"});
    return d;
}

json vec3_json(const Vec3& v) { return json {{"x", v.x}, {"y", v.y}, {"z", v.z}}; }

void merge_extras(json& out, const json& extras)
{
    if (extras.is_object()) {
        for (auto it = extras.begin(); it != extras.end(); ++it) {
            out.emplace(it.key(), it.value());
        }
    }
}

} // namespace

SiteDescriptor descriptor_from_json(const json& doc)
{
    const Reader r(doc, "");
    SiteDescriptor s;
    s.id = r.str("id");
    s.name = r.str("name");
    const auto b = r.object("bounds");
    s.bounds = Box3 {b.num("w"), b.num("d"), b.num("h")};
    const auto& depts = r.array("departments", false);
    for (std::size_t i = 0; i < depts.size(); ++i) {
        s.departments.push_back(read_department(Reader(depts[i], index_at("departments", i))));
    }
    s.extras = r.extras({"id", "name", "bounds", "departments"});
    return s;
}

SiteDescriptor parse_descriptor(std::string_view text)
{
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    }
    catch (const json::parse_error& e) {
        throw SyntaxError(e.byte, std::string("JSON syntax error: ") + e.what());
    }
    auto site = descriptor_from_json(doc);
    auto report = validate(site);
    if (!report.empty()) {
        throw InvariantError(std::move(report));
    }
    return site;
}

SiteDescriptor load_descriptor(const std::filesystem::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw Error(Errc::not_found, "cannot open descriptor file '" + file.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_descriptor(buf.str());
    }
    catch (const InvariantError& e) {
        throw;
    }
    catch (const SyntaxError& e) {
        throw SyntaxError(e.byte(), file.string() + ": " + e.what());
    }
    catch (const Error& e) {
        throw Error(e.code(), file.string() + ": " + e.what());
    }
}

json to_json(const SiteDescriptor& site)
{
    json depts = json::array();
    for (const auto& d : site.departments) {
        json assets = json::array();
        for (const auto& a : d.assets) {
            json resources = json::array();
            for (const auto& r : a.resources) {
                json data = json::array();
                for (const auto& dn : r.data) {
                    json jd {{"id", dn.id}, {"name", dn.name}, {"unit", to_string(dn.unit)},
                        {"semantic", to_string(dn.semantic)}};
                    merge_extras(jd, dn.extras);
                    data.push_back(std::move(jd));
                }
                json jr {{"id", r.id}, {"name", r.name}, {"data", std::move(data)}};
                if (r.offset) {
                    jr["offset"] = vec3_json(*r.offset);
                }
                merge_extras(jr, r.extras);
                resources.push_back(std::move(jr));
            }
            json ja {{"id", a.id}, {"name", a.name}, {"kind", to_string(a.kind)}, {"position", vec3_json(a.position)},
                {"resources", std::move(resources)}};
            if (!a.awareness.empty()) {
                json o = json::object();
                if (a.awareness.r_detail) o["r_detail"] = *a.awareness.r_detail;
                if (a.awareness.r_prox_enter) o["r_prox_enter"] = *a.awareness.r_prox_enter;
                if (a.awareness.r_prox_exit) o["r_prox_exit"] = *a.awareness.r_prox_exit;
                if (a.awareness.fov_half_angle) o["fov_half_angle"] = *a.awareness.fov_half_angle;
                ja["awareness"] = std::move(o);
            }
            merge_extras(ja, a.extras);
            assets.push_back(std::move(ja));
        }
        json jd {{"id", d.id}, {"name", d.name},
            {"footprint", {{"x", d.footprint.x}, {"y", d.footprint.y}, {"w", d.footprint.w}, {"d", d.footprint.d}}},
            {"assets", std::move(assets)}};
        merge_extras(jd, d.extras);
        depts.push_back(std::move(jd));
    }
    json out {{"id", site.id}, {"name", site.name},
        {"bounds", {{"w", site.bounds.w}, {"d", site.bounds.d}, {"h", site.bounds.h}}},
        {"departments", std::move(depts)}};
    merge_extras(out, site.extras);
    return out;
}

std::string serialize(const SiteDescriptor& site, int indent) { return to_json(site).dump(indent); }

/***********************************************************************************************************************
 * Deployment
 **********************************************************************************************************************/

Deployment::Deployment(std::vector<SiteDescriptor> sites) : sites_(std::move(sites))
{
    auto report = validate(std::span<const SiteDescriptor>(sites_));
    if (!report.empty()) {
        throw InvariantError(std::move(report));
    }
}

const SiteDescriptor* Deployment::find_site(std::string_view id) const noexcept
{
    for (const auto& s : sites_) {
        if (s.id == id) {
            return &s;
        }
    }
    return nullptr;
}

NodeRef Deployment::resolve(const OntologyPath& path) const
{
    if (path.empty()) {
        throw Error(Errc::not_found, "empty ontology path");
    }
    const auto* site = find_site(path.segments().front());
    if (!site) {
        throw Error(Errc::not_found, "no node '" + path.segments().front() + "' at depth 1 of path '" + path.str() + "'");
    }
    return floorsight::resolve(*site, path);
}

const DataNode& Deployment::data_node(const OntologyPath& path) const
{
    if (!path.is_full()) {
        throw Error(Errc::invalid_argument, "path '" + path.str() + "' does not address a Data node (needs 5 segments)");
    }
    return *resolve(path).data;
}

std::vector<OntologyPath> Deployment::data_paths(const OntologyPath& prefix) const
{
    std::vector<OntologyPath> out;
    for (const auto& s : sites_) {
        for_each_data(s, [&](const OntologyPath& p, const NodeRef&) {
            if (p.starts_with(prefix)) {
                out.push_back(p);
            }
        });
    }
    return out;
}

} // namespace floorsight
