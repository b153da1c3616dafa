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

#include <doctest.h>

#include <set>

#include "floorsight/ontology.hpp"
#include "floorsight/pilot_sim.hpp"
#include "support/descriptor_gen.hpp"

using namespace floorsight;

namespace {

const char* kSmallSite = R"({
  "id": "site", "name": "Small", "bounds": {"w": 90, "d": 40, "h": 12},
  "vendor_tag": {"plant": 7},
  "departments": [{
    "id": "dept-A", "name": "A", "footprint": {"x": 0, "y": 0, "w": 45, "d": 40},
    "assets": [{
      "id": "tunnel-1", "name": "Tunnel", "kind": "cooling_tunnel",
      "position": {"x": 10, "y": 5, "z": 1.5},
      "resources": [
        {"id": "power", "name": "Meter", "data": [
          {"id": "momentary", "name": "Power", "unit": "kilowatt", "semantic": "momentary"}]},
        {"id": "compartment-1", "name": "C1", "offset": {"x": -1.5, "y": 0, "z": 0}, "data": [
          {"id": "temperature", "name": "T", "unit": "celsius", "semantic": "momentary", "sensor": "pt100"}]}
      ]
    }, {
      "id": "tank-1", "name": "Tank", "kind": "liquid_tank", "position": {"x": 30, "y": 5, "z": 2}
    }]
  }]
})";

// Independent oracle: every sibling set as (parent path, ids) and the ids
// that occur more than once.
std::set<std::string> duplicate_paths_oracle(const SiteDescriptor& s)
{
    std::set<std::string> dups;
    auto scan = [&](const std::string& parent, const std::vector<std::string>& ids) {
        for (std::size_t i = 0; i < ids.size(); ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                if (ids[i] == ids[j]) {
                    dups.insert(parent + "/" + ids[i]);
                }
            }
        }
    };
    std::vector<std::string> dept_ids;
    for (const auto& d : s.departments) {
        dept_ids.push_back(d.id);
        std::vector<std::string> asset_ids;
        for (const auto& a : d.assets) {
            asset_ids.push_back(a.id);
        }
        scan(s.id + "/" + d.id, asset_ids);
    }
    scan(s.id, dept_ids);
    return dups;
}

} // namespace

TEST_CASE("demo site document parses with the paper's roster")
{
    const auto doc = serialize(sim::build_demo_site());
    const auto site = parse_descriptor(doc);

    CHECK(site.bounds == Box3 {90.0, 40.0, 12.0});
    int tunnels = 0, tanks = 0;
    for (const auto& d : site.departments) {
        for (const auto& a : d.assets) {
            tunnels += a.kind == AssetKind::cooling_tunnel;
            tanks += a.kind == AssetKind::liquid_tank;
        }
    }
    CHECK(tunnels == 3);
    CHECK(tanks == 4);
}

TEST_CASE("site with zero departments is valid")
{
    const auto site = parse_descriptor(R"({"id":"empty","name":"E","bounds":{"w":1,"d":2,"h":3},"departments":[]})");
    CHECK(site.departments.empty());
    CHECK(validate(site).empty());

    // departments may also be omitted altogether
    CHECK(parse_descriptor(R"({"id":"e","name":"E","bounds":{"w":1,"d":2,"h":3}})").departments.empty());
}

TEST_CASE("duplicate asset id is rejected with the offending path")
{
    auto doc = nlohmann::json::parse(kSmallSite);
    doc["departments"][0]["assets"][0]["id"] = "tank-1";
    const auto unchecked = descriptor_from_json(doc);
    const auto oracle = duplicate_paths_oracle(unchecked);
    REQUIRE(oracle == std::set<std::string> {"site/dept-A/tank-1"});

    try {
        parse_descriptor(doc.dump());
        FAIL("expected InvariantError");
    }
    catch (const InvariantError& e) {
        REQUIRE(e.report().size() == 1);
        CHECK(e.report()[0].kind == ViolationKind::duplicate_id);
        CHECK(oracle.count(e.report()[0].path.str()) == 1);
        CHECK(std::string(e.what()).find("site/dept-A/tank-1") != std::string::npos);
    }
}

TEST_CASE("syntax errors report a position")
{
    try {
        parse_descriptor("{\"id\": \"x\",\n  \"name\": }");
        FAIL("expected SyntaxError");
    }
    catch (const SyntaxError& e) {
        // the stray '}' is the 23rd byte
        CHECK(e.byte() == 23);
        CHECK(e.code() == Errc::syntax);
    }
}

TEST_CASE("schema errors name the location")
{
    auto doc = nlohmann::json::parse(kSmallSite);
    doc["departments"][0]["assets"][1]["position"].erase("y");
    try {
        parse_descriptor(doc.dump());
        FAIL("expected SchemaError");
    }
    catch (const SchemaError& e) {
        CHECK(e.where() == "departments[0].assets[1].position.y");
    }

    doc = nlohmann::json::parse(kSmallSite);
    doc["bounds"]["w"] = "wide";
    CHECK_THROWS_AS(parse_descriptor(doc.dump()), SchemaError);

    doc = nlohmann::json::parse(kSmallSite);
    doc["departments"][0]["assets"][0]["resources"][0]["data"][0]["unit"] = "horsepower";
    CHECK_THROWS_WITH_AS(parse_descriptor(doc.dump()), doctest::Contains("horsepower"), SchemaError);
}

TEST_CASE("unknown kinds fall back to generic, unknown fields survive a round trip")
{
    auto doc = nlohmann::json::parse(kSmallSite);
    doc["departments"][0]["assets"][1]["kind"] = "centrifuge";
    const auto site = parse_descriptor(doc.dump());
    CHECK(site.departments[0].assets[1].kind == AssetKind::generic);
    CHECK(site.extras["vendor_tag"]["plant"] == 7);
    CHECK(site.departments[0].assets[0].resources[1].data[0].extras["sensor"] == "pt100");
    CHECK(parse_descriptor(serialize(site)) == site);
}

TEST_CASE("validate: demo site is clean and its invariants hold by direct check")
{
    const auto site = sim::build_demo_site();
    CHECK(validate(site).empty());

    // direct check, independent of the validator
    CHECK(site.bounds.w > 0);
    CHECK(site.bounds.d > 0);
    CHECK(site.bounds.h > 0);
    for (const auto& d : site.departments) {
        CHECK(d.footprint.x >= 0);
        CHECK(d.footprint.y >= 0);
        CHECK(d.footprint.x + d.footprint.w <= site.bounds.w);
        CHECK(d.footprint.y + d.footprint.d <= site.bounds.d);
        for (const auto& a : d.assets) {
            CHECK(site.bounds.contains(a.position));
            for (const auto& r : a.resources) {
                if (r.offset) {
                    CHECK(site.bounds.contains(a.position + *r.offset));
                }
            }
        }
    }
    CHECK(duplicate_paths_oracle(site).empty());
}

TEST_CASE("validate: geometry violations")
{
    auto site = descriptor_from_json(nlohmann::json::parse(kSmallSite));

    SUBCASE("asset at x = 100 in a 90 m wide site")
    {
        site.departments[0].assets[1].position = Vec3 {100, 0, 0};
        const auto report = validate(site);
        REQUIRE(report.size() == 1);
        CHECK(report[0].kind == ViolationKind::out_of_bounds);
        CHECK(report[0].path.str() == "site/dept-A/tank-1");
    }
    SUBCASE("department footprint exceeding the site")
    {
        site.departments[0].footprint.w = 95;
        const auto report = validate(site);
        REQUIRE(report.size() == 1);
        CHECK(report[0].path.str() == "site/dept-A");
    }
    SUBCASE("compartment offset leaving the site")
    {
        site.departments[0].assets[0].resources[1].offset = Vec3 {-20, 0, 0};
        const auto report = validate(site);
        REQUIRE(report.size() == 1);
        CHECK(report[0].path.str() == "site/dept-A/tunnel-1/compartment-1");
    }
    SUBCASE("non-positive bounds")
    {
        site.bounds.h = 0;
        const auto report = validate(site);
        REQUIRE(report.size() == 1);
        CHECK(report[0].kind == ViolationKind::bad_bounds);
    }
    SUBCASE("awareness overrides must be sane")
    {
        site.departments[0].assets[0].awareness.r_prox_enter = 9;
        site.departments[0].assets[0].awareness.r_prox_exit = 4;
        CHECK(validate(site).size() == 1);
    }
}

TEST_CASE("deployment rejects duplicate site ids")
{
    auto a = descriptor_from_json(nlohmann::json::parse(kSmallSite));
    auto b = a;
    CHECK_THROWS_AS(Deployment({a, b}), InvariantError);
    b.id = "other";
    Deployment dep({a, b});
    CHECK(dep.find_site("other") != nullptr);
}

TEST_CASE("resolve")
{
    const auto site = parse_descriptor(kSmallSite);

    const auto asset = resolve(site, OntologyPath::parse("site/dept-A/tunnel-1"));
    CHECK(asset.level == Level::asset);
    CHECK(asset.asset->id == "tunnel-1");

    auto miss = try_resolve(site, OntologyPath::parse("site/dept-A/ghost"));
    REQUIRE(std::holds_alternative<Unresolved>(miss));
    CHECK(std::get<Unresolved>(miss).segment == "ghost");
    CHECK(std::get<Unresolved>(miss).depth == 3);
    CHECK_THROWS_WITH_AS(resolve(site, OntologyPath::parse("site/dept-A/ghost")), doctest::Contains("'ghost'"), Error);

    const auto data = resolve(site, OntologyPath::parse("site/dept-A/tunnel-1/power/momentary"));
    CHECK(data.level == Level::data);
    // walk the tree by hand
    const DataNode* expected = &site.departments[0].assets[0].resources[0].data[0];
    CHECK(data.data == expected);
    CHECK(data.resource == &site.departments[0].assets[0].resources[0]);
}

TEST_CASE("ontology path parsing")
{
    CHECK(OntologyPath::parse("a/b/c").depth() == 3);
    CHECK(OntologyPath::parse("").empty());
    CHECK_THROWS_AS(OntologyPath::parse("a//b"), Error);
    CHECK_THROWS_AS(OntologyPath::parse("a/b/c/d/e/f"), Error);
    CHECK(OntologyPath::parse("a/b/c").starts_with(OntologyPath::parse("a/b")));
    CHECK_FALSE(OntologyPath::parse("a/bb").starts_with(OntologyPath::parse("a/b")));
}

TEST_CASE("serialize")
{
    SUBCASE("empty site gives a minimal document")
    {
        SiteDescriptor s;
        s.id = "min";
        s.name = "Minimal";
        s.bounds = Box3 {1, 1, 1};
        const auto doc = nlohmann::json::parse(serialize(s));
        CHECK(doc == nlohmann::json::parse(
                         R"({"id":"min","name":"Minimal","bounds":{"w":1.0,"d":1.0,"h":1.0},"departments":[]})"));
    }
    SUBCASE("compartment offsets are preserved field by field")
    {
        const auto site = sim::build_demo_site();
        const auto back = parse_descriptor(serialize(site));
        for (std::size_t a = 0; a < 3; ++a) {
            const auto& orig = site.departments[0].assets[a];
            const auto& copy = back.departments[0].assets[a];
            REQUIRE(orig.resources.size() == copy.resources.size());
            for (std::size_t r = 0; r < orig.resources.size(); ++r) {
                REQUIRE(orig.resources[r].offset.has_value() == copy.resources[r].offset.has_value());
                if (orig.resources[r].offset) {
                    CHECK(orig.resources[r].offset->x == copy.resources[r].offset->x);
                    CHECK(orig.resources[r].offset->y == copy.resources[r].offset->y);
                    CHECK(orig.resources[r].offset->z == copy.resources[r].offset->z);
                }
            }
        }
    }
    SUBCASE("demo round trip")
    {
        const auto site = sim::build_demo_site();
        CHECK(parse_descriptor(serialize(site)) == site);
    }
}

TEST_CASE("property: random descriptors round-trip and resolve exactly their own paths")
{
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        const auto site = testing::random_descriptor(rng);
        REQUIRE(validate(site).empty());
        REQUIRE(parse_descriptor(serialize(site, i % 2 ? 2 : -1)) == site);

        // every walked path resolves; corrupting any one segment does not
        std::vector<OntologyPath> walked {OntologyPath({site.id})};
        for (const auto& d : site.departments) {
            walked.emplace_back(std::vector<std::string> {site.id, d.id});
            for (const auto& a : d.assets) {
                walked.emplace_back(std::vector<std::string> {site.id, d.id, a.id});
            }
        }
        for (const auto& p : data_paths(site)) {
            walked.push_back(p);
        }
        for (const auto& p : walked) {
            CHECK(std::holds_alternative<NodeRef>(try_resolve(site, p)));
            auto segs = p.segments();
            const auto k = static_cast<std::size_t>(testing::pick(rng, 0, static_cast<int>(segs.size()) - 1));
            segs[k] += "~";
            const auto miss = try_resolve(site, OntologyPath(segs));
            REQUIRE(std::holds_alternative<Unresolved>(miss));
            CHECK(std::get<Unresolved>(miss).depth == k + 1);
        }
    }
}

TEST_CASE("property: each mutation is reported at the mutated path")
{
    std::mt19937_64 rng(11);
    for (int i = 0; i < 300; ++i) {
        auto site = testing::random_descriptor(rng);
        const auto path = testing::mutate(rng, site);
        const auto report = validate(site);
        bool found = false;
        for (const auto& v : report) {
            found |= v.path == path;
        }
        CHECK_MESSAGE(found, "mutation at " << path.str() << " not reported:\n" << format_report(report));
    }
}
