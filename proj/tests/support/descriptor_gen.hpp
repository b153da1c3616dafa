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

// Random descriptor generation and targeted invariant mutations for
// property tests.

#include <random>
#include <string>
#include <vector>

#include "floorsight/ontology.hpp"

namespace floorsight::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi)
{
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int pick(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline std::string random_name(std::mt19937_64& rng)
{
    static const std::vector<std::string> pieces {"Tank", "tunnel", "Zone \"B\"", "Kühlraum", "line\\2", "混合", " ", "#7"};
    std::string out;
    const int n = pick(rng, 0, 3);
    for (int i = 0; i < n; ++i) {
        out += pieces[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(pieces.size()) - 1))];
    }
    return out;
}

inline nlohmann::json random_extras(std::mt19937_64& rng)
{
    nlohmann::json extras = nlohmann::json::object();
    if (pick(rng, 0, 3) == 0) {
        extras["manufacturer"] = random_name(rng);
    }
    if (pick(rng, 0, 5) == 0) {
        extras["photos"] = nlohmann::json::array({"a.jpg", pick(rng, 0, 100)});
    }
    return extras;
}

/// A descriptor satisfying every invariant.
inline SiteDescriptor random_descriptor(std::mt19937_64& rng, const std::string& site_id = "")
{
    SiteDescriptor s;
    s.id = site_id.empty() ? "site-" + std::to_string(pick(rng, 0, 999)) : site_id;
    s.name = random_name(rng);
    s.bounds = Box3 {uniform(rng, 5.0, 120.0), uniform(rng, 5.0, 60.0), uniform(rng, 2.0, 20.0)};
    s.extras = random_extras(rng);
    const int n_dept = pick(rng, 0, 4);
    for (int di = 0; di < n_dept; ++di) {
        Department d;
        d.id = "d" + std::to_string(di);
        d.name = random_name(rng);
        const double x = uniform(rng, 0.0, s.bounds.w * 0.5);
        const double y = uniform(rng, 0.0, s.bounds.d * 0.5);
        d.footprint = Rect2 {x, y, uniform(rng, 0.1, (s.bounds.w - x) * 0.999), uniform(rng, 0.1, (s.bounds.d - y) * 0.999)};
        d.extras = random_extras(rng);
        const int n_asset = pick(rng, 0, 4);
        for (int ai = 0; ai < n_asset; ++ai) {
            Asset a;
            a.id = "a" + std::to_string(ai);
            a.name = random_name(rng);
            a.kind = static_cast<AssetKind>(pick(rng, 0, 5));
            a.position = Vec3 {uniform(rng, 1.0, s.bounds.w - 1.0 > 1.0 ? s.bounds.w - 1.0 : 1.0),
                uniform(rng, 1.0, s.bounds.d - 1.0 > 1.0 ? s.bounds.d - 1.0 : 1.0),
                uniform(rng, 0.0, s.bounds.h * 0.5)};
            if (pick(rng, 0, 4) == 0) {
                a.awareness.r_prox_enter = uniform(rng, 4.0, 9.0);
                a.awareness.r_prox_exit = *a.awareness.r_prox_enter + uniform(rng, 0.0, 3.0);
            }
            if (pick(rng, 0, 6) == 0) {
                a.awareness.fov_half_angle = uniform(rng, 0.1, 3.0);
            }
            a.extras = random_extras(rng);
            const int n_res = pick(rng, 0, 3);
            for (int ri = 0; ri < n_res; ++ri) {
                Resource r;
                r.id = "r" + std::to_string(ri);
                r.name = random_name(rng);
                if (pick(rng, 0, 1) == 0) {
                    r.offset = Vec3 {uniform(rng, -0.9, 0.9), uniform(rng, -0.9, 0.9), uniform(rng, 0.0, 0.9)};
                }
                r.extras = random_extras(rng);
                const int n_data = pick(rng, 0, 3);
                for (int k = 0; k < n_data; ++k) {
                    DataNode dn;
                    dn.id = "x" + std::to_string(k);
                    dn.name = random_name(rng);
                    dn.unit = static_cast<Unit>(pick(rng, 0, 6));
                    dn.semantic = static_cast<Semantic>(pick(rng, 0, 3));
                    dn.extras = random_extras(rng);
                    r.data.push_back(std::move(dn));
                }
                a.resources.push_back(std::move(r));
            }
            d.assets.push_back(std::move(a));
        }
        s.departments.push_back(std::move(d));
    }
    return s;
}

/// Breaks one invariant and returns the path the violation must be reported at.
inline OntologyPath mutate(std::mt19937_64& rng, SiteDescriptor& s)
{
    const OntologyPath site_path({s.id});
    std::vector<int> options {0, 1}; // site bounds, bad department id (adds one if needed)
    bool has_asset = false, has_resource = false, has_sibling_assets = false, has_data = false;
    for (const auto& d : s.departments) {
        has_asset |= !d.assets.empty();
        has_sibling_assets |= d.assets.size() >= 2;
        for (const auto& a : d.assets) {
            has_resource |= !a.resources.empty();
            for (const auto& r : a.resources) {
                has_data |= !r.data.empty();
            }
        }
    }
    if (!s.departments.empty()) options.push_back(2);
    if (has_asset) options.push_back(3);
    if (has_resource) options.push_back(4);
    if (has_sibling_assets) options.push_back(5);
    if (has_data) options.push_back(6);
    if (s.departments.size() >= 2) options.push_back(7);

    const int choice = options[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(options.size()) - 1))];
    auto any_dept = [&]() -> Department& {
        return s.departments[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(s.departments.size()) - 1))];
    };
    switch (choice) {
    case 0: {
        const int axis = pick(rng, 0, 2);
        const double bad = pick(rng, 0, 1) ? 0.0 : -uniform(rng, 0.1, 10.0);
        (axis == 0 ? s.bounds.w : axis == 1 ? s.bounds.d : s.bounds.h) = bad;
        return site_path;
    }
    case 1: {
        Department d;
        d.id = pick(rng, 0, 1) ? "bad id" : "";
        d.footprint = Rect2 {0.0, 0.0, 1.0, 1.0};
        s.departments.push_back(d);
        return site_path.child(d.id);
    }
    case 2: {
        auto& d = any_dept();
        d.footprint.w = s.bounds.w - d.footprint.x + uniform(rng, 0.5, 10.0);
        return site_path.child(d.id);
    }
    case 3: {
        for (;;) {
            auto& d = any_dept();
            if (d.assets.empty()) continue;
            auto& a = d.assets[static_cast<std::size_t>(pick(rng, 0, static_cast<int>(d.assets.size()) - 1))];
            if (pick(rng, 0, 1)) {
                a.position.x = s.bounds.w + uniform(rng, 0.1, 20.0);
            }
            else {
                a.position.z = -uniform(rng, 0.1, 5.0);
            }
            return site_path.child(d.id).child(a.id);
        }
    }
    case 4: {
        for (;;) {
            auto& d = any_dept();
            for (auto& a : d.assets) {
                if (a.resources.empty()) continue;
                auto& r = a.resources.front();
                r.offset = Vec3 {0.0, 0.0, s.bounds.h + uniform(rng, 0.5, 5.0)};
                return site_path.child(d.id).child(a.id).child(r.id);
            }
        }
    }
    case 5: {
        for (;;) {
            auto& d = any_dept();
            if (d.assets.size() < 2) continue;
            d.assets[1].id = d.assets[0].id;
            return site_path.child(d.id).child(d.assets[0].id);
        }
    }
    case 6: {
        for (;;) {
            auto& d = any_dept();
            for (auto& a : d.assets) {
                for (auto& r : a.resources) {
                    if (r.data.empty()) continue;
                    r.data.front().id = "bad/id";
                    return site_path.child(d.id).child(a.id).child(r.id).child("bad/id");
                }
            }
        }
    }
    default: {
        s.departments[1].id = s.departments[0].id;
        return site_path.child(s.departments[0].id);
    }
    }
}

} // namespace floorsight::testing
