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

#include <algorithm>
#include <cmath>

// Site frame: right-handed, origin at one floor corner, meters. x runs along
// the site width, y along its depth, z up.

namespace floorsight {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Vec3&, const Vec3&) = default;

    friend Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }

    double norm() const { return std::sqrt(x * x + y * y + z * z); }
    double floor_norm() const { return std::hypot(x, y); }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

/// Axis-aligned extent anchored at the site origin.
struct Box3 {
    double w = 0.0; // along x
    double d = 0.0; // along y
    double h = 0.0; // along z

    friend bool operator==(const Box3&, const Box3&) = default;

    bool contains(const Vec3& p) const
    {
        return p.finite() && p.x >= 0.0 && p.x <= w && p.y >= 0.0 && p.y <= d && p.z >= 0.0 && p.z <= h;
    }
};

/// Floor-plane rectangle; (x, y) is the minimum corner.
struct Rect2 {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double d = 0.0;

    friend bool operator==(const Rect2&, const Rect2&) = default;

    bool contains(double px, double py) const { return px >= x && px <= x + w && py >= y && py <= y + d; }

    bool inside(const Box3& box) const
    {
        return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) && std::isfinite(d) && x >= 0.0 &&
               y >= 0.0 && x + w <= box.w && y + d <= box.d;
    }

    /// Floor-plane distance from a point to the rectangle; zero inside.
    double distance_to(double px, double py) const
    {
        const double dx = std::max({x - px, 0.0, px - (x + w)});
        const double dy = std::max({y - py, 0.0, py - (y + d)});
        return std::hypot(dx, dy);
    }
};

} // namespace floorsight
