#pragma once

#include "biharm/geometry.hpp"
#include "biharm/mesh.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace testing_support {

using biharm::Vec3;

inline std::mt19937_64& rng() {
    static std::mt19937_64 gen(20240607);
    return gen;
}

inline double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng()); }

inline Vec3 random_unit_vector() {
    std::normal_distribution<double> g;
    Vec3 v(g(rng()), g(rng()), g(rng()));
    return v.normalized();
}

/// Random point on the torus with radii (4, 1).
inline Vec3 random_torus_point() {
    const double theta = uniform(0.0, 2.0 * std::numbers::pi);
    const double phi = uniform(0.0, 2.0 * std::numbers::pi);
    const double rho = 4.0 + std::cos(theta);
    return {rho * std::cos(phi), rho * std::sin(phi), std::sin(theta)};
}

/// Random point on the heart surface (x - z^2)^2 + y^2 + z^2 = 1.
inline Vec3 random_heart_point() {
    const Vec3 s = random_unit_vector();
    return {s.x() + s.z() * s.z(), s.y(), s.z()};
}

/// Two triangles in the z = 0 plane sharing the diagonal of the unit square.
inline biharm::TriMesh planar_square() {
    return biharm::TriMesh({Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0)}, {{0, 1, 2}, {0, 2, 3}},
                           biharm::Topology::AllowBoundary);
}

/// Regular hexagonal patch of six triangles around the origin plus an outer
/// ring, all in the z = 0 plane (19 vertices, open mesh).
inline biharm::TriMesh planar_hex_patch(double scale = 1.0) {
    std::vector<Vec3> v;
    std::vector<biharm::Triangle> t;
    // Axial hexagonal coordinates up to radius 2 mapped to the plane.
    auto index_of = [&](int q, int r) -> int {
        const Vec3 p = scale * Vec3(q + 0.5 * r, 0.5 * std::sqrt(3.0) * r, 0.0);
        for (std::size_t i = 0; i < v.size(); ++i) {
            if ((v[i] - p).norm() < 1e-12) return static_cast<int>(i);
        }
        v.push_back(p);
        return static_cast<int>(v.size()) - 1;
    };
    index_of(0, 0);
    for (int q = -2; q <= 2; ++q) {
        for (int r = -2; r <= 2; ++r) {
            auto inside = [](int a, int b) { return std::abs(a) <= 2 && std::abs(b) <= 2 && std::abs(a + b) <= 2; };
            if (inside(q, r) && inside(q + 1, r) && inside(q, r + 1)) {
                t.push_back({index_of(q, r), index_of(q + 1, r), index_of(q, r + 1)});
            }
            if (inside(q + 1, r) && inside(q + 1, r + 1) && inside(q, r + 1)) {
                t.push_back({index_of(q + 1, r), index_of(q + 1, r + 1), index_of(q, r + 1)});
            }
        }
    }
    return biharm::TriMesh(std::move(v), std::move(t), biharm::Topology::AllowBoundary);
}

inline double order(double e_prev, double e_cur, double h_prev, double h_cur) {
    return std::log(e_prev / e_cur) / std::log(h_prev / h_cur);
}

} // namespace testing_support
