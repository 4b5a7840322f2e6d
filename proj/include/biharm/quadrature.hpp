#pragma once

#include <array>
#include <vector>

namespace biharm {

/// Symmetric quadrature rule on a triangle: barycentric points and weights
/// normalised to sum to one (multiply by the triangle area).
struct TriangleRule {
    int degree = 0;
    std::vector<std::array<double, 3>> points;
    std::vector<double> weights;

    int size() const noexcept { return static_cast<int>(weights.size()); }
};

/// Cheapest available rule exact for polynomials of total degree `degree`
/// (1 <= degree <= 6): centroid, 3-point, 6-point (degree 4), 12-point (degree 6).
const TriangleRule& triangle_rule(int degree);

} // namespace biharm
