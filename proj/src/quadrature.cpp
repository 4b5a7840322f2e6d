#include "biharm/quadrature.hpp"

#include "biharm/errors.hpp"

namespace biharm {

namespace {

void add_orbit3(TriangleRule& r, double a, double w) {
    const double b = 1.0 - 2.0 * a;
    r.points.push_back({a, a, b});
    r.points.push_back({a, b, a});
    r.points.push_back({b, a, a});
    r.weights.insert(r.weights.end(), 3, w);
}

void add_orbit6(TriangleRule& r, double a, double b, double w) {
    const double c = 1.0 - a - b;
    r.points.push_back({a, b, c});
    r.points.push_back({a, c, b});
    r.points.push_back({b, a, c});
    r.points.push_back({b, c, a});
    r.points.push_back({c, a, b});
    r.points.push_back({c, b, a});
    r.weights.insert(r.weights.end(), 6, w);
}

TriangleRule centroid_rule() {
    TriangleRule r;
    r.degree = 1;
    r.points.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
    r.weights.push_back(1.0);
    return r;
}

TriangleRule three_point_rule() {
    TriangleRule r;
    r.degree = 2;
    add_orbit3(r, 1.0 / 6.0, 1.0 / 3.0);
    return r;
}

// Dunavant's 6-point rule.
TriangleRule six_point_rule() {
    TriangleRule r;
    r.degree = 4;
    add_orbit3(r, 0.44594849091596488632, 0.22338158967801146570);
    add_orbit3(r, 0.09157621350977074346, 0.10995174365532186764);
    return r;
}

// Dunavant's 12-point rule.
TriangleRule twelve_point_rule() {
    TriangleRule r;
    r.degree = 6;
    add_orbit3(r, 0.24928674517091042129, 0.11678627572637936603);
    add_orbit3(r, 0.06308901449150222834, 0.05084490637020681692);
    add_orbit6(r, 0.05314504984481694735, 0.31035245103378440542, 0.08285107561837357519);
    return r;
}

} // namespace

const TriangleRule& triangle_rule(int degree) {
    static const TriangleRule rules[] = {centroid_rule(), three_point_rule(), six_point_rule(),
                                         twelve_point_rule()};
    if (degree < 1 || degree > 6) {
        throw PreconditionError("no triangle rule for degree " + std::to_string(degree));
    }
    for (const auto& r : rules) {
        if (r.degree >= degree) return r;
    }
    return rules[3];
}

} // namespace biharm
