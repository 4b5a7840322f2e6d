#include "biharm/errors.hpp"
#include "biharm/quadrature.hpp"

#include <doctest.h>

#include <cmath>

using biharm::triangle_rule;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// Integral of x^a y^b over the reference triangle (0,0), (1,0), (0,1).
double exact_monomial(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }

} // namespace

TEST_CASE("triangle rules integrate monomials up to their degree") {
    for (int degree = 1; degree <= 6; ++degree) {
        const auto& rule = triangle_rule(degree);
        CHECK(rule.degree >= degree);
        double wsum = 0.0;
        for (double w : rule.weights) wsum += w;
        CHECK(wsum == doctest::Approx(1.0).epsilon(1e-15));
        for (int a = 0; a <= degree; ++a) {
            for (int b = 0; a + b <= degree; ++b) {
                double q = 0.0;
                for (int i = 0; i < rule.size(); ++i) {
                    const auto& l = rule.points[i];
                    q += 0.5 * rule.weights[i] * std::pow(l[1], a) * std::pow(l[2], b);
                }
                CHECK(std::abs(q - exact_monomial(a, b)) < 1e-14);
            }
        }
    }
}

TEST_CASE("the degree 4 rule has six points and is not exact for degree 5") {
    const auto& rule = triangle_rule(4);
    CHECK(rule.size() == 6);
    double q = 0.0;
    for (int i = 0; i < rule.size(); ++i) q += 0.5 * rule.weights[i] * std::pow(rule.points[i][1], 5);
    CHECK(std::abs(q - exact_monomial(5, 0)) > 1e-8);
}

TEST_CASE("unsupported degrees") {
    CHECK_THROWS_AS(triangle_rule(0), biharm::PreconditionError);
    CHECK_THROWS_AS(triangle_rule(7), biharm::PreconditionError);
}
