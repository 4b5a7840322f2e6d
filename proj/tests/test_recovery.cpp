#include "biharm/errors.hpp"
#include "biharm/recovery.hpp"
#include "biharm/solve.hpp"

#include "dense_oracle.hpp"
#include "support.hpp"

#include <doctest.h>

#include <set>

using namespace biharm;
using testing_support::uniform;

namespace {

Vector random_vector(int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(-1.0, 1.0);
    return v;
}

Vec3 at(const Vector& w, int p) { return w.segment<3>(3 * p); }

std::set<int> rings(const TriMesh& m, int p, int depth) {
    std::set<int> out{p};
    for (int d = 0; d < depth; ++d) {
        std::set<int> next = out;
        for (int q : out) {
            for (int r : m.vertex_neighbors(q)) next.insert(r);
        }
        out = std::move(next);
    }
    return out;
}

} // namespace

TEST_CASE("backend names") {
    CHECK(parse_recovery_backend("wa") == RecoveryBackend::WA);
    CHECK(parse_recovery_backend("pppr") == RecoveryBackend::PPPR);
    CHECK(to_string(RecoveryBackend::PPPR) == "pppr");
    CHECK_THROWS_AS(parse_recovery_backend("spr"), PreconditionError);
}

TEST_CASE("both backends annihilate constants") {
    for (const TriMesh& m : {icosphere(2), torus_grid(8), icosphere(0)}) {
        for (auto backend : {RecoveryBackend::WA, RecoveryBackend::PPPR}) {
            const RecoveryMatrix G = build_recovery(m, backend);
            CHECK(G.matrix.rows() == 3 * m.num_vertices());
            CHECK(G.matrix.cols() == m.num_vertices());
            CHECK(G.backend == backend);
            CHECK(G.apply(Vector::Ones(m.num_vertices())).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("WA reproduces the gradient of a planar linear function") {
    const TriMesh m = testing_support::planar_hex_patch();
    Vector v(m.num_vertices());
    for (int i = 0; i < m.num_vertices(); ++i) v[i] = m.vertex(i).x();
    const Vector g = build_wa(m).apply(v);
    for (int p = 0; p < m.num_vertices(); ++p) CHECK((at(g, p) - Vec3(1, 0, 0)).norm() < 1e-13);
}

TEST_CASE("WA weights the face gradients by area") {
    // Node 0 touches two faces with areas 1 and 1.5.
    const std::vector<Vec3> x = {Vec3(0, 0, 0), Vec3(2, 0, 0), Vec3(0, 1, 0), Vec3(-3, -1, 0)};
    const TriMesh m(x, {{0, 1, 2}, {0, 2, 3}}, Topology::AllowBoundary);
    REQUIRE(m.area(0) == doctest::Approx(1.0));
    REQUIRE(m.area(1) == doctest::Approx(1.5));
    const Vector v = random_vector(4);
    auto face_gradient = [&](const Triangle& t) {
        const auto g = oracle::barycentric_gradients(x[t[0]], x[t[1]], x[t[2]]);
        return Vec3(v[t[0]] * g[0] + v[t[1]] * g[1] + v[t[2]] * g[2]);
    };
    const Vec3 expected = (face_gradient({0, 1, 2}) + 1.5 * face_gradient({0, 2, 3})) / 2.5;
    CHECK((at(build_wa(m).apply(v), 0) - expected).norm() < 1e-14);
}

TEST_CASE("WA matrix equals direct nodal averaging") {
    const TriMesh m = torus_grid(6);
    const Vector v = random_vector(m.num_vertices());
    const Vector g = build_wa(m).apply(v);
    for (int p = 0; p < m.num_vertices(); ++p) {
        Vec3 sum = Vec3::Zero();
        double area = 0.0;
        for (int f = 0; f < m.num_faces(); ++f) {
            const auto& t = m.triangle(f);
            if (t[0] != p && t[1] != p && t[2] != p) continue;
            const auto gr = oracle::barycentric_gradients(m.vertex(t[0]), m.vertex(t[1]), m.vertex(t[2]));
            const double a = 0.5 * (m.vertex(t[1]) - m.vertex(t[0])).cross(m.vertex(t[2]) - m.vertex(t[0])).norm();
            sum += a * (v[t[0]] * gr[0] + v[t[1]] * gr[1] + v[t[2]] * gr[2]);
            area += a;
        }
        CHECK((at(g, p) - sum / area).norm() < 1e-13 * std::max(1.0, sum.norm() / area));
    }
}

TEST_CASE("PPPR is exact for quadratics on a planar patch") {
    const TriMesh m = testing_support::planar_hex_patch(0.3);
    auto q = [](const Vec3& p) { return 0.4 + 1.5 * p.x() - 0.7 * p.y() + 2.0 * p.x() * p.x() - 1.1 * p.x() * p.y() + 0.6 * p.y() * p.y(); };
    auto dq = [](const Vec3& p) {
        return Vec3(1.5 + 4.0 * p.x() - 1.1 * p.y(), -0.7 - 1.1 * p.x() + 1.2 * p.y(), 0.0);
    };
    Vector v(m.num_vertices());
    for (int i = 0; i < m.num_vertices(); ++i) v[i] = q(m.vertex(i));
    const Vector g = build_pppr(m).apply(v);
    for (int p = 0; p < m.num_vertices(); ++p) CHECK((at(g, p) - dq(m.vertex(p))).norm() < 1e-10);
}

TEST_CASE("PPPR is exact for quadratics over a quadratic graph") {
    // Surface z = s(x, y); with the exact normal at the apex the height is an
    // exact quadratic in the tangent frame there.
    auto s = [](auto x, auto y) { return 0.3 * x * x - 0.2 * x * y + 0.1 * y * y; };
    const LevelSetSurface graph("graph", AmbientScalarField::from("graph", [s](auto x, auto y, auto z) { return z - s(x, y); }),
                                {Vec3::Constant(-2.0), Vec3::Constant(2.0)});
    const TriMesh flat = testing_support::planar_hex_patch(0.25);
    std::vector<Vec3> x = flat.vertices();
    for (auto& p : x) p.z() = s(p.x(), p.y());
    const TriMesh m(x, flat.triangles(), Topology::AllowBoundary);

    // v restricted to the surface is a quadratic in (x, y).
    Vector v(m.num_vertices());
    for (int i = 0; i < m.num_vertices(); ++i) v[i] = 1.0 + 0.5 * x[i].x() - 2.0 * x[i].y() + x[i].x() * x[i].y();
    const Vector g = build_pppr(m, &graph).apply(v);
    // At the apex the surface gradient equals the planar gradient (0.5, -2, 0).
    CHECK((at(g, 0) - Vec3(0.5, -2.0, 0.0)).norm() < 1e-10);
}

TEST_CASE("recovery stencils are local") {
    const TriMesh m = icosphere(2);
    const RecoveryMatrix wa = build_wa(m);
    const RecoveryMatrix pppr = build_pppr(m);
    for (int p = 0; p < m.num_vertices(); p += 7) {
        const auto one = rings(m, p, 1);
        const auto four = rings(m, p, 4);
        for (int k = 0; k < 3; ++k) {
            for (SparseRowMatrix::InnerIterator it(wa.matrix, 3 * p + k); it; ++it) CHECK(one.count(static_cast<int>(it.col())));
            for (SparseRowMatrix::InnerIterator it(pppr.matrix, 3 * p + k); it; ++it) CHECK(four.count(static_cast<int>(it.col())));
        }
    }
}

TEST_CASE("PPPR reports patches that cannot support a quadratic fit") {
    const TriMesh m = testing_support::planar_square();
    CHECK_THROWS_AS(build_pppr(m), RankDeficientPatch);
}

TEST_CASE("recovered exact interpolant converges on the sphere") {
    const auto sphere = make_sphere();
    const auto u = solution_by_name("xy");
    for (auto backend : {RecoveryBackend::WA, RecoveryBackend::PPPR}) {
        double prev_e = 0.0, prev_h = 0.0;
        for (int level = 2; level <= 4; ++level) {
            const TriMesh m = icosphere(level);
            const ErrorNorms n = error_norms(m, sphere, u, interpolate(m, u), build_recovery(m, backend));
            if (level > 2) CHECK(testing_support::order(prev_e, n.Dre, prev_h, m.h()) >= 1.8);
            prev_e = n.Dre;
            prev_h = m.h();
        }
    }
}
