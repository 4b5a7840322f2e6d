#include "biharm/assembly.hpp"
#include "biharm/errors.hpp"
#include "biharm/solve.hpp"

#include "dense_oracle.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace biharm;
using testing_support::uniform;

namespace {

Vector random_vector(Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(-1.0, 1.0);
    return v;
}

Vector mean_free(Vector v, const Vector& c) {
    v.array() -= c.dot(v) / c.sum();
    return v;
}

SparseMatrix stiffness(const TriMesh& m, RecoveryBackend backend, const PenaltyParams& p = {}) {
    return assemble_stiffness(m, build_recovery(m, backend), build_operators(m), p);
}

} // namespace

TEST_CASE("operator-composition stiffness equals the dense term-by-term oracle") {
    const std::vector<TriMesh> meshes = {icosphere(0), icosphere(1), torus_grid(4), torus_grid(5)};
    const PenaltyParams local{};
    const PenaltyParams global{7.5, 2.0, PenaltyScaling::Global};
    for (const TriMesh& m : meshes) {
        for (auto backend : {RecoveryBackend::WA, RecoveryBackend::PPPR}) {
            const RecoveryMatrix G = build_recovery(m, backend);
            for (const auto& p : {local, global}) {
                const Eigen::MatrixXd A = Eigen::MatrixXd(assemble_stiffness(m, G, build_operators(m), p));
                const Eigen::MatrixXd ref = oracle::dense_stiffness(m, G, p);
                CHECK((A - ref).cwiseAbs().maxCoeff() <= 1e-10);
            }
        }
    }
}

TEST_CASE("stiffness structure") {
    for (const TriMesh& m : {icosphere(2), torus_grid(8), project_vertices(icosphere(2), make_heart())}) {
        for (auto backend : {RecoveryBackend::WA, RecoveryBackend::PPPR}) {
            const SparseMatrix A = stiffness(m, backend);
            const double amax = A.coeffs().cwiseAbs().maxCoeff();
            CHECK(SparseMatrix(A - SparseMatrix(A.transpose())).coeffs().cwiseAbs().maxCoeff() <= 1e-12 * amax);
            CHECK((A * Vector::Ones(A.cols())).norm() <= 1e-10 * Eigen::MatrixXd(A).norm());
            const Vector c = constraint_vector(m);
            for (int trial = 0; trial < 20; ++trial) {
                const Vector v = mean_free(random_vector(A.cols()), c);
                CHECK(v.dot(A * v) > 0.0);
            }
        }
    }
}

TEST_CASE("element-wise Green identity pins the flux jump") {
    // sum_T int (div w) v + int w . grad v = sum_E int J_E(w) v for continuous
    // P1 fields w (3N) and v (N).
    for (const TriMesh& m : {icosphere(2), torus_grid(7), project_vertices(icosphere(1), make_heart())}) {
        const DiscreteOperators ops = build_operators(m);
        for (int trial = 0; trial < 5; ++trial) {
            const Vector w = random_vector(3 * m.num_vertices());
            const Vector v = random_vector(m.num_vertices());
            const Vector div = ops.divergence * w;
            double lhs = 0.0, scale = 0.0;
            for (int f = 0; f < m.num_faces(); ++f) {
                const auto& t = m.triangle(f);
                const double v_mean = (v[t[0]] + v[t[1]] + v[t[2]]) / 3.0;
                Vec3 grad_v = Vec3::Zero(), w_mean = Vec3::Zero();
                for (int k = 0; k < 3; ++k) {
                    grad_v += v[t[k]] * m.hat_gradient(f, k);
                    w_mean += w.segment<3>(3 * t[k]) / 3.0;
                }
                lhs += m.area(f) * (div[f] * v_mean + w_mean.dot(grad_v));
                scale += m.area(f) * (std::abs(div[f] * v_mean) + std::abs(w_mean.dot(grad_v)));
            }
            Vector v_ends(2 * m.num_edges());
            for (int e = 0; e < m.num_edges(); ++e) {
                v_ends[2 * e] = v[m.edge(e).v[0]];
                v_ends[2 * e + 1] = v[m.edge(e).v[1]];
            }
            const double rhs = (ops.jump * w).dot(ops.edge_mass * v_ends);
            CHECK(std::abs(lhs - rhs) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("elementary operator invariants") {
    const TriMesh m = icosphere(2);
    const DiscreteOperators ops = build_operators(m);
    Vector w(3 * m.num_vertices());
    for (int i = 0; i < m.num_vertices(); ++i) w.segment<3>(3 * i) = Vec3(0.3, -1.0, 2.0);
    CHECK((ops.divergence * w).cwiseAbs().maxCoeff() < 1e-12);

    const Eigen::MatrixXd block = Eigen::MatrixXd(ops.edge_mass).topLeftCorner(2, 2);
    CHECK(block(0, 1) == doctest::Approx(block(1, 0)));
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(block).eigenvalues().minCoeff() > 0.0);

    // Mvec reproduces the L2 product of P1 vector fields: constant field c has |c|^2 |S_h|.
    CHECK(w.dot(ops.vector_mass * w) == doctest::Approx(Vec3(0.3, -1.0, 2.0).squaredNorm() * m.total_area()).epsilon(1e-12));
}

TEST_CASE("flux jump vanishes across a flat edge") {
    const TriMesh m = testing_support::planar_square();
    // Operators need a closed mesh; check the jump row of the one interior edge directly.
    CHECK_THROWS_AS(build_operators(m), NonManifoldMesh);
    for (int e = 0; e < m.num_edges(); ++e) {
        if (m.edge(e).is_boundary()) continue;
        const Vec3 s = m.conormal_plus(e) + m.conormal_minus(e);
        const Vec3 w0(0.2, 1.0, -0.4), w1(-1.0, 0.5, 3.0);
        CHECK(std::abs(w0.dot(s)) < 1e-12);
        CHECK(std::abs(w1.dot(s)) < 1e-12);
    }
}

TEST_CASE("penalty parameters") {
    const TriMesh m = icosphere(1);
    const RecoveryMatrix G = build_wa(m);
    const DiscreteOperators ops = build_operators(m);
    CHECK_THROWS_AS(assemble_stiffness(m, G, ops, {0.0, 1.0, PenaltyScaling::Local}), ParameterOutOfRange);
    CHECK_THROWS_AS(assemble_stiffness(m, G, ops, {10.0, -1.0, PenaltyScaling::Local}), ParameterOutOfRange);
    CHECK(parse_penalty_scaling("global") == PenaltyScaling::Global);
    CHECK_THROWS_AS(parse_penalty_scaling("edge"), PreconditionError);

    const Vector v = random_vector(m.num_vertices());
    double prev = -1e300;
    for (double gamma : {1.0, 5.0, 10.0, 40.0}) {
        const double e = v.dot(assemble_stiffness(m, G, ops, {gamma, 1.0, PenaltyScaling::Local}) * v);
        CHECK(e >= prev);
        prev = e;
    }
}

TEST_CASE("load vector") {
    const TriMesh m = icosphere(3);
    const auto sphere = make_sphere();
    const auto zero = assemble_load(m, sphere, [](const Vec3&) { return 0.0; });
    CHECK(zero.b.cwiseAbs().maxCoeff() == 0.0);
    const auto one = assemble_load(m, sphere, [](const Vec3&) { return 1.0; });
    CHECK(one.b.cwiseAbs().maxCoeff() < 1e-15);
    CHECK(one.c.sum() == doctest::Approx(m.total_area()).epsilon(1e-12));

    const auto load = assemble_load(m, sphere, [](const Vec3& y) { return 36.0 * y.x() * y.y(); });
    CHECK(std::abs(load.b.sum()) <= 1e-10 * load.b.norm());
    CHECK(load.b.norm() > 1e-3);
    const auto jet_load = assemble_load(m, sphere, solution_by_name("xy"));
    CHECK((jet_load.b - load.b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("jump energy of exact gradient samples shrinks with h squared") {
    const auto sphere = make_sphere();
    const auto u = solution_by_name("xy");
    double prev = 0.0;
    for (int level = 2; level <= 4; ++level) {
        const TriMesh m = icosphere(level);
        const double e = jump_energy(build_operators(m), sample_surface_gradient(m, sphere, u));
        if (level > 2) {
            CHECK(prev / e >= 3.4);
            CHECK(prev / e <= 4.6);
        }
        prev = e;
    }
}
