#include "biharm/solve.hpp"

#include "biharm/errors.hpp"
#include "biharm/parallel.hpp"
#include "biharm/quadrature.hpp"

#ifdef BIHARM_HAVE_CHOLMOD
#include <Eigen/CholmodSupport>
#else
#include <Eigen/SparseCholesky>
#endif

#include <cmath>
#include <cstdio>

namespace biharm {

namespace {

#ifdef BIHARM_HAVE_CHOLMOD
using Factorization = Eigen::CholmodSupernodalLLT<SparseMatrix, Eigen::Lower>;
constexpr const char* kMethod = "cholmod-supernodal";
#else
using Factorization = Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower>;
constexpr const char* kMethod = "eigen-simplicial";
#endif

using ExtendedVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

// r = b - lambda c - A u in extended precision. At fine levels the entries of
// A u cancel to far below the rounding of a double-precision product.
ExtendedVector extended_residual(const SparseMatrix& A, const ExtendedVector& u, double lambda,
                                 const Vector& c, const Vector& b) {
    ExtendedVector r = b.cast<long double>() - static_cast<long double>(lambda) * c.cast<long double>();
    for (Eigen::Index j = 0; j < A.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(A, j); it; ++it) {
            r[it.row()] -= static_cast<long double>(it.value()) * u[j];
        }
    }
    return r;
}

} // namespace

SolveResult solve_constrained(const AssembledSystem& system, const SolveOptions& options) {
    const auto& A = system.A;
    const auto& b = system.b;
    const auto& c = system.c;
    const Eigen::Index n = A.rows();
    if (A.cols() != n || b.size() != n || c.size() != n || n == 0) {
        throw PreconditionError("inconsistent system dimensions");
    }
    const double c_sum = c.sum();
    if (!(std::abs(c_sum) > 0.0)) throw PreconditionError("constraint vector must not sum to zero");

    SolveResult result;
    result.method = kMethod;
    const double b_norm = b.norm();
    if (b_norm == 0.0) {
        result.u = Vector::Zero(n);
        return result;
    }

    // Multiplying the first block row by 1^T (A 1 = 0) fixes the multiplier;
    // A u = b - lambda c is then consistent and its solutions differ by
    // constants. Adding alpha e_0 e_0^T removes the kernel and pins u_0 = 0.
    result.multiplier = b.sum() / c_sum;
    const Vector rhs = b - result.multiplier * c;

    SparseMatrix M = A;
    const double alpha = std::max(std::abs(A.coeff(0, 0)), 1.0);
    M.coeffRef(0, 0) += alpha;

    Factorization solver;
#ifdef BIHARM_HAVE_CHOLMOD
    // Failures are reported through SingularSystem, not CHOLMOD's own printing.
    solver.cholmod().print = 0;
#endif
    solver.compute(M);
    if (solver.info() != Eigen::Success) {
        throw SingularSystem("Cholesky factorization failed; the stiffness matrix is not positive "
                             "definite on mean-zero functions (gamma too small?)");
    }
    const Vector u0 = solver.solve(rhs);
    if (solver.info() != Eigen::Success || !u0.allFinite()) throw SingularSystem("triangular solve failed");

    // Iterative refinement keeps the iterate in long double: the rounding of
    // a double vector alone produces residuals near 1e-10 at 40k unknowns.
    const ExtendedVector c_ext = c.cast<long double>();
    const long double c_sum_ext = c_ext.sum();
    auto project_mean = [&](ExtendedVector& v) { v.array() -= c_ext.dot(v) / c_sum_ext; };
    auto relative = [&](const ExtendedVector& r) { return static_cast<double>(r.norm() / b_norm); };

    ExtendedVector u = u0.cast<long double>();
    project_mean(u);
    ExtendedVector r = extended_residual(A, u, result.multiplier, c, b);
    result.residual = relative(r);
    for (int step = 0; step < options.max_refinement_steps && result.residual > options.tolerance; ++step) {
        // The stored A annihilates constants only up to rounding, so the
        // multiplier is corrected alongside u to keep the system consistent.
        const long double dlambda = r.sum() / c_sum_ext;
        const double lambda = static_cast<double>(result.multiplier + dlambda);
        const Vector du = solver.solve(Vector((r - dlambda * c_ext).cast<double>()));
        ExtendedVector candidate = u + du.cast<long double>();
        project_mean(candidate);
        ExtendedVector candidate_r = extended_residual(A, candidate, lambda, c, b);
        const double res = relative(candidate_r);
        ++result.refinement_steps;
        if (!(res < result.residual)) break;
        u = std::move(candidate);
        r = std::move(candidate_r);
        result.multiplier = lambda;
        result.residual = res;
    }
    if (!(result.residual <= options.tolerance)) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.3e", result.residual);
        throw SingularSystem(std::string("relative residual ") + buf + " exceeds the tolerance");
    }
    result.u = u.cast<double>();
    result.rounded_residual = relative(extended_residual(A, result.u.cast<long double>(), result.multiplier, c, b));
    return result;
}

// ------------------------------------------------------------ error norms

Vector interpolate(const TriMesh& mesh, const AmbientScalarField& u) {
    Vector v(mesh.num_vertices());
    for (int i = 0; i < mesh.num_vertices(); ++i) v[i] = u(mesh.vertex(i));
    return v;
}

Vector sample_surface_gradient(const TriMesh& mesh, const LevelSetSurface& surface,
                               const AmbientScalarField& u) {
    Vector w(3 * mesh.num_vertices());
    parallel_for(mesh.num_vertices(), [&](int i) {
        w.segment<3>(3 * i) = surface_gradient_exact(surface, u, project(surface, mesh.vertex(i)));
    });
    return w;
}

ErrorNorms error_norms(const TriMesh& mesh, const LevelSetSurface& surface,
                       const AmbientScalarField& u_exact, const Vector& u_h,
                       const RecoveryMatrix& G, int quadrature_degree) {
    if (u_h.size() != mesh.num_vertices()) throw PreconditionError("u_h does not match the mesh");
    const TriangleRule& rule = triangle_rule(quadrature_degree);
    const Vector Gu = G.apply(u_h);
    const int nf = mesh.num_faces();
    const int nq = rule.size();

    struct FaceSums {
        double d2 = 0, d1 = 0, dr = 0;
        double u_int = 0, uh_int = 0;
    };
    std::vector<FaceSums> sums(nf);
    std::vector<double> diff(static_cast<std::size_t>(nf) * nq);

    parallel_for(nf, [&](int f) {
        const auto& tri = mesh.triangle(f);
        const double area = mesh.area(f);
        Vec3 grad_h = Vec3::Zero();
        double div_h = 0.0;
        std::array<Vec3, 3> corner;
        for (int k = 0; k < 3; ++k) {
            grad_h += u_h[tri[k]] * mesh.hat_gradient(f, k);
            corner[k] = Gu.segment<3>(3 * tri[k]);
            div_h += corner[k].dot(mesh.hat_gradient(f, k));
        }
        FaceSums& s = sums[f];
        for (int q = 0; q < nq; ++q) {
            const auto& l = rule.points[q];
            const double w = rule.weights[q] * area;
            const Vec3 x = l[0] * mesh.vertex(tri[0]) + l[1] * mesh.vertex(tri[1]) + l[2] * mesh.vertex(tri[2]);
            const Vec3 y = project(surface, x);
            const double ue = u_exact(y);
            const double uh = l[0] * u_h[tri[0]] + l[1] * u_h[tri[1]] + l[2] * u_h[tri[2]];
            const Vec3 gs = surface_gradient_exact(surface, u_exact, y);
            const double lb = laplace_beltrami_exact(surface, u_exact, y);
            const Vec3 gr = l[0] * corner[0] + l[1] * corner[1] + l[2] * corner[2];
            s.d2 += w * (lb - div_h) * (lb - div_h);
            s.d1 += w * (gs - grad_h).squaredNorm();
            s.dr += w * (gs - gr).squaredNorm();
            s.u_int += w * ue;
            s.uh_int += w * uh;
            diff[static_cast<std::size_t>(f) * nq + q] = ue - uh;
        }
    });

    FaceSums total;
    for (const auto& s : sums) {
        total.d2 += s.d2;
        total.d1 += s.d1;
        total.dr += s.dr;
        total.u_int += s.u_int;
        total.uh_int += s.uh_int;
    }
    const double mean_diff = (total.u_int - total.uh_int) / mesh.total_area();
    double e0 = 0.0;
    for (int f = 0; f < nf; ++f) {
        const double area = mesh.area(f);
        for (int q = 0; q < nq; ++q) {
            const double d = diff[static_cast<std::size_t>(f) * nq + q] - mean_diff;
            e0 += rule.weights[q] * area * d * d;
        }
    }
    return {std::sqrt(total.d2), std::sqrt(total.d1), std::sqrt(e0), std::sqrt(total.dr)};
}

double energy_seminorm(const TriMesh& mesh, const RecoveryMatrix& G, const DiscreteOperators& ops,
                       const Vector& v) {
    const Vector w = G.apply(v);
    const Vector div = ops.divergence * w;
    double bulk = 0.0;
    for (Eigen::Index f = 0; f < div.size(); ++f) bulk += ops.face_area[f] * div[f] * div[f];

    const Vector avg = ops.average * div;
    double average_term = 0.0;
    for (int e = 0; e < mesh.num_edges(); ++e) average_term += mesh.edge_length(e) * avg[e] * avg[e];
    average_term *= ops.h;

    const double jump_term = jump_energy(ops, w);
    const Vector r = ops.corner_gradient * v - ops.corner_trace * w;
    const double stab = r.dot(ops.corner_mass * r);
    return std::sqrt(bulk + average_term + jump_term + stab);
}

} // namespace biharm
