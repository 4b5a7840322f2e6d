#include "biharm/assembly.hpp"

#include "biharm/errors.hpp"
#include "biharm/parallel.hpp"
#include "biharm/quadrature.hpp"

#include <cmath>

namespace biharm {

std::string_view to_string(PenaltyScaling scaling) {
    return scaling == PenaltyScaling::Local ? "local" : "global";
}

PenaltyScaling parse_penalty_scaling(std::string_view name) {
    if (name == "local") return PenaltyScaling::Local;
    if (name == "global") return PenaltyScaling::Global;
    throw PreconditionError("unknown penalty scaling '" + std::string(name) + "'");
}

namespace {

template <class Matrix>
Matrix from_triplets(Eigen::Index rows, Eigen::Index cols, const std::vector<Triplet>& t) {
    Matrix m(rows, cols);
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

} // namespace

DiscreteOperators build_operators(const TriMesh& mesh) {
    if (!mesh.is_closed()) throw NonManifoldMesh("discrete operators need a closed mesh");
    const int n = mesh.num_vertices();
    const int nf = mesh.num_faces();
    const int ne = mesh.num_edges();
    DiscreteOperators ops;
    ops.h = mesh.h();

    std::vector<Triplet> t;
    t.reserve(9 * static_cast<std::size_t>(nf));
    for (int f = 0; f < nf; ++f) {
        const auto& tri = mesh.triangle(f);
        for (int k = 0; k < 3; ++k) {
            const Vec3& g = mesh.hat_gradient(f, k);
            for (int c = 0; c < 3; ++c) t.emplace_back(f, 3 * tri[k] + c, g[c]);
        }
    }
    ops.divergence = from_triplets<SparseRowMatrix>(nf, 3 * n, t);

    t.clear();
    for (int e = 0; e < ne; ++e) {
        const Edge& edge = mesh.edge(e);
        const Vec3 s = mesh.conormal_plus(e) + mesh.conormal_minus(e);
        for (int end = 0; end < 2; ++end) {
            for (int c = 0; c < 3; ++c) t.emplace_back(2 * e + end, 3 * edge.v[end] + c, s[c]);
        }
    }
    ops.jump = from_triplets<SparseRowMatrix>(2 * ne, 3 * n, t);

    t.clear();
    for (int e = 0; e < ne; ++e) {
        t.emplace_back(e, mesh.edge(e).left, 0.5);
        t.emplace_back(e, mesh.edge(e).right, 0.5);
    }
    ops.average = from_triplets<SparseRowMatrix>(ne, nf, t);

    t.clear();
    for (int e = 0; e < ne; ++e) {
        t.emplace_back(2 * e, e, 1.0);
        t.emplace_back(2 * e + 1, e, 1.0);
    }
    ops.lift = from_triplets<SparseRowMatrix>(2 * ne, ne, t);

    ops.face_area.resize(nf);
    for (int f = 0; f < nf; ++f) ops.face_area[f] = mesh.area(f);

    t.clear();
    for (int e = 0; e < ne; ++e) {
        const double l6 = mesh.edge_length(e) / 6.0;
        t.emplace_back(2 * e, 2 * e, 2.0 * l6);
        t.emplace_back(2 * e, 2 * e + 1, l6);
        t.emplace_back(2 * e + 1, 2 * e, l6);
        t.emplace_back(2 * e + 1, 2 * e + 1, 2.0 * l6);
    }
    ops.edge_mass = from_triplets<SparseMatrix>(2 * ne, 2 * ne, t);

    // Corner layout: row 9f + 3k + c is component c at local vertex k of face f.
    std::vector<Triplet> grad_t, trace_t, mass_t;
    grad_t.reserve(27 * static_cast<std::size_t>(nf));
    trace_t.reserve(9 * static_cast<std::size_t>(nf));
    mass_t.reserve(27 * static_cast<std::size_t>(nf));
    for (int f = 0; f < nf; ++f) {
        const auto& tri = mesh.triangle(f);
        const double a12 = mesh.area(f) / 12.0;
        for (int k = 0; k < 3; ++k) {
            for (int c = 0; c < 3; ++c) {
                const int row = 9 * f + 3 * k + c;
                trace_t.emplace_back(row, 3 * tri[k] + c, 1.0);
                for (int j = 0; j < 3; ++j) grad_t.emplace_back(row, tri[j], mesh.hat_gradient(f, j)[c]);
                for (int l = 0; l < 3; ++l) {
                    mass_t.emplace_back(row, 9 * f + 3 * l + c, (k == l ? 2.0 : 1.0) * a12);
                }
            }
        }
    }
    ops.corner_gradient = from_triplets<SparseRowMatrix>(9 * nf, n, grad_t);
    ops.corner_trace = from_triplets<SparseRowMatrix>(9 * nf, 3 * n, trace_t);
    ops.corner_mass = from_triplets<SparseMatrix>(9 * nf, 9 * nf, mass_t);
    const SparseMatrix trace = ops.corner_trace;
    ops.vector_mass = SparseMatrix(trace.transpose() * ops.corner_mass * trace);
    return ops;
}

SparseMatrix assemble_stiffness(const TriMesh& mesh, const RecoveryMatrix& G,
                                const DiscreteOperators& ops, const PenaltyParams& params) {
    if (!(params.gamma > 0.0)) throw ParameterOutOfRange("gamma must be positive");
    if (!(params.gamma_stab > 0.0)) throw ParameterOutOfRange("gamma_stab must be positive");
    if (G.num_nodes() != mesh.num_vertices()) {
        throw PreconditionError("recovery matrix does not match the mesh");
    }
    const int ne = mesh.num_edges();

    const SparseMatrix G_col = G.matrix;
    const SparseMatrix DG = ops.divergence * G_col;                  // F x N
    const SparseMatrix JG = ops.jump * G_col;                        // 2E x N
    const SparseMatrix avg_div = ops.lift * (ops.average * DG);      // 2E x N

    Vector penalty_weight(2 * ne);
    for (int e = 0; e < ne; ++e) {
        const double s = params.scaling == PenaltyScaling::Local ? mesh.edge_length(e) : ops.h;
        penalty_weight[2 * e] = penalty_weight[2 * e + 1] = params.gamma / s;
    }
    const SparseMatrix scaled_edge_mass = penalty_weight.asDiagonal() * ops.edge_mass;

    const SparseMatrix bulk = DG.transpose() * ops.face_area.asDiagonal() * DG;
    const SparseMatrix cross = avg_div.transpose() * ops.edge_mass * JG;
    const SparseMatrix penalty = JG.transpose() * scaled_edge_mass * JG;
    const SparseMatrix residual = SparseMatrix(ops.corner_gradient) - SparseMatrix(ops.corner_trace) * G_col;
    const SparseMatrix stab = residual.transpose() * ops.corner_mass * residual;

    SparseMatrix cross_t = cross.transpose();
    SparseMatrix A = bulk - cross - cross_t + penalty + params.gamma_stab * stab;
    A.prune(0.0);
    A.makeCompressed();
    return A;
}

Vector constraint_vector(const TriMesh& mesh) {
    Vector c = Vector::Zero(mesh.num_vertices());
    for (int f = 0; f < mesh.num_faces(); ++f) {
        for (int v : mesh.triangle(f)) c[v] += mesh.area(f) / 3.0;
    }
    return c;
}

LoadVectors assemble_load(const TriMesh& mesh, const LevelSetSurface& surface,
                          const SurfaceFunction& source, int quadrature_degree) {
    const TriangleRule& rule = triangle_rule(quadrature_degree);
    const int nf = mesh.num_faces();
    const int nq = rule.size();
    std::vector<double> values(static_cast<std::size_t>(nf) * nq);
    parallel_for(nf, [&](int f) {
        const auto& tri = mesh.triangle(f);
        for (int q = 0; q < nq; ++q) {
            const auto& l = rule.points[q];
            const Vec3 x = l[0] * mesh.vertex(tri[0]) + l[1] * mesh.vertex(tri[1]) + l[2] * mesh.vertex(tri[2]);
            values[static_cast<std::size_t>(f) * nq + q] = source(project(surface, x));
        }
    });

    LoadVectors out;
    out.b = Vector::Zero(mesh.num_vertices());
    out.c = constraint_vector(mesh);
    double integral = 0.0;
    double square = 0.0;
    for (int f = 0; f < nf; ++f) {
        const auto& tri = mesh.triangle(f);
        const double area = mesh.area(f);
        for (int q = 0; q < nq; ++q) {
            const double wf = rule.weights[q] * area * values[static_cast<std::size_t>(f) * nq + q];
            integral += wf;
            square += wf * values[static_cast<std::size_t>(f) * nq + q];
            for (int k = 0; k < 3; ++k) out.b[tri[k]] += wf * rule.points[q][k];
        }
    }
    out.source_mean = integral / mesh.total_area();
    out.source_norm = std::sqrt(square);
    out.b -= out.source_mean * out.c;
    return out;
}

LoadVectors assemble_load(const TriMesh& mesh, const LevelSetSurface& surface,
                          const AmbientScalarField& u_exact, int quadrature_degree) {
    return assemble_load(
        mesh, surface,
        [&](const Vec3& y) { return manufactured_source(surface, u_exact, y); }, quadrature_degree);
}

double jump_energy(const DiscreteOperators& ops, const Vector& nodal_field) {
    const Vector j = ops.jump * nodal_field;
    return j.dot(ops.edge_mass * j) / ops.h;
}

} // namespace biharm
