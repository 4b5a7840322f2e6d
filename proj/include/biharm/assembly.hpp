#pragma once

#include "biharm/geometry.hpp"
#include "biharm/mesh.hpp"
#include "biharm/recovery.hpp"
#include "biharm/types.hpp"

#include <functional>
#include <string_view>

namespace biharm {

enum class PenaltyScaling { Local, Global };

std::string_view to_string(PenaltyScaling scaling);
/// "local" or "global"; throws PreconditionError otherwise.
PenaltyScaling parse_penalty_scaling(std::string_view name);

struct PenaltyParams {
    double gamma = 10.0;
    double gamma_stab = 1.0;
    PenaltyScaling scaling = PenaltyScaling::Local;
};

/// Elementary sparse operators on a closed mesh. Nodal vector fields are
/// stored as 3N vectors (node-major, xyz). Edge functions that are linear
/// along an edge are stored by their two endpoint values (2E vectors, in the
/// order edge.v[0], edge.v[1]).
struct DiscreteOperators {
    /// F x 3N: per-face surface divergence of a continuous P1 vector field.
    SparseRowMatrix divergence;
    /// 2E x 3N: endpoint values of w . n_E^+ + w . n_E^-.
    SparseRowMatrix jump;
    /// E x F: per-edge average of per-face constants.
    SparseRowMatrix average;
    /// 2E x E: an edge constant copied to both endpoints.
    SparseRowMatrix lift;
    /// Face areas (diagonal of the face weight matrix).
    Vector face_area;
    /// 2E x 2E block diagonal, |E|/6 [[2,1],[1,2]]: L2 products of edge-linear functions.
    SparseMatrix edge_mass;
    /// 9F x N: the face gradient of a P1 scalar repeated at the three corners.
    SparseRowMatrix corner_gradient;
    /// 9F x 3N: a nodal vector field restricted to the corners of each face.
    SparseRowMatrix corner_trace;
    /// 9F x 9F: per-face P1 mass matrix for corner-valued vector fields.
    SparseMatrix corner_mass;
    /// 3N x 3N: mass matrix of continuous P1 vector fields.
    SparseMatrix vector_mass;
    double h = 0.0;
};

/// Requires a closed mesh.
DiscreteOperators build_operators(const TriMesh& mesh);

/// Stabilised recovered-gradient C0 interior penalty stiffness matrix.
/// Throws ParameterOutOfRange for gamma <= 0 or gamma_stab <= 0.
SparseMatrix assemble_stiffness(const TriMesh& mesh, const RecoveryMatrix& G,
                                const DiscreteOperators& ops, const PenaltyParams& params);

struct AssembledSystem {
    SparseMatrix A;
    Vector b;
    /// c_P = integral of the hat function of P over the mesh.
    Vector c;
    PenaltyParams params;
};

struct LoadVectors {
    Vector b;
    Vector c;
    /// Mean of the extended source over the mesh (removed from b).
    double source_mean = 0.0;
    /// L2 norm of the extended source over the mesh.
    double source_norm = 0.0;
};

using SurfaceFunction = std::function<double(const Vec3&)>;

Vector constraint_vector(const TriMesh& mesh);

/// b_P = integral of (f^e - mean f^e) phi_P, with f evaluated at the
/// projections of the quadrature points.
LoadVectors assemble_load(const TriMesh& mesh, const LevelSetSurface& surface,
                          const SurfaceFunction& source, int quadrature_degree = 4);
/// Same with f = Delta_S^2 u computed from the exact solution.
LoadVectors assemble_load(const TriMesh& mesh, const LevelSetSurface& surface,
                          const AmbientScalarField& u_exact, int quadrature_degree = 4);

/// Sum over edges of s^{-1} ||J w||^2_E for a nodal vector field w (3N), with
/// s the mesh size h.
double jump_energy(const DiscreteOperators& ops, const Vector& nodal_field);

} // namespace biharm
