#pragma once

#include "biharm/assembly.hpp"
#include "biharm/geometry.hpp"
#include "biharm/mesh.hpp"
#include "biharm/recovery.hpp"
#include "biharm/types.hpp"

#include <string>

namespace biharm {

struct SolveOptions {
    /// Bound on ||A u + lambda c - b|| / ||b||.
    double tolerance = 1e-10;
    int max_refinement_steps = 4;
};

struct SolveResult {
    Vector u;
    /// Lagrange multiplier of the mean constraint.
    double multiplier = 0.0;
    /// Relative algebraic residual ||A u + lambda c - b|| / ||b|| of the
    /// extended-precision solution, evaluated in extended precision.
    double residual = 0.0;
    /// The same residual after rounding the solution to `u`. It can exceed
    /// `residual` by the rounding floor eps ||A|| ||u|| / ||b||.
    double rounded_residual = 0.0;
    int refinement_steps = 0;
    /// Factorization used ("cholmod-supernodal" or "eigen-simplicial").
    std::string method;
};

/// Solves [[A, c], [c^T, 0]] [u; lambda] = [b; 0] for symmetric positive
/// semidefinite A with A 1 = 0. Throws SingularSystem if the factorization
/// fails or the residual bound cannot be met.
SolveResult solve_constrained(const AssembledSystem& system, const SolveOptions& options = {});

struct ErrorNorms {
    double D2e = 0.0; ///< ||(Delta_S u)^e - div_h G_h u_h||
    double De = 0.0;  ///< ||(grad_S u)^e - grad_h u_h||
    double e0 = 0.0;  ///< ||u^e - u_h|| modulo constants
    double Dre = 0.0; ///< ||(grad_S u)^e - G_h u_h||
};

/// L2(S_h) error norms, exact quantities taken at projected quadrature points.
ErrorNorms error_norms(const TriMesh& mesh, const LevelSetSurface& surface,
                       const AmbientScalarField& u_exact, const Vector& u_h,
                       const RecoveryMatrix& G, int quadrature_degree = 4);

/// Mesh-dependent energy norm of v (edge terms scaled with the mesh size h).
double energy_seminorm(const TriMesh& mesh, const RecoveryMatrix& G, const DiscreteOperators& ops,
                       const Vector& v);

/// Nodal interpolant of a field sampled at the mesh vertices.
Vector interpolate(const TriMesh& mesh, const AmbientScalarField& u);

/// Nodal samples (3N) of the exact tangential gradient.
Vector sample_surface_gradient(const TriMesh& mesh, const LevelSetSurface& surface,
                               const AmbientScalarField& u);

} // namespace biharm
