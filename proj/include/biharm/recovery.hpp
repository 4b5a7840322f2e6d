#pragma once

#include "biharm/geometry.hpp"
#include "biharm/mesh.hpp"
#include "biharm/types.hpp"

#include <string_view>

namespace biharm {

enum class RecoveryBackend { WA, PPPR };

std::string_view to_string(RecoveryBackend backend);
/// "wa" or "pppr"; throws PreconditionError otherwise.
RecoveryBackend parse_recovery_backend(std::string_view name);

/// Gradient recovery operator G_h as a sparse (3N x N) matrix. Row 3P + k is
/// component k of the recovered gradient at node P.
struct RecoveryMatrix {
    SparseRowMatrix matrix;
    RecoveryBackend backend = RecoveryBackend::WA;

    int num_nodes() const { return static_cast<int>(matrix.cols()); }
    Vector apply(const Vector& nodal) const { return matrix * nodal; }
};

/// Area-weighted average of the piecewise-constant gradient over each vertex patch.
RecoveryMatrix build_wa(const TriMesh& mesh);

struct PpprOptions {
    int min_nodes = 6;
    int max_ring_extensions = 3;
    double rank_tolerance = 1e-10;
};

/// Parametric polynomial preserving recovery: a local quadratic fit of both
/// the surface height and the nodal values over an (extended) vertex patch in
/// a tangent frame. When `surface_hint` is given the exact normal at the node
/// replaces the area-weighted face normal for the frame.
/// Throws RankDeficientPatch when no full-rank patch is found.
RecoveryMatrix build_pppr(const TriMesh& mesh, const LevelSetSurface* surface_hint = nullptr,
                          const PpprOptions& options = {});

RecoveryMatrix build_recovery(const TriMesh& mesh, RecoveryBackend backend);

} // namespace biharm
