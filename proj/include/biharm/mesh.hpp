#pragma once

#include "biharm/geometry.hpp"
#include "biharm/types.hpp"

#include <array>
#include <filesystem>
#include <span>
#include <vector>

namespace biharm {

using Triangle = std::array<int, 3>;

/// Mesh edge. Endpoints are stored smaller index first; `left` is the face that
/// traverses v[0] -> v[1] (it owns the "+" conormal), `right` the other one.
/// `right == -1` marks a boundary edge (only allowed for open test meshes).
struct Edge {
    std::array<int, 2> v{};
    int left = -1;
    int right = -1;

    bool is_boundary() const noexcept { return right < 0; }
};

enum class Topology { Closed, AllowBoundary };

/// Triangulated surface with its topology and all per-face / per-edge
/// discrete geometric data. Immutable after construction.
class TriMesh {
public:
    TriMesh() = default;
    /// Builds topology and geometry. Throws NonManifoldMesh for inconsistent
    /// connectivity (and for boundary edges unless `AllowBoundary`),
    /// DegenerateTriangle if a face area is below 1e-14 h^2.
    TriMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles,
            Topology topology = Topology::Closed);

    int num_vertices() const noexcept { return static_cast<int>(vertices_.size()); }
    int num_faces() const noexcept { return static_cast<int>(triangles_.size()); }
    int num_edges() const noexcept { return static_cast<int>(edges_.size()); }
    bool is_closed() const noexcept { return closed_; }

    const std::vector<Vec3>& vertices() const noexcept { return vertices_; }
    const std::vector<Triangle>& triangles() const noexcept { return triangles_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const Vec3& vertex(int i) const { return vertices_[i]; }
    const Triangle& triangle(int f) const { return triangles_[f]; }
    const Edge& edge(int e) const { return edges_[e]; }

    double area(int f) const { return area_[f]; }
    const Vec3& face_normal(int f) const { return normal_[f]; }
    /// Tangential gradient of the hat function of local vertex `k` on face `f`.
    const Vec3& hat_gradient(int f, int k) const { return hat_[f][k]; }
    /// Edges of face f; edge k is opposite local vertex k.
    const std::array<int, 3>& face_edges(int f) const { return face_edges_[f]; }

    double edge_length(int e) const { return length_[e]; }
    const Vec3& conormal_plus(int e) const { return conormal_plus_[e]; }
    const Vec3& conormal_minus(int e) const { return conormal_minus_[e]; }

    /// Faces incident to vertex v (the element patch).
    std::span<const int> vertex_faces(int v) const;
    /// Vertices sharing an edge with v, ascending.
    std::span<const int> vertex_neighbors(int v) const;
    double patch_area(int v) const { return patch_area_[v]; }

    /// Mesh size: maximum triangle diameter.
    double h() const noexcept { return h_; }
    double total_area() const noexcept { return total_area_; }

private:
    void build_topology(Topology topology);
    void build_geometry();

    std::vector<Vec3> vertices_;
    std::vector<Triangle> triangles_;
    std::vector<Edge> edges_;
    std::vector<std::array<int, 3>> face_edges_;
    bool closed_ = true;

    std::vector<double> area_;
    std::vector<Vec3> normal_;
    std::vector<std::array<Vec3, 3>> hat_;
    std::vector<double> length_;
    std::vector<Vec3> conormal_plus_;
    std::vector<Vec3> conormal_minus_;

    std::vector<int> vf_offset_, vf_index_;
    std::vector<int> vv_offset_, vv_index_;
    std::vector<double> patch_area_;
    double h_ = 0.0;
    double total_area_ = 0.0;
};

/// One member of a refinement family.
struct MeshLevel {
    TriMesh mesh;
    double h = 0.0;
    int level = 0;
};

inline constexpr double kDegenerateAreaFactor = 1e-14;

/// Regular icosahedron refined `level` times, vertices on the unit sphere.
TriMesh icosphere(int level);

/// n x n periodic (theta, phi) grid mapped onto the torus, each cell split
/// along its (i, j) -> (i+1, j+1) diagonal.
TriMesh torus_grid(int n, double major_radius = 4.0, double minor_radius = 1.0);

/// 1 -> 4 midpoint subdivision with the new midpoints projected onto `surface`.
TriMesh refine_project(const TriMesh& mesh, const LevelSetSurface& surface);

/// Moves every vertex onto `surface` with `project`, keeping connectivity.
TriMesh project_vertices(const TriMesh& mesh, const LevelSetSurface& surface);

TriMesh load_off(const std::filesystem::path& path);
void save_off(const TriMesh& mesh, const std::filesystem::path& path);

struct MeshStats {
    int vertices = 0;
    int faces = 0;
    int edges = 0;
    double h = 0.0;
    double min_angle_deg = 0.0;
    double max_angle_deg = 0.0;
    double max_level_set = 0.0;      // max |phi(v)|, when a surface is given
    double max_conormal_sum = 0.0;   // max |n_E^+ + n_E^-|
    double area = 0.0;
};

MeshStats mesh_stats(const TriMesh& mesh, const LevelSetSurface* surface = nullptr);

} // namespace biharm
