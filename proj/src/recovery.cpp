#include "biharm/recovery.hpp"

#include "biharm/errors.hpp"
#include "biharm/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace biharm {

std::string_view to_string(RecoveryBackend backend) {
    return backend == RecoveryBackend::WA ? "wa" : "pppr";
}

RecoveryBackend parse_recovery_backend(std::string_view name) {
    if (name == "wa") return RecoveryBackend::WA;
    if (name == "pppr") return RecoveryBackend::PPPR;
    throw PreconditionError("unknown recovery backend '" + std::string(name) + "'");
}

namespace {

SparseRowMatrix from_node_blocks(int n, const std::vector<std::vector<Triplet>>& blocks) {
    std::size_t total = 0;
    for (const auto& b : blocks) total += b.size();
    std::vector<Triplet> triplets;
    triplets.reserve(total);
    for (const auto& b : blocks) triplets.insert(triplets.end(), b.begin(), b.end());
    SparseRowMatrix m(3 * n, n);
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.makeCompressed();
    return m;
}

} // namespace

RecoveryMatrix build_wa(const TriMesh& mesh) {
    const int n = mesh.num_vertices();
    std::vector<std::vector<Triplet>> blocks(n);
    parallel_for(n, [&](int p) {
        auto& out = blocks[p];
        const double inv_patch = 1.0 / mesh.patch_area(p);
        for (int f : mesh.vertex_faces(p)) {
            const double w = mesh.area(f) * inv_patch;
            const auto& tri = mesh.triangle(f);
            for (int k = 0; k < 3; ++k) {
                const Vec3& g = mesh.hat_gradient(f, k);
                for (int c = 0; c < 3; ++c) out.emplace_back(3 * p + c, tri[k], w * g[c]);
            }
        }
    });
    return {from_node_blocks(n, blocks), RecoveryBackend::WA};
}

namespace {

void add_ring(const TriMesh& mesh, std::vector<int>& nodes, std::vector<int>& frontier) {
    std::vector<int> next;
    for (int q : frontier) {
        for (int r : mesh.vertex_neighbors(q)) {
            if (std::find(nodes.begin(), nodes.end(), r) == nodes.end()) {
                nodes.push_back(r);
                next.push_back(r);
            }
        }
    }
    frontier = std::move(next);
}

} // namespace

RecoveryMatrix build_pppr(const TriMesh& mesh, const LevelSetSurface* surface_hint,
                          const PpprOptions& options) {
    const int n = mesh.num_vertices();
    std::vector<std::vector<Triplet>> blocks(n);
    parallel_for(n, [&](int p) {
        const Vec3& xp = mesh.vertex(p);
        Vec3 nrm = Vec3::Zero();
        if (surface_hint) {
            nrm = normal(*surface_hint, xp);
        } else {
            for (int f : mesh.vertex_faces(p)) nrm += mesh.area(f) * mesh.face_normal(f);
            nrm.normalize();
        }
        // Tangent frame (t1, t2, nrm).
        int axis = 0;
        nrm.cwiseAbs().minCoeff(&axis);
        Vec3 t1 = Vec3::Unit(axis) - nrm[axis] * nrm;
        t1.normalize();
        const Vec3 t2 = nrm.cross(t1);

        std::vector<int> nodes = {p};
        std::vector<int> frontier = {p};
        add_ring(mesh, nodes, frontier);

        Eigen::MatrixXd V;
        Eigen::VectorXd height;
        double scale = 0.0;
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr;
        for (int extension = 0;; ++extension) {
            const int m = static_cast<int>(nodes.size());
            if (m >= options.min_nodes) {
                scale = 0.0;
                for (int i = 0; i < m; ++i) {
                    for (int j = i + 1; j < m; ++j) {
                        scale = std::max(scale, (mesh.vertex(nodes[i]) - mesh.vertex(nodes[j])).norm());
                    }
                }
                V.resize(m, 6);
                height.resize(m);
                for (int i = 0; i < m; ++i) {
                    const Vec3 d = (mesh.vertex(nodes[i]) - xp) / scale;
                    const double xi = d.dot(t1);
                    const double eta = d.dot(t2);
                    V.row(i) << 1.0, xi, eta, xi * xi, xi * eta, eta * eta;
                    height[i] = d.dot(nrm);
                }
                qr.setThreshold(options.rank_tolerance);
                qr.compute(V);
                if (qr.rank() == 6) break;
            }
            if (extension >= options.max_ring_extensions) {
                throw RankDeficientPatch("no full-rank quadratic fit around vertex " + std::to_string(p));
            }
            add_ring(mesh, nodes, frontier);
        }

        const int m = static_cast<int>(nodes.size());
        const Eigen::MatrixXd pinv = qr.solve(Eigen::MatrixXd::Identity(m, m)); // 6 x m
        const Eigen::VectorXd hc = pinv * height;
        Eigen::Matrix<double, 3, 2> J;
        J.col(0) = t1 + hc[1] * nrm;
        J.col(1) = t2 + hc[2] * nrm;
        const Eigen::Matrix<double, 3, 2> JG = J * (J.transpose() * J).inverse();
        const Eigen::MatrixXd rows = JG * pinv.middleRows(1, 2) / scale; // 3 x m

        auto& out = blocks[p];
        out.reserve(3 * static_cast<std::size_t>(m));
        for (int j = 0; j < m; ++j) {
            for (int c = 0; c < 3; ++c) out.emplace_back(3 * p + c, nodes[j], rows(c, j));
        }
    });
    return {from_node_blocks(n, blocks), RecoveryBackend::PPPR};
}

RecoveryMatrix build_recovery(const TriMesh& mesh, RecoveryBackend backend) {
    return backend == RecoveryBackend::WA ? build_wa(mesh) : build_pppr(mesh);
}

} // namespace biharm
