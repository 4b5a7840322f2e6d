#include "biharm/mesh.hpp"

#include "biharm/errors.hpp"
#include "biharm/parallel.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace biharm {

TriMesh::TriMesh(std::vector<Vec3> vertices, std::vector<Triangle> triangles, Topology topology)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)) {
    build_topology(topology);
    build_geometry();
}

std::span<const int> TriMesh::vertex_faces(int v) const {
    return {vf_index_.data() + vf_offset_[v], vf_index_.data() + vf_offset_[v + 1]};
}

std::span<const int> TriMesh::vertex_neighbors(int v) const {
    return {vv_index_.data() + vv_offset_[v], vv_index_.data() + vv_offset_[v + 1]};
}

void TriMesh::build_topology(Topology topology) {
    const int nv = num_vertices();
    const int nf = num_faces();
    if (nv == 0 || nf == 0) throw NonManifoldMesh("mesh has no vertices or no faces");

    std::unordered_map<std::uint64_t, int> lookup;
    lookup.reserve(static_cast<std::size_t>(nf) * 2);
    face_edges_.assign(nf, {-1, -1, -1});
    edges_.clear();
    edges_.reserve(static_cast<std::size_t>(nf) * 3 / 2 + 3);

    for (int f = 0; f < nf; ++f) {
        const auto& t = triangles_[f];
        for (int k = 0; k < 3; ++k) {
            if (t[k] < 0 || t[k] >= nv) {
                throw NonManifoldMesh("face " + std::to_string(f) + " references vertex " +
                                      std::to_string(t[k]) + " out of range");
            }
        }
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
            throw DegenerateTriangle("face " + std::to_string(f) + " repeats a vertex");
        }
        for (int k = 0; k < 3; ++k) {
            const int a = t[(k + 1) % 3];
            const int b = t[(k + 2) % 3];
            const int lo = std::min(a, b);
            const int hi = std::max(a, b);
            const auto key = (static_cast<std::uint64_t>(lo) << 32) | static_cast<std::uint32_t>(hi);
            auto [it, inserted] = lookup.try_emplace(key, static_cast<int>(edges_.size()));
            if (inserted) edges_.push_back(Edge{{lo, hi}, -1, -1});
            Edge& edge = edges_[it->second];
            int& slot = (a == lo) ? edge.left : edge.right;
            if (slot >= 0) {
                throw NonManifoldMesh("edge (" + std::to_string(lo) + ", " + std::to_string(hi) +
                                      ") is traversed twice in the same direction or by more "
                                      "than two faces");
            }
            slot = f;
            face_edges_[f][k] = it->second;
        }
    }

    closed_ = true;
    for (auto& e : edges_) {
        if (e.left < 0 || e.right < 0) {
            closed_ = false;
            if (e.left < 0) std::swap(e.left, e.right);
        }
    }
    if (!closed_ && topology == Topology::Closed) {
        throw NonManifoldMesh("mesh has boundary edges; a closed surface is required");
    }

    // vertex -> faces
    vf_offset_.assign(nv + 1, 0);
    for (const auto& t : triangles_) {
        for (int v : t) ++vf_offset_[v + 1];
    }
    for (int v = 0; v < nv; ++v) vf_offset_[v + 1] += vf_offset_[v];
    vf_index_.resize(vf_offset_[nv]);
    {
        std::vector<int> fill(vf_offset_.begin(), vf_offset_.end() - 1);
        for (int f = 0; f < nf; ++f) {
            for (int v : triangles_[f]) vf_index_[fill[v]++] = f;
        }
    }
    for (int v = 0; v < nv; ++v) {
        if (vf_offset_[v] == vf_offset_[v + 1]) {
            throw NonManifoldMesh("vertex " + std::to_string(v) + " belongs to no face");
        }
    }

    // vertex -> neighbouring vertices
    vv_offset_.assign(nv + 1, 0);
    for (const auto& e : edges_) {
        ++vv_offset_[e.v[0] + 1];
        ++vv_offset_[e.v[1] + 1];
    }
    for (int v = 0; v < nv; ++v) vv_offset_[v + 1] += vv_offset_[v];
    vv_index_.resize(vv_offset_[nv]);
    {
        std::vector<int> fill(vv_offset_.begin(), vv_offset_.end() - 1);
        for (const auto& e : edges_) {
            vv_index_[fill[e.v[0]]++] = e.v[1];
            vv_index_[fill[e.v[1]]++] = e.v[0];
        }
    }
    for (int v = 0; v < nv; ++v) {
        std::sort(vv_index_.begin() + vv_offset_[v], vv_index_.begin() + vv_offset_[v + 1]);
    }
}

void TriMesh::build_geometry() {
    const int nf = num_faces();
    const int ne = num_edges();

    h_ = 0.0;
    for (const auto& t : triangles_) {
        for (int k = 0; k < 3; ++k) {
            h_ = std::max(h_, (vertices_[t[k]] - vertices_[t[(k + 1) % 3]]).norm());
        }
    }

    area_.resize(nf);
    normal_.resize(nf);
    hat_.resize(nf);
    std::vector<int> degenerate(nf, 0);
    parallel_for(nf, [&](int f) {
        const auto& t = triangles_[f];
        const Vec3& x0 = vertices_[t[0]];
        const Vec3 cr = (vertices_[t[1]] - x0).cross(vertices_[t[2]] - x0);
        const double twice_area = cr.norm();
        area_[f] = 0.5 * twice_area;
        if (!(area_[f] >= kDegenerateAreaFactor * h_ * h_)) {
            degenerate[f] = 1;
            return;
        }
        normal_[f] = cr / twice_area;
        for (int k = 0; k < 3; ++k) {
            const Vec3 opposite = vertices_[t[(k + 2) % 3]] - vertices_[t[(k + 1) % 3]];
            hat_[f][k] = normal_[f].cross(opposite) / twice_area;
        }
    });
    for (int f = 0; f < nf; ++f) {
        if (degenerate[f]) {
            throw DegenerateTriangle("face " + std::to_string(f) + " has area " +
                                     std::to_string(area_[f]) + " below 1e-14 h^2");
        }
    }

    total_area_ = 0.0;
    for (double a : area_) total_area_ += a;

    length_.resize(ne);
    conormal_plus_.resize(ne);
    conormal_minus_.resize(ne);
    auto conormal = [&](int e, int f) -> Vec3 {
        const Edge& edge = edges_[e];
        const auto& fe = face_edges_[f];
        const int k = static_cast<int>(std::find(fe.begin(), fe.end(), e) - fe.begin());
        const Vec3& a = vertices_[edge.v[0]];
        const Vec3 t = (vertices_[edge.v[1]] - a) / length_[e];
        Vec3 m = t.cross(normal_[f]);
        if (m.dot(vertices_[triangles_[f][k]] - a) > 0.0) m = -m;
        return m.normalized();
    };
    parallel_for(ne, [&](int e) {
        const Edge& edge = edges_[e];
        length_[e] = (vertices_[edge.v[1]] - vertices_[edge.v[0]]).norm();
        conormal_plus_[e] = conormal(e, edge.left);
        conormal_minus_[e] = edge.is_boundary() ? Vec3::Zero() : conormal(e, edge.right);
    });

    const int nv = num_vertices();
    patch_area_.assign(nv, 0.0);
    for (int v = 0; v < nv; ++v) {
        for (int f : vertex_faces(v)) patch_area_[v] += area_[f];
    }
}

// ------------------------------------------------------------ constructions

TriMesh icosphere(int level) {
    if (level < 0 || level > 8) throw PreconditionError("icosphere level must lie in [0, 8]");
    const double t = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> v = {
        {-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
        {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1},
    };
    for (auto& p : v) p.normalize();
    std::vector<Triangle> f = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11},
        {1, 5, 9}, {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
        {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8}, {3, 8, 9},
        {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1},
    };
    TriMesh mesh(std::move(v), std::move(f));
    const auto sphere = make_sphere();
    for (int l = 0; l < level; ++l) mesh = refine_project(mesh, sphere);
    return mesh;
}

TriMesh torus_grid(int n, double major_radius, double minor_radius) {
    if (n < 4) throw PreconditionError("torus grid needs n >= 4");
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<Vec3> v;
    v.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        const double theta = two_pi * i / n;
        for (int j = 0; j < n; ++j) {
            const double phi = two_pi * j / n;
            const double r = major_radius + minor_radius * std::cos(theta);
            v.emplace_back(r * std::cos(phi), r * std::sin(phi), minor_radius * std::sin(theta));
        }
    }
    auto id = [n](int i, int j) { return ((i + n) % n) * n + (j + n) % n; };
    std::vector<Triangle> f;
    f.reserve(2 * static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            // d/dphi x d/dtheta points outwards.
            f.push_back({id(i, j), id(i, j + 1), id(i + 1, j + 1)});
            f.push_back({id(i, j), id(i + 1, j + 1), id(i + 1, j)});
        }
    }
    return {std::move(v), std::move(f)};
}

TriMesh refine_project(const TriMesh& mesh, const LevelSetSurface& surface) {
    const int nv = mesh.num_vertices();
    const int ne = mesh.num_edges();
    std::vector<Vec3> v(mesh.vertices());
    v.resize(static_cast<std::size_t>(nv) + ne);
    parallel_for(ne, [&](int e) {
        const auto& edge = mesh.edge(e);
        v[nv + e] = project(surface, 0.5 * (mesh.vertex(edge.v[0]) + mesh.vertex(edge.v[1])));
    });
    std::vector<Triangle> f;
    f.reserve(4 * static_cast<std::size_t>(mesh.num_faces()));
    for (int t = 0; t < mesh.num_faces(); ++t) {
        const auto& tri = mesh.triangle(t);
        const auto& fe = mesh.face_edges(t);
        const int a = tri[0], b = tri[1], c = tri[2];
        const int bc = nv + fe[0], ca = nv + fe[1], ab = nv + fe[2];
        f.push_back({a, ab, ca});
        f.push_back({ab, b, bc});
        f.push_back({ca, bc, c});
        f.push_back({ab, bc, ca});
    }
    return {std::move(v), std::move(f),
            mesh.is_closed() ? Topology::Closed : Topology::AllowBoundary};
}

TriMesh project_vertices(const TriMesh& mesh, const LevelSetSurface& surface) {
    std::vector<Vec3> v(mesh.vertices());
    parallel_for(static_cast<int>(v.size()), [&](int i) { v[i] = project(surface, v[i]); });
    return {std::move(v), mesh.triangles(),
            mesh.is_closed() ? Topology::Closed : Topology::AllowBoundary};
}

// ------------------------------------------------------------ OFF files

namespace {

struct LineReader {
    std::istream& in;
    int line = 0;

    // Next non-empty line with comments stripped, split into tokens.
    bool next(std::vector<std::string>& tokens) {
        std::string text;
        while (std::getline(in, text)) {
            ++line;
            if (auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
            std::istringstream ss(text);
            tokens.clear();
            for (std::string tok; ss >> tok;) tokens.push_back(tok);
            if (!tokens.empty()) return true;
        }
        ++line;
        return false;
    }
};

long parse_int(const std::string& tok, int line) {
    std::size_t used = 0;
    long value = 0;
    try {
        value = std::stol(tok, &used);
    } catch (const std::exception&) {
        throw ParseError("expected an integer, got '" + tok + "'", line);
    }
    if (used != tok.size()) throw ParseError("expected an integer, got '" + tok + "'", line);
    return value;
}

double parse_double(const std::string& tok, int line) {
    std::size_t used = 0;
    double value = 0;
    try {
        value = std::stod(tok, &used);
    } catch (const std::exception&) {
        throw ParseError("expected a number, got '" + tok + "'", line);
    }
    if (used != tok.size()) throw ParseError("expected a number, got '" + tok + "'", line);
    return value;
}

} // namespace

TriMesh load_off(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    LineReader reader{in};
    std::vector<std::string> tok;
    if (!reader.next(tok)) throw ParseError("empty file, expected 'OFF' header", reader.line);
    if (tok[0] != "OFF") throw ParseError("expected 'OFF' header, got '" + tok[0] + "'", reader.line);
    tok.erase(tok.begin());
    if (tok.empty() && !reader.next(tok)) throw ParseError("missing counts line", reader.line);
    if (tok.size() < 2) throw ParseError("counts line needs 'V F [E]'", reader.line);
    const long nv = parse_int(tok[0], reader.line);
    const long nf = parse_int(tok[1], reader.line);
    if (nv <= 0 || nf <= 0) throw ParseError("vertex and face counts must be positive", reader.line);

    std::vector<Vec3> vertices;
    vertices.reserve(nv);
    for (long i = 0; i < nv; ++i) {
        if (!reader.next(tok)) throw ParseError("unexpected end of file in vertex list", reader.line);
        if (tok.size() < 3) throw ParseError("vertex line needs three coordinates", reader.line);
        vertices.emplace_back(parse_double(tok[0], reader.line), parse_double(tok[1], reader.line),
                              parse_double(tok[2], reader.line));
    }
    std::vector<Triangle> triangles;
    triangles.reserve(nf);
    for (long i = 0; i < nf; ++i) {
        if (!reader.next(tok)) throw ParseError("unexpected end of file in face list", reader.line);
        const long count = parse_int(tok[0], reader.line);
        if (count != 3) {
            throw NonTriangleFace("line " + std::to_string(reader.line) + ": face with " +
                                  std::to_string(count) + " vertices");
        }
        if (tok.size() < 4) throw ParseError("face line needs three indices", reader.line);
        Triangle t{};
        for (int k = 0; k < 3; ++k) {
            const long idx = parse_int(tok[1 + k], reader.line);
            if (idx < 0 || idx >= nv) throw ParseError("vertex index out of range", reader.line);
            t[k] = static_cast<int>(idx);
        }
        triangles.push_back(t);
    }
    return {std::move(vertices), std::move(triangles)};
}

void save_off(const TriMesh& mesh, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << "OFF\n" << mesh.num_vertices() << ' ' << mesh.num_faces() << " 0\n";
    out << std::setprecision(17);
    for (const auto& p : mesh.vertices()) out << p.x() << ' ' << p.y() << ' ' << p.z() << '\n';
    for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

// ------------------------------------------------------------ diagnostics

MeshStats mesh_stats(const TriMesh& mesh, const LevelSetSurface* surface) {
    MeshStats s;
    s.vertices = mesh.num_vertices();
    s.faces = mesh.num_faces();
    s.edges = mesh.num_edges();
    s.h = mesh.h();
    s.area = mesh.total_area();
    s.min_angle_deg = 180.0;
    s.max_angle_deg = 0.0;
    const double to_deg = 180.0 / std::numbers::pi;
    for (const auto& t : mesh.triangles()) {
        for (int k = 0; k < 3; ++k) {
            const Vec3& p = mesh.vertex(t[k]);
            const Vec3 a = (mesh.vertex(t[(k + 1) % 3]) - p).normalized();
            const Vec3 b = (mesh.vertex(t[(k + 2) % 3]) - p).normalized();
            const double angle = std::acos(std::clamp(a.dot(b), -1.0, 1.0)) * to_deg;
            s.min_angle_deg = std::min(s.min_angle_deg, angle);
            s.max_angle_deg = std::max(s.max_angle_deg, angle);
        }
    }
    if (surface) {
        for (const auto& p : mesh.vertices()) {
            s.max_level_set = std::max(s.max_level_set, std::abs(surface->phi()(p)));
        }
    }
    for (int e = 0; e < mesh.num_edges(); ++e) {
        if (mesh.edge(e).is_boundary()) continue;
        s.max_conormal_sum =
            std::max(s.max_conormal_sum, (mesh.conormal_plus(e) + mesh.conormal_minus(e)).norm());
    }
    return s;
}

} // namespace biharm
