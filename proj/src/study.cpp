#include "biharm/study.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

namespace biharm {

double estimated_order(double e_prev, double e_cur, double h_prev, double h_cur) {
    return std::log(e_prev / e_cur) / std::log(h_prev / h_cur);
}

void ConvergenceTable::add(int level, int dofs, double h, const ErrorNorms& norms) {
    ConvergenceRow row{level, dofs, h, norms, {}};
    if (!rows.empty()) {
        const auto& p = rows.back();
        row.orders[0] = estimated_order(p.norms.D2e, norms.D2e, p.h, h);
        row.orders[1] = estimated_order(p.norms.De, norms.De, p.h, h);
        row.orders[2] = estimated_order(p.norms.e0, norms.e0, p.h, h);
        row.orders[3] = estimated_order(p.norms.Dre, norms.Dre, p.h, h);
    }
    rows.push_back(row);
}

namespace {

std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6e", v);
    return buf;
}

std::string order_cell(const std::optional<double>& o) {
    if (!o) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *o);
    return buf;
}

} // namespace

std::string ConvergenceTable::to_csv() const {
    std::ostringstream out;
    out << "level,dofs,h,D2e,D2e_order,De,De_order,e0,e0_order,Dre,Dre_order\n";
    for (const auto& r : rows) {
        out << r.level << ',' << r.dofs << ',' << sci(r.h) << ',' << sci(r.norms.D2e) << ','
            << order_cell(r.orders[0]) << ',' << sci(r.norms.De) << ',' << order_cell(r.orders[1]) << ','
            << sci(r.norms.e0) << ',' << order_cell(r.orders[2]) << ',' << sci(r.norms.Dre) << ','
            << order_cell(r.orders[3]) << '\n';
    }
    return out.str();
}

std::string ConvergenceTable::to_markdown() const {
    const std::vector<std::string> header = {"level", "dofs",  "h",     "(D2e)_0", "order",
                                             "(De)_0", "order", "e_0",  "order",   "(Dre)_0",
                                             "order"};
    std::vector<std::vector<std::string>> cells;
    for (const auto& r : rows) {
        cells.push_back({std::to_string(r.level), std::to_string(r.dofs), sci(r.h), sci(r.norms.D2e),
                         order_cell(r.orders[0]), sci(r.norms.De), order_cell(r.orders[1]),
                         sci(r.norms.e0), order_cell(r.orders[2]), sci(r.norms.Dre),
                         order_cell(r.orders[3])});
    }
    std::vector<std::size_t> width(header.size());
    for (std::size_t j = 0; j < header.size(); ++j) {
        width[j] = header[j].size();
        for (const auto& row : cells) width[j] = std::max(width[j], row[j].size());
    }
    std::ostringstream out;
    if (!title.empty()) out << "### " << title << "\n\n";
    auto emit = [&](const std::vector<std::string>& row) {
        out << '|';
        for (std::size_t j = 0; j < row.size(); ++j) {
            out << ' ' << std::setw(static_cast<int>(width[j])) << row[j] << " |";
        }
        out << '\n';
    };
    emit(header);
    out << '|';
    for (std::size_t j = 0; j < header.size(); ++j) out << std::string(width[j] + 1, '-') << ":|";
    out << '\n';
    for (const auto& row : cells) emit(row);
    return out.str();
}

// ------------------------------------------------------------ mesh families

namespace {

bool is_off_path(const std::string& s) {
    return s.size() > 4 && s.compare(s.size() - 4, 4, ".off") == 0;
}

LevelSetSurface resolve_surface(const StudyConfig& config) {
    if (is_off_path(config.surface)) {
        if (config.level_set.empty()) {
            throw PreconditionError("an OFF surface needs 'level_set' naming the exact surface");
        }
        return surface_by_name(config.level_set);
    }
    return surface_by_name(config.surface);
}

} // namespace

MeshFamily::MeshFamily(const StudyConfig& config) : surface_(resolve_surface(config)) {
    std::string initial = config.mesh_file;
    if (is_off_path(config.surface)) initial = config.surface;
    if (!initial.empty()) {
        kind_ = Kind::Refined;
        base_ = project_vertices(load_off(initial), surface_);
    } else if (config.surface == "sphere") {
        kind_ = Kind::Icosphere;
    } else if (config.surface == "torus") {
        kind_ = Kind::Torus;
    } else {
        kind_ = Kind::Refined;
        TriMesh sphere = icosphere(config.initial_level);
        if (const auto& map = surface_.sphere_map()) {
            std::vector<Vec3> v = sphere.vertices();
            for (auto& p : v) p = map(p);
            sphere = TriMesh(std::move(v), sphere.triangles());
        }
        base_ = project_vertices(sphere, surface_);
    }
}

TriMesh MeshFamily::mesh(int level) {
    switch (kind_) {
    case Kind::Icosphere:
        return icosphere(level);
    case Kind::Torus:
        return torus_grid(level);
    case Kind::Refined:
        break;
    }
    if (level < 0) throw PreconditionError("refinement count must be non-negative");
    if (cache_.empty()) cache_.push_back(base_);
    while (static_cast<int>(cache_.size()) <= level) {
        cache_.push_back(refine_project(cache_.back(), surface_));
    }
    return cache_[level];
}

// ------------------------------------------------------------ levels

LevelProblem assemble_level(const StudyConfig& config, const LevelSetSurface& surface,
                            const AmbientScalarField& u_exact, TriMesh mesh) {
    LevelProblem p;
    p.mesh = std::move(mesh);
    p.G = build_recovery(p.mesh, config.recovery);
    p.ops = build_operators(p.mesh);
    p.load = assemble_load(p.mesh, surface, u_exact, config.quadrature_degree);
    p.system.A = assemble_stiffness(p.mesh, p.G, p.ops, config.penalty);
    p.system.b = p.load.b;
    p.system.c = p.load.c;
    p.system.params = config.penalty;
    return p;
}

LevelResult solve_level(const StudyConfig& config, const LevelSetSurface& surface,
                        const AmbientScalarField& u_exact, TriMesh mesh, int level) {
    LevelProblem p = assemble_level(config, surface, u_exact, std::move(mesh));
    LevelResult r;
    r.level = level;
    r.dofs = p.mesh.num_vertices();
    r.h = p.mesh.h();
    r.solve = solve_constrained(p.system);
    r.norms = error_norms(p.mesh, surface, u_exact, r.solve.u, p.G, config.quadrature_degree);
    r.compatibility = p.load.source_norm > 0.0
                          ? std::abs(p.load.source_mean) * p.mesh.total_area() / p.load.source_norm
                          : 0.0;
    return r;
}

ConvergenceTable convergence_study(const StudyConfig& config, const LevelObserver& observer) {
    MeshFamily family(config);
    const AmbientScalarField u = solution_by_name(config.solution);
    ConvergenceTable table;
    table.title = family.surface().name() + ", u = " + config.solution + ", " +
                  std::string(to_string(config.recovery));
    for (int level : config.levels) {
        try {
            const LevelResult r = solve_level(config, family.surface(), u, family.mesh(level), level);
            table.add(level, r.dofs, r.h, r.norms);
            if (observer) observer(r);
        } catch (const LevelFailure&) {
            throw;
        } catch (const std::exception& e) {
            throw LevelFailure(level, e.what());
        }
    }
    return table;
}

std::optional<std::string> paired_surface(std::string_view solution) {
    if (solution == "xy") return "sphere";
    if (solution == "y_over_r") return "torus";
    if (solution == "y") return "heart";
    return std::nullopt;
}

} // namespace biharm
