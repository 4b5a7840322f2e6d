#pragma once

#include "biharm/assembly.hpp"
#include "biharm/errors.hpp"
#include "biharm/geometry.hpp"
#include "biharm/mesh.hpp"
#include "biharm/recovery.hpp"
#include "biharm/solve.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace biharm {

enum class TableFormat { Csv, Markdown };

/// Convergence study configuration. Defaults are gamma = 10, gamma_stab = 1.
struct StudyConfig {
    /// Surface name, or an OFF file (then `level_set` names the surface).
    std::string surface = "sphere";
    std::string level_set;
    /// Optional initial mesh for refinement families (OFF).
    std::string mesh_file;
    /// Icosphere level carried onto the surface (through its sphere map when
    /// it has one, then projected) when no initial mesh is given.
    int initial_level = 2;
    std::string solution = "xy";
    RecoveryBackend recovery = RecoveryBackend::WA;
    PenaltyParams penalty;
    /// Sphere: icosphere levels. Torus: grid sizes n. Others: refinement counts.
    std::vector<int> levels = {3, 4, 5};
    int quadrature_degree = 4;
    std::string output;
    TableFormat format = TableFormat::Csv;
};

/// Numerical failure while processing one level of a study.
class LevelFailure : public Error {
public:
    LevelFailure(int level, const std::string& what)
        : Error("level " + std::to_string(level) + ": " + what), level_(level) {}
    int level() const noexcept { return level_; }

private:
    int level_;
};

struct ConvergenceRow {
    int level = 0;
    int dofs = 0;
    double h = 0.0;
    ErrorNorms norms;
    /// Orders relative to the previous row: D2e, De, e0, Dre.
    std::array<std::optional<double>, 4> orders;
};

struct ConvergenceTable {
    std::string title;
    std::vector<ConvergenceRow> rows;

    /// Appends a row and fills its orders from the previous one.
    void add(int level, int dofs, double h, const ErrorNorms& norms);
    std::string to_csv() const;
    std::string to_markdown() const;
};

/// log(e_prev / e_cur) / log(h_prev / h_cur)
double estimated_order(double e_prev, double e_cur, double h_prev, double h_cur);

/// Mesh family of a study: produces the mesh for each configured level.
class MeshFamily {
public:
    explicit MeshFamily(const StudyConfig& config);
    const LevelSetSurface& surface() const noexcept { return surface_; }
    TriMesh mesh(int level);

private:
    enum class Kind { Icosphere, Torus, Refined };
    Kind kind_;
    LevelSetSurface surface_;
    TriMesh base_;
    std::vector<TriMesh> cache_;
};

/// Everything assembled for one mesh.
struct LevelProblem {
    TriMesh mesh;
    RecoveryMatrix G;
    DiscreteOperators ops;
    AssembledSystem system;
    LoadVectors load;
};

LevelProblem assemble_level(const StudyConfig& config, const LevelSetSurface& surface,
                            const AmbientScalarField& u_exact, TriMesh mesh);

struct LevelResult {
    int level = 0;
    int dofs = 0;
    double h = 0.0;
    ErrorNorms norms;
    SolveResult solve;
    double compatibility = 0.0; ///< |int f| / ||f|| on the mesh
};

LevelResult solve_level(const StudyConfig& config, const LevelSetSurface& surface,
                        const AmbientScalarField& u_exact, TriMesh mesh, int level);

using LevelObserver = std::function<void(const LevelResult&)>;

/// Runs every level in order. Failures are rethrown as LevelFailure.
/// `observer`, if set, sees each level's result as soon as it is available.
ConvergenceTable convergence_study(const StudyConfig& config, const LevelObserver& observer = {});

/// Surface a named solution was designed for ("xy" -> sphere, ...), if any.
std::optional<std::string> paired_surface(std::string_view solution);

} // namespace biharm
