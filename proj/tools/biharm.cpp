// Command-line front end: convergence studies, mesh inspection and system dumps.
//
// Exit codes: 0 success, 1 usage or I/O problem, 2 invalid configuration,
// 3 numerical failure.

#include "biharm/config.hpp"
#include "biharm/matrix_market.hpp"
#include "biharm/study.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

constexpr int kUsageError = 1;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

// Output prefixes may name directories that do not exist yet.
void make_parent(const std::string& path) {
    const std::filesystem::path parent = std::filesystem::path(path).parent_path();
    std::error_code ec;
    if (!parent.empty()) std::filesystem::create_directories(parent, ec);
    if (ec) throw biharm::IoError("cannot create '" + parent.string() + "': " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
    make_parent(path);
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw biharm::IoError("cannot write '" + path + "'");
}

int cmd_study(const std::string& config_path) {
    const biharm::StudyConfig config = biharm::load_config(config_path);
    if (const auto paired = biharm::paired_surface(config.solution);
        paired && *paired != config.surface && *paired != config.level_set) {
        std::cerr << "warning: solution '" << config.solution << "' was designed for the " << *paired
                  << "; the source may not be compatible with this surface\n";
    }
    const auto table = biharm::convergence_study(config, [](const biharm::LevelResult& r) {
        std::cerr << "level " << r.level << ": " << r.dofs << " dofs, residual " << r.solve.residual
                  << " (rounded " << r.solve.rounded_residual << ", " << r.solve.method << ")\n";
        if (r.compatibility > 1e-6) {
            std::cerr << "warning: level " << r.level << ": |int f| / ||f|| = " << r.compatibility
                      << ", the source mean was removed\n";
        }
    });
    const std::string csv = table.to_csv();
    const std::string md = table.to_markdown();
    std::cout << (config.format == biharm::TableFormat::Csv ? csv : md);
    if (!config.output.empty()) {
        write_text(config.output + ".csv", csv);
        write_text(config.output + ".md", md);
    }
    return 0;
}

int cmd_mesh_info(const std::string& surface, int level) {
    biharm::StudyConfig config;
    config.surface = surface;
    biharm::MeshFamily family(config);
    const biharm::TriMesh mesh = family.mesh(level);
    const biharm::MeshStats s = biharm::mesh_stats(mesh, &family.surface());
    std::printf("surface: %s\n", family.surface().name().c_str());
    std::printf("vertices: %d\n", s.vertices);
    std::printf("faces: %d\n", s.faces);
    std::printf("edges: %d\n", s.edges);
    std::printf("h: %.6e\n", s.h);
    std::printf("area: %.12g\n", s.area);
    std::printf("min angle: %.4f deg\n", s.min_angle_deg);
    std::printf("max angle: %.4f deg\n", s.max_angle_deg);
    std::printf("max |phi(v)|: %.3e\n", s.max_level_set);
    std::printf("max |n+ + n-|: %.3e\n", s.max_conormal_sum);
    return 0;
}

int cmd_dump_system(const std::string& config_path, int level, const std::string& prefix) {
    const biharm::StudyConfig config = biharm::load_config(config_path);
    biharm::MeshFamily family(config);
    const auto u = biharm::solution_by_name(config.solution);
    biharm::LevelProblem p;
    try {
        p = biharm::assemble_level(config, family.surface(), u, family.mesh(level));
    } catch (const biharm::IoError&) {
        throw;
    } catch (const biharm::Error& e) {
        throw biharm::LevelFailure(level, e.what());
    }
    make_parent(prefix);
    biharm::write_matrix_market(prefix + "_A.mtx", p.system.A);
    biharm::write_matrix_market(prefix + "_b.mtx", p.system.b);
    biharm::write_matrix_market(prefix + "_c.mtx", p.system.c);
    std::printf("wrote %s_A.mtx (%ld x %ld, %ld nonzeros), %s_b.mtx, %s_c.mtx\n", prefix.c_str(),
                static_cast<long>(p.system.A.rows()), static_cast<long>(p.system.A.cols()),
                static_cast<long>(p.system.A.nonZeros()), prefix.c_str(), prefix.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Surface biharmonic solver (recovered-gradient C0 interior penalty)"};
    app.require_subcommand(1);

    std::string config_path, surface, prefix;
    int level = 0;

    auto* study = app.add_subcommand("study", "run a convergence study described by a config file");
    study->add_option("config", config_path, "config file (key = value)")->required();

    auto* info = app.add_subcommand("mesh-info", "print statistics of one mesh of a family");
    info->add_option("surface", surface, "sphere, torus, heart or a registered surface")->required();
    info->add_option("level", level, "icosphere level, torus grid size or refinement count")->required();

    auto* dump = app.add_subcommand("dump-system", "write A, b and c of one level as MatrixMarket");
    dump->add_option("config", config_path, "config file")->required();
    dump->add_option("level", level, "level of the configured family")->required();
    dump->add_option("prefix", prefix, "output path prefix")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*study) return cmd_study(config_path);
        if (*info) return cmd_mesh_info(surface, level);
        if (*dump) return cmd_dump_system(config_path, level, prefix);
    } catch (const biharm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const biharm::LevelFailure& e) {
        std::cerr << "numerical failure at " << e.what() << '\n';
        return kNumericalError;
    } catch (const biharm::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const biharm::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const biharm::Error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalError;
    }
    return kUsageError;
}
