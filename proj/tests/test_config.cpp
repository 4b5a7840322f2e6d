#include "biharm/config.hpp"
#include "biharm/errors.hpp"
#include "biharm/matrix_market.hpp"

#include "support.hpp"

#include <doctest.h>

#include <filesystem>
#include <sstream>

using namespace biharm;

namespace {

StudyConfig parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

std::string error_key(const std::string& text) {
    try {
        parse(text);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "<no error>";
}

} // namespace

TEST_CASE("default study parameters") {
    const StudyConfig c = parse("");
    CHECK(c.penalty.gamma == 10.0);
    CHECK(c.penalty.gamma_stab == 1.0);
    CHECK(c.penalty.scaling == PenaltyScaling::Local);
    CHECK(c.quadrature_degree == 4);
    CHECK(c.recovery == RecoveryBackend::WA);
    CHECK(c.format == TableFormat::Csv);
    CHECK(c.surface == "sphere");
    CHECK(c.solution == "xy");
}

TEST_CASE("a full config") {
    const StudyConfig c = parse(R"(# torus study
surface = torus
solution = "y_over_r"   # quoted values are fine
recovery = pppr
gamma = 12.5
gamma_stab = 0.5
penalty_scaling = global
levels = 20..160
quadrature_degree = 6
output = out/torus
format = markdown
)");
    CHECK(c.surface == "torus");
    CHECK(c.solution == "y_over_r");
    CHECK(c.recovery == RecoveryBackend::PPPR);
    CHECK(c.penalty.gamma == 12.5);
    CHECK(c.penalty.gamma_stab == 0.5);
    CHECK(c.penalty.scaling == PenaltyScaling::Global);
    CHECK(c.levels == std::vector<int>{20, 40, 80, 160});
    CHECK(c.quadrature_degree == 6);
    CHECK(c.output == "out/torus");
    CHECK(c.format == TableFormat::Markdown);
}

TEST_CASE("level lists") {
    CHECK(parse_levels("3..5", false) == std::vector<int>{3, 4, 5});
    CHECK(parse_levels("n=20..160", true) == std::vector<int>{20, 40, 80, 160});
    CHECK(parse_levels("20, 40 80", true) == std::vector<int>{20, 40, 80});
    CHECK(parse_levels("4", false) == std::vector<int>{4});
    CHECK_THROWS_AS(parse_levels("5..3", false), ConfigError);
    CHECK_THROWS_AS(parse_levels("three", false), ConfigError);
    CHECK(parse("surface = heart\nlevels = 0..3\n").levels == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("invalid entries name their key") {
    CHECK(error_key("gamma = -1\n") == "gamma");
    CHECK(error_key("gamma = ten\n") == "gamma");
    CHECK(error_key("gamma_stab = 0\n") == "gamma_stab");
    CHECK(error_key("recovery = spr\n") == "recovery");
    CHECK(error_key("penalty_scaling = edge\n") == "penalty_scaling");
    CHECK(error_key("quadrature_degree = 9\n") == "quadrature_degree");
    CHECK(error_key("format = pdf\n") == "format");
    CHECK(error_key("levels = 3..12\n") == "levels");
    CHECK(error_key("surface = torus\nlevels = 2..8\n") == "levels");
    CHECK(error_key("levels = 4, 3\n") == "levels");
    CHECK(error_key("colour = blue\n") == "colour");
    CHECK(error_key("gamma = 1\ngamma = 2\n") == "gamma");
    CHECK(error_key("just words\n") == "just words");
    try {
        parse("gamma = -1\n");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("gamma") != std::string::npos);
    }
    CHECK_THROWS_AS(load_config("/nonexistent/biharm.cfg"), IoError);
}

TEST_CASE("convergence table formatting") {
    ConvergenceTable t;
    t.add(3, 642, 0.2, {1.0, 2.0, 3.0, 4.0});
    const std::string single = t.to_csv();
    CHECK(single == "level,dofs,h,D2e,D2e_order,De,De_order,e0,e0_order,Dre,Dre_order\n"
                    "3,642,2.000000e-01,1.000000e+00,,2.000000e+00,,3.000000e+00,,4.000000e+00,\n");
    t.add(4, 2562, 0.1, {0.5, 1.0, 0.75, 1.0});
    REQUIRE(t.rows[1].orders[0].has_value());
    CHECK(*t.rows[1].orders[0] == doctest::Approx(1.0));
    CHECK(*t.rows[1].orders[2] == doctest::Approx(2.0));
    CHECK_FALSE(t.rows[0].orders[0].has_value());
    CHECK(estimated_order(4.0, 1.0, 0.2, 0.1) == doctest::Approx(2.0));

    const std::string md = t.to_markdown();
    std::istringstream lines(md);
    std::string line;
    std::size_t width = 0;
    int rows = 0;
    while (std::getline(lines, line)) {
        if (line.empty() || line[0] != '|') continue;
        if (width == 0) width = line.size();
        CHECK(line.size() == width);
        ++rows;
    }
    CHECK(rows == 4);
}

TEST_CASE("paired surfaces") {
    CHECK(paired_surface("xy") == "sphere");
    CHECK(paired_surface("y_over_r") == "torus");
    CHECK(paired_surface("y") == "heart");
    CHECK_FALSE(paired_surface("z2").has_value());
}

TEST_CASE("mesh families") {
    StudyConfig c;
    c.surface = "torus";
    CHECK(MeshFamily(c).mesh(20).num_vertices() == 400);
    c.surface = "sphere";
    CHECK(MeshFamily(c).mesh(3).num_vertices() == 642);
    c.surface = "heart";
    MeshFamily heart(c);
    CHECK(heart.mesh(0).num_vertices() == 162);
    CHECK(heart.mesh(2).num_vertices() == 2562);
    double max_phi = 0.0;
    for (const Vec3& v : heart.mesh(2).vertices()) max_phi = std::max(max_phi, std::abs(heart.surface().phi()(v)));
    CHECK(max_phi < 1e-10);

    const auto path = std::filesystem::temp_directory_path() / "biharm_family.off";
    save_off(icosphere(1), path);
    c.surface = path.string();
    CHECK_THROWS_AS(MeshFamily{c}, PreconditionError);
    c.level_set = "sphere";
    MeshFamily from_file(c);
    CHECK(from_file.surface().name() == "sphere");
    CHECK(from_file.mesh(1).num_vertices() == 162);
    std::filesystem::remove(path);
}

TEST_CASE("MatrixMarket round trip is bit-identical") {
    const auto dir = std::filesystem::temp_directory_path();
    std::vector<Triplet> t = {{0, 0, 1.0 / 3.0}, {2, 1, -2e-17}, {1, 2, 12345.678901234567}, {2, 2, 3.0}};
    SparseMatrix A(3, 3);
    A.setFromTriplets(t.begin(), t.end());
    A.makeCompressed();
    write_matrix_market((dir / "biharm_A.mtx").string(), A);
    const SparseMatrix B = read_matrix_market_matrix((dir / "biharm_A.mtx").string());
    CHECK(B.nonZeros() == A.nonZeros());
    CHECK(SparseMatrix(A - B).coeffs().cwiseAbs().maxCoeff() == 0.0);

    Vector v(3);
    v << std::acos(-1.0), -1e-300, 7.0;
    write_matrix_market((dir / "biharm_v.mtx").string(), v);
    const Vector w = read_matrix_market_vector((dir / "biharm_v.mtx").string());
    CHECK(w == v);
    CHECK_THROWS_AS(read_matrix_market_matrix((dir / "biharm_v.mtx").string()), ParseError);
    CHECK_THROWS_AS(read_matrix_market_vector((dir / "missing.mtx").string()), IoError);
}
