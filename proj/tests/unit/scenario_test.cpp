#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "varq/scenario.hpp"

using namespace varq;

namespace {

const char* eigen_config = R"({
  "scenario": "eigen",
  "grid": {"axes": [{"points": 512, "min": -10, "max": 10, "boundary": "dirichlet"}]},
  "physics": {"hbar": 1, "masses": [1], "potential": {"type": "harmonic", "k": 1}},
  "levels": 3
})";

const char* torus_config = R"({
  "scenario": "bipartite",
  "grid": {"axes": [{"points": 128, "min": -8, "max": 8, "boundary": "periodic"},
                    {"points": 128, "min": -8, "max": 8, "boundary": "periodic"}]},
  "physics": {"masses": [1, 1], "potential": {"type": "harmonic", "k": 1}},
  "levels": 2
})";

bool has_diagnostic(const std::vector<Diagnostic>& ds, Severity sev, const std::string& path,
                    const std::string& fragment = "") {
  return std::any_of(ds.begin(), ds.end(), [&](const Diagnostic& d) {
    return d.severity == sev && d.path == path && d.message.find(fragment) != std::string::npos;
  });
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("varq_unit_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("scenario names round trip") {
    for (ScenarioKind k : {ScenarioKind::eigen, ScenarioKind::evolve, ScenarioKind::fluctuate,
                           ScenarioKind::constraint_check, ScenarioKind::vanishing_momentum, ScenarioKind::bipartite,
                           ScenarioKind::three_route, ScenarioKind::compare_propagators})
      CHECK(parse_scenario_name(scenario_name(k)) == k);
    CHECK(!parse_scenario_name("nonsense").has_value());
  }

  TEST_CASE("a valid configuration has no diagnostics") {
    CHECK(validate_config(eigen_config).empty());
    CHECK(validate_config(torus_config).empty());
    const ScenarioConfig c = parse_config(eigen_config);
    CHECK(c.scenario == ScenarioKind::eigen);
    CHECK(c.levels == 3);
    CHECK(c.grid.axis(0).n_points == 512);
  }

  TEST_CASE("every violation is reported with its field path") {
    const auto ds = validate_config(R"({
      "scenario": "eigen", "bogus": 1,
      "grid": {"axes": [{"points": 512, "min": -10, "max": 10, "boundary": "dirichlet"}]},
      "physics": {"masses": [-1], "potential": {"type": "harmonic", "k": -2}},
      "tolerances": {"energy": 0}
    })");
    CHECK(has_diagnostic(ds, Severity::error, "bogus", "unknown"));
    CHECK(has_diagnostic(ds, Severity::error, "physics.masses[0]", "positive"));
    CHECK(has_diagnostic(ds, Severity::error, "physics.potential.k", "positive"));
    CHECK(has_diagnostic(ds, Severity::error, "tolerances.energy", "positive"));
    CHECK_THROWS_AS(parse_config("{ not json"), InvalidConfig);
    try {
      parse_config(R"({"scenario": "eigen", "physics": {"masses": [-1]}})");
      FAIL("expected InvalidConfig");
    } catch (const InvalidConfig& e) {
      CHECK(std::string(e.what()).find("physics.masses[0]") != std::string::npos);
    }
  }

  TEST_CASE("cross-field rules") {
    // Bipartite scenarios need two masses and a square periodic plane.
    CHECK(has_diagnostic(validate_config(R"({"scenario": "bipartite",
      "grid": {"axes": [{"points": 64, "min": -8, "max": 8, "boundary": "periodic"},
                        {"points": 64, "min": -8, "max": 8, "boundary": "dirichlet"}]},
      "physics": {"masses": [1, 1]}})"),
                         Severity::error, "grid.axes"));
    CHECK(!validate_config(R"({"scenario": "three-route",
      "grid": {"axes": [{"points": 64, "min": -8, "max": 8, "boundary": "periodic"},
                        {"points": 64, "min": -8, "max": 8, "boundary": "periodic"}]},
      "physics": {"masses": [1]}})")
               .empty());
    // Fluctuation sampling must be seeded.
    CHECK(has_diagnostic(validate_config(R"({"scenario": "fluctuate"})"), Severity::error, "seed"));
    CHECK(parse_config(R"({"scenario": "fluctuate"})", 7).seed == 7u);
    // Too many levels for the grid.
    CHECK(!validate_config(R"({"scenario": "eigen",
      "grid": {"axes": [{"points": 32, "min": -5, "max": 5, "boundary": "dirichlet"}]}, "levels": 20})")
               .empty());
  }

  TEST_CASE("stiff time steps warn and name the bound") {
    const auto ds = validate_config(R"({"scenario": "compare-propagators",
      "grid": {"axes": [{"points": 512, "min": -8, "max": 8, "boundary": "periodic"}]},
      "physics": {"potential": {"type": "harmonic", "k": 1}},
      "evolve": {"dt": 0.02, "steps": 10}})");
    CHECK(has_diagnostic(ds, Severity::warning, "evolve.dt", "exceeds 0.5"));
    CHECK(has_diagnostic(ds, Severity::warning, "evolve.dt", "stability bound"));
    CHECK(std::none_of(ds.begin(), ds.end(), [](const Diagnostic& d) { return d.severity == Severity::error; }));
  }

  TEST_CASE("config hash is key-order independent and seed sensitive") {
    const ScenarioConfig a = parse_config(eigen_config);
    const ScenarioConfig b = parse_config(R"({"levels": 3, "physics": {"potential": {"k": 1, "type": "harmonic"},
      "masses": [1], "hbar": 1}, "grid": {"axes": [{"boundary": "dirichlet", "max": 10, "min": -10, "points": 512}]},
      "scenario": "eigen"})");
    CHECK(config_hash(a.canonical) == config_hash(b.canonical));
    const ScenarioConfig c = parse_config(R"({"scenario": "fluctuate"})", 1);
    const ScenarioConfig d = parse_config(R"({"scenario": "fluctuate"})", 2);
    CHECK(config_hash(c.canonical) != config_hash(d.canonical));
    CHECK(config_hash("").size() == 16);
    // FNV-1a 64 offset basis and the published value for "a".
    CHECK(config_hash("") == "cbf29ce484222325");
    CHECK(config_hash("a") == "af63dc4c8601ec8c");
  }

  TEST_CASE("eigen report is deterministic and passes") {
    const ScenarioConfig c = parse_config(eigen_config);
    const ScenarioReport r1 = run_scenario(c);
    const ScenarioReport r2 = run_scenario(c);
    CHECK(r1.passed());
    CHECK(exit_code(r1) == 0);
    CHECK(report_json(r1) == report_json(r2));
    CHECK(report_json(r1).find("\"config_hash\": \"" + r1.config_hash + "\"") != std::string::npos);
    CHECK(report_json(r1).find("timestamp") == std::string::npos);
  }

  TEST_CASE("a failing check gives exit code 2") {
    const ScenarioConfig c = parse_config(R"({"scenario": "eigen",
      "grid": {"axes": [{"points": 64, "min": -10, "max": 10, "boundary": "dirichlet"}]},
      "physics": {"potential": {"type": "harmonic", "k": 1}}, "levels": 3})");
    const ScenarioReport r = run_scenario(c);
    CHECK(!r.passed());
    CHECK(exit_code(r) == 2);
  }

  TEST_CASE("plot files carry provenance headers and the documented layout") {
    const auto dir = scratch("plots");
    const ScenarioReport r = run_scenario(parse_config(eigen_config));
    const auto written = emit_plot_data(r, dir.string(), {"quantum_potential", "spectrum"});
    REQUIRE(written.size() == 2);

    const auto q = lines_of(slurp(dir / "quantum_potential.dat"));
    REQUIRE(q.size() == 4 + 512);
    CHECK(q[0].rfind("# varq ", 0) == 0);
    CHECK(q[1] == "# config_hash " + r.config_hash);
    CHECK(q[2] == "# series quantum_potential");
    CHECK(q[3].rfind("# columns x ", 0) == 0);
    double x = 0.0, val = 0.0;
    std::istringstream(q[4]) >> x >> val;
    CHECK(x == -10.0);

    const auto s = lines_of(slurp(dir / "spectrum.dat"));
    REQUIRE(s.size() == 4 + 3);
    CHECK(s[3].rfind("# columns n", 0) == 0);
    double n = -1.0, e = 0.0;
    std::istringstream(s[5]) >> n >> e;
    CHECK(n == 1.0);
    CHECK(e == doctest::Approx(1.5).epsilon(1e-3));

    CHECK_THROWS_AS(emit_plot_data(r, dir.string(), {"missing"}), InvalidArgument);
    std::filesystem::remove_all(dir);
  }

  TEST_CASE("2D series are written row-major with axis headers") {
    const auto dir = scratch("grid");
    const ScenarioReport r = run_scenario(parse_config(torus_config));
    CHECK(r.passed());
    emit_plot_data(r, dir.string(), {"density_2d"});
    const auto lines = lines_of(slurp(dir / "density_2d.dat"));
    REQUIRE(lines.size() == 6 + 128);
    CHECK(lines[3].rfind("# grid 128 x 128 row-major", 0) == 0);
    CHECK(lines[4].rfind("# x_a: -8 ", 0) == 0);
    CHECK(lines[5].rfind("# x_b: -8 ", 0) == 0);
    std::istringstream row(lines[6]);
    std::size_t count = 0;
    for (double v; row >> v;) ++count;
    CHECK(count == 128);
    std::filesystem::remove_all(dir);
  }
}
