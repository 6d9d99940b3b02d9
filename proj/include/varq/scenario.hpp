#pragma once

// Batch scenarios: JSON configuration, dispatch to the numerical modules,
// tolerance checks, and plain-text plot data.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "varq/bipartite.hpp"
#include "varq/fluctuation.hpp"

namespace varq {

enum class ScenarioKind {
  eigen,
  evolve,
  fluctuate,
  constraint_check,
  vanishing_momentum,
  bipartite,
  three_route,
  compare_propagators,
};

const char* scenario_name(ScenarioKind kind);
std::optional<ScenarioKind> parse_scenario_name(const std::string& name);

/// Check thresholds. Every field must be positive.
struct Tolerances {
  double energy = 1e-3;            // |E_n - closed form|
  double eigen_residual = 1e-8;    // ||H psi - E psi|| on the solver grid
  double identity = 1e-4;          // |V + Q - E| on checked nodes
  double density_rate = 1e-8;      // |drho/dt| per unit time
  double nonlinear = 1e-6;         // rho-weighted nonlinear momentum residual
  double roundoff = 1e-10;         // residuals expected to vanish exactly
  double bracket = 1e-4;           // normalized Poisson bracket
  double uncertainty = 1e-2;       // relative error of <dx dp> against hbar/2
  double covariance_sigmas = 3.0;  // |cov| in Monte Carlo standard errors
  double kl = 1e-8;                // numeric optimizer against the closed form
  double lift_residual = 1e-3;     // lifted state against the plane Hamiltonian
  double constraint = 1e-6;        // ||(p_a + p_b) Psi|| / ||Psi||
  double route_deviation = 2e-3;   // pairwise spread of the three routes
  double stationarity = 1e-4;      // augmented-action residuals
  double density_l2 = 1e-3;        // Madelung against wavefunction density
  double norm_drift = 1e-10;       // per 1000 steps
};

/// Gaussian packet exp(-(x - center)^2 / 4 width^2 + i momentum x / hbar).
struct InitialPacket {
  double center = 0.0;
  double width = 1.0;
  double momentum = 0.0;
};

struct EvolveSettings {
  double dt = 1e-3;
  std::size_t steps = 1000;
  std::size_t record_every = 100;
  InitialPacket packet;
};

struct FluctuateSettings {
  int dimension = 1;
  double dt = 0.1;
  double window = 0.0;  // 0 selects the default per axis
  std::uint64_t samples = 1000000;
  unsigned threads = 0;
  bool optimizer = true;  // also run the numeric optimizer and compare
};

struct ScenarioConfig {
  ScenarioKind scenario = ScenarioKind::eigen;
  GridSpec grid = GridSpec::line({1024, -10.0, 10.0, Boundary::dirichlet});
  /// For bipartite scenarios `potential` is the relative potential and the
  /// masses are (m_a, m_b).
  PhysicalParams params;
  std::size_t levels = 5;
  std::optional<std::uint64_t> seed;
  Tolerances tolerances;
  EvolveSettings evolve;
  FluctuateSettings fluctuate;
  std::vector<std::string> plots;  // series to emit; empty means all
  std::string canonical;            // sorted-key JSON the hash is taken over
};

enum class Severity { error, warning };

struct Diagnostic {
  Severity severity = Severity::error;
  std::string path;  // dotted field path, e.g. "physics.masses[0]"
  std::string message;
};

/// Schema and physics sanity checks without running. Reports every
/// violation, not just the first.
std::vector<Diagnostic> validate_config(const std::string& json_text);

/// Parses a configuration, applying an optional seed override. Throws
/// InvalidConfig listing every error diagnostic.
ScenarioConfig parse_config(const std::string& json_text, std::optional<std::uint64_t> seed_override = {});

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool at_least = false;  // value must exceed the tolerance instead
  bool passed = false;
};

/// Plot series. Column series hold equal-length columns; grid series hold
/// row-major values over (axis0, axis1) coordinates.
struct Series {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> columns;
  std::vector<double> axis0;
  std::vector<double> axis1;
  std::vector<double> grid_values;
  bool gridded() const { return !grid_values.empty(); }
};

struct ScenarioReport {
  ScenarioKind scenario = ScenarioKind::eigen;
  std::string version;
  std::string config_hash;  // FNV-1a 64 of the canonical configuration
  std::optional<std::uint64_t> seed;
  std::vector<Check> checks;
  std::vector<std::pair<std::string, double>> scalars;
  std::vector<std::pair<std::string, std::vector<double>>> arrays;
  std::vector<std::pair<std::string, std::string>> labels;
  std::vector<std::string> warnings;
  std::map<std::string, Series> series;

  bool passed() const;
};

std::string config_hash(const std::string& canonical_json);

ScenarioReport run_scenario(const ScenarioConfig& config);

/// Deterministic JSON rendering: no timestamps, fixed key order.
std::string report_json(const ScenarioReport& report);

/// Writes `<dir>/<name>.dat` for each requested series (all when `which` is
/// empty) and returns the written paths. Throws InvalidArgument on a
/// missing series and IoFailure when a file cannot be written.
std::vector<std::string> emit_plot_data(const ScenarioReport& report, const std::string& dir,
                                        const std::vector<std::string>& which = {});

/// 0 when every check passes, 2 otherwise.
int exit_code(const ScenarioReport& report);

}  // namespace varq
