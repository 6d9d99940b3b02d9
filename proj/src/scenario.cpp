#include "varq/scenario.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace varq {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr std::pair<ScenarioKind, const char*> scenario_names[] = {
    {ScenarioKind::eigen, "eigen"},
    {ScenarioKind::evolve, "evolve"},
    {ScenarioKind::fluctuate, "fluctuate"},
    {ScenarioKind::constraint_check, "constraint-check"},
    {ScenarioKind::vanishing_momentum, "vanishing-momentum"},
    {ScenarioKind::bipartite, "bipartite"},
    {ScenarioKind::three_route, "three-route"},
    {ScenarioKind::compare_propagators, "compare-propagators"},
};

bool is_plane_scenario(ScenarioKind k) { return k == ScenarioKind::bipartite || k == ScenarioKind::three_route; }

// ---------------------------------------------------------------- parsing

class Reader {
 public:
  explicit Reader(std::vector<Diagnostic>& diags) : diags_(diags) {}

  void error(const std::string& path, const std::string& msg) { diags_.push_back({Severity::error, path, msg}); }
  void warn(const std::string& path, const std::string& msg) { diags_.push_back({Severity::warning, path, msg}); }

  bool has_errors() const {
    return std::any_of(diags_.begin(), diags_.end(), [](const Diagnostic& d) { return d.severity == Severity::error; });
  }

  void allowed_keys(const json& obj, const std::string& base, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) return;
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      const bool known = std::any_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; });
      if (!known) error(join(base, it.key()), "unknown field");
    }
  }

  const json* object(const json& parent, const char* key, const std::string& base) {
    if (!parent.contains(key)) return nullptr;
    const json& v = parent.at(key);
    if (!v.is_object()) {
      error(join(base, key), "must be an object");
      return nullptr;
    }
    return &v;
  }

  double number(const json& obj, const char* key, const std::string& base, double fallback, bool positive = false) {
    if (!obj.contains(key)) return fallback;
    return number_value(obj.at(key), join(base, key), fallback, positive);
  }

  double number_value(const json& v, const std::string& path, double fallback, bool positive) {
    if (!v.is_number()) {
      error(path, "must be a number");
      return fallback;
    }
    const double x = v.get<double>();
    if (!std::isfinite(x)) {
      error(path, "must be finite");
      return fallback;
    }
    if (positive && !(x > 0.0)) {
      error(path, "must be positive, got " + format(x));
      return fallback;
    }
    return x;
  }

  std::uint64_t count(const json& obj, const char* key, const std::string& base, std::uint64_t fallback,
                      std::uint64_t minimum = 0) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    const std::string path = join(base, key);
    if (v.is_number_integer() && v.get<std::int64_t>() < 0) {
      error(path, "must be a non-negative integer");
      return fallback;
    }
    if (!v.is_number_unsigned() && !v.is_number_integer()) {
      error(path, "must be a non-negative integer");
      return fallback;
    }
    const auto x = v.get<std::uint64_t>();
    if (x < minimum) {
      error(path, "must be at least " + std::to_string(minimum));
      return fallback;
    }
    return x;
  }

  std::string string(const json& obj, const char* key, const std::string& base, const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_string()) {
      error(join(base, key), "must be a string");
      return fallback;
    }
    return obj.at(key).get<std::string>();
  }

  bool boolean(const json& obj, const char* key, const std::string& base, bool fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj.at(key).is_boolean()) {
      error(join(base, key), "must be true or false");
      return fallback;
    }
    return obj.at(key).get<bool>();
  }

  static std::string join(const std::string& base, const std::string& key) {
    return base.empty() ? key : base + "." + key;
  }

  static std::string format(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
  }

 private:
  std::vector<Diagnostic>& diags_;
};

std::optional<Axis> parse_axis(const json& v, const std::string& path, Reader& r) {
  if (!v.is_object()) {
    r.error(path, "must be an object");
    return std::nullopt;
  }
  r.allowed_keys(v, path, {"points", "min", "max", "boundary"});
  Axis axis;
  axis.n_points = r.count(v, "points", path, 0, 8);
  if (!v.contains("points")) r.error(path + ".points", "is required");
  axis.x_min = r.number(v, "min", path, 0.0);
  axis.x_max = r.number(v, "max", path, 1.0);
  if (!v.contains("min")) r.error(path + ".min", "is required");
  if (!v.contains("max")) r.error(path + ".max", "is required");
  if (!(axis.x_max > axis.x_min)) r.error(path + ".max", "must exceed min");
  const std::string b = r.string(v, "boundary", path, "dirichlet");
  if (b == "dirichlet")
    axis.boundary = Boundary::dirichlet;
  else if (b == "periodic")
    axis.boundary = Boundary::periodic;
  else
    r.error(path + ".boundary", "must be \"dirichlet\" or \"periodic\", got \"" + b + "\"");
  if (axis.n_points < 8 || !(axis.x_max > axis.x_min)) return std::nullopt;
  return axis;
}

std::optional<PotentialSpec> parse_potential(const json& v, const std::string& path, Reader& r) {
  if (!v.is_object()) {
    r.error(path, "must be an object");
    return std::nullopt;
  }
  const std::string type = r.string(v, "type", path, "");
  if (type == "free") {
    r.allowed_keys(v, path, {"type"});
    return PotentialSpec::free();
  }
  if (type == "harmonic") {
    r.allowed_keys(v, path, {"type", "k", "center"});
    const double k = r.number(v, "k", path, 1.0, true);
    const double c = r.number(v, "center", path, 0.0);
    return PotentialSpec::harmonic(k, c);
  }
  if (type == "infinite_well") {
    r.allowed_keys(v, path, {"type", "width"});
    if (!v.contains("width")) r.error(path + ".width", "is required");
    return PotentialSpec::infinite_well(r.number(v, "width", path, 1.0, true));
  }
  r.error(path + ".type", "must be one of free, harmonic, infinite_well");
  return std::nullopt;
}

double max_abs_potential(const PotentialSpec& spec, const GridSpec& grid) {
  const RealField v = sample_potential(spec, grid);
  double m = 0.0;
  for (double x : v.values()) m = std::max(m, std::abs(x));
  return m;
}

ScenarioConfig parse_impl(const std::string& text, std::optional<std::uint64_t> seed_override,
                          std::vector<Diagnostic>& diags) {
  Reader r(diags);
  ScenarioConfig cfg;
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    r.error("", std::string("not valid JSON: ") + e.what());
    return cfg;
  }
  if (!root.is_object()) {
    r.error("", "top level must be an object");
    return cfg;
  }
  if (seed_override) root["seed"] = *seed_override;
  r.allowed_keys(root, "",
                 {"scenario", "grid", "physics", "levels", "seed", "tolerances", "evolve", "fluctuate", "output"});

  // Scenario.
  bool scenario_ok = false;
  if (!root.contains("scenario")) {
    r.error("scenario", "is required");
  } else if (!root.at("scenario").is_string()) {
    r.error("scenario", "must be a string");
  } else if (auto k = parse_scenario_name(root.at("scenario").get<std::string>())) {
    cfg.scenario = *k;
    scenario_ok = true;
  } else {
    r.error("scenario", "unknown scenario \"" + root.at("scenario").get<std::string>() + "\"");
  }
  const ScenarioKind kind = cfg.scenario;

  // Grid.
  bool grid_ok = false;
  if (const json* g = r.object(root, "grid", "")) {
    r.allowed_keys(*g, "grid", {"axes"});
    if (!g->contains("axes") || !g->at("axes").is_array() || g->at("axes").empty() || g->at("axes").size() > 2) {
      r.error("grid.axes", "must be an array of one or two axes");
    } else {
      const json& axes = g->at("axes");
      std::vector<Axis> parsed;
      for (std::size_t i = 0; i < axes.size(); ++i)
        if (auto a = parse_axis(axes[i], "grid.axes[" + std::to_string(i) + "]", r)) parsed.push_back(*a);
      if (parsed.size() == axes.size()) {
        cfg.grid = parsed.size() == 1 ? GridSpec::line(parsed[0]) : GridSpec::plane(parsed[0], parsed[1]);
        grid_ok = true;
      }
    }
  } else if (kind != ScenarioKind::fluctuate) {
    r.error("grid", "is required");
  }

  // Physics.
  bool potential_ok = true;
  if (const json* p = r.object(root, "physics", "")) {
    r.allowed_keys(*p, "physics", {"hbar", "masses", "potential"});
    cfg.params.hbar = r.number(*p, "hbar", "physics", 1.0, true);
    if (p->contains("masses")) {
      const json& m = p->at("masses");
      if (!m.is_array() || m.empty() || m.size() > 2) {
        r.error("physics.masses", "must be an array of one or two masses");
      } else {
        for (std::size_t i = 0; i < m.size(); ++i)
          cfg.params.masses[i] = r.number_value(m[i], "physics.masses[" + std::to_string(i) + "]", 1.0, true);
        if (m.size() == 1) cfg.params.masses[1] = cfg.params.masses[0];
        if (m.size() == 1 && is_plane_scenario(kind) && scenario_ok)
          r.error("physics.masses", "two-particle scenarios need two masses");
      }
    }
    if (p->contains("potential")) {
      if (auto pot = parse_potential(p->at("potential"), "physics.potential", r))
        cfg.params.potential = *pot;
      else
        potential_ok = false;
    }
  }

  cfg.levels = r.count(root, "levels", "", 5, 1);

  if (root.contains("seed")) cfg.seed = r.count(root, "seed", "", 0);
  if (kind == ScenarioKind::fluctuate && scenario_ok && !root.contains("seed"))
    r.error("seed", "is required for the stochastic scenario \"fluctuate\"");

  if (const json* t = r.object(root, "tolerances", "")) {
    Tolerances& tol = cfg.tolerances;
    const std::pair<const char*, double*> fields[] = {
        {"energy", &tol.energy},
        {"eigen_residual", &tol.eigen_residual},
        {"identity", &tol.identity},
        {"density_rate", &tol.density_rate},
        {"nonlinear", &tol.nonlinear},
        {"roundoff", &tol.roundoff},
        {"bracket", &tol.bracket},
        {"uncertainty", &tol.uncertainty},
        {"covariance_sigmas", &tol.covariance_sigmas},
        {"kl", &tol.kl},
        {"lift_residual", &tol.lift_residual},
        {"constraint", &tol.constraint},
        {"route_deviation", &tol.route_deviation},
        {"stationarity", &tol.stationarity},
        {"density_l2", &tol.density_l2},
        {"norm_drift", &tol.norm_drift},
    };
    for (auto it = t->begin(); it != t->end(); ++it) {
      const bool known = std::any_of(std::begin(fields), std::end(fields),
                                     [&](const auto& f) { return it.key() == f.first; });
      if (!known) r.error("tolerances." + it.key(), "unknown tolerance");
    }
    for (const auto& [key, target] : fields) *target = r.number(*t, key, "tolerances", *target, true);
  }

  if (const json* e = r.object(root, "evolve", "")) {
    r.allowed_keys(*e, "evolve", {"dt", "steps", "record_every", "packet"});
    cfg.evolve.dt = r.number(*e, "dt", "evolve", cfg.evolve.dt, true);
    cfg.evolve.steps = r.count(*e, "steps", "evolve", cfg.evolve.steps, 1);
    cfg.evolve.record_every = r.count(*e, "record_every", "evolve", cfg.evolve.record_every);
    if (const json* pk = r.object(*e, "packet", "evolve")) {
      r.allowed_keys(*pk, "evolve.packet", {"center", "width", "momentum"});
      cfg.evolve.packet.center = r.number(*pk, "center", "evolve.packet", 0.0);
      cfg.evolve.packet.width = r.number(*pk, "width", "evolve.packet", 1.0, true);
      cfg.evolve.packet.momentum = r.number(*pk, "momentum", "evolve.packet", 0.0);
    }
  }

  if (const json* f = r.object(root, "fluctuate", "")) {
    r.allowed_keys(*f, "fluctuate", {"dimension", "dt", "window", "samples", "threads", "optimizer"});
    const auto dim = r.count(*f, "dimension", "fluctuate", 1, 1);
    if (dim > 2) r.error("fluctuate.dimension", "must be 1 or 2");
    cfg.fluctuate.dimension = static_cast<int>(std::min<std::uint64_t>(dim, 2));
    cfg.fluctuate.dt = r.number(*f, "dt", "fluctuate", cfg.fluctuate.dt, true);
    cfg.fluctuate.window = r.number(*f, "window", "fluctuate", 0.0);
    if (cfg.fluctuate.window < 0.0) r.error("fluctuate.window", "must be non-negative (0 selects the default)");
    cfg.fluctuate.samples = r.count(*f, "samples", "fluctuate", cfg.fluctuate.samples, 1000);
    cfg.fluctuate.threads = static_cast<unsigned>(r.count(*f, "threads", "fluctuate", 0));
    cfg.fluctuate.optimizer = r.boolean(*f, "optimizer", "fluctuate", true);
  }

  if (const json* o = r.object(root, "output", "")) {
    r.allowed_keys(*o, "output", {"plots"});
    if (o->contains("plots")) {
      const json& pl = o->at("plots");
      if (!pl.is_array()) {
        r.error("output.plots", "must be an array of series names");
      } else {
        for (std::size_t i = 0; i < pl.size(); ++i) {
          if (pl[i].is_string())
            cfg.plots.push_back(pl[i].get<std::string>());
          else
            r.error("output.plots[" + std::to_string(i) + "]", "must be a string");
        }
      }
    }
  }

  // Cross-field checks.
  if (scenario_ok && grid_ok && kind != ScenarioKind::fluctuate) {
    const int dim = cfg.grid.dimension();
    const bool needs_plane = is_plane_scenario(kind);
    if (needs_plane && dim != 2) r.error("grid.axes", "two-particle scenarios need two axes");
    if (!needs_plane && dim == 2 && kind != ScenarioKind::constraint_check)
      r.error("grid.axes", std::string("scenario \"") + scenario_name(kind) + "\" needs one axis");
    if (dim == 2 && (needs_plane || kind == ScenarioKind::constraint_check)) {
      const Axis& a = cfg.grid.axis(0);
      const Axis& b = cfg.grid.axis(1);
      if (a.boundary != Boundary::periodic || b.boundary != Boundary::periodic || !(a == b) || a.n_points % 2 != 0)
        r.error("grid.axes", "two-particle scenarios need two identical periodic axes with an even point count");
      if (potential_ok && !std::holds_alternative<potential::Free>(cfg.params.potential.kind) &&
          !std::holds_alternative<potential::Harmonic>(cfg.params.potential.kind))
        r.error("physics.potential.type", "the relative potential must be free or harmonic");
    }
    const bool eigen_like = kind == ScenarioKind::eigen || kind == ScenarioKind::vanishing_momentum ||
                            (kind == ScenarioKind::constraint_check && dim == 1);
    if (eigen_like && dim == 1) {
      if (cfg.grid.axis(0).boundary != Boundary::dirichlet)
        r.error("grid.axes[0].boundary", "eigenstate scenarios need a Dirichlet axis");
      if (cfg.levels > cfg.grid.axis(0).n_points / 4)
        r.error("levels", "must not exceed points / 4 = " + std::to_string(cfg.grid.axis(0).n_points / 4));
    }
    if (needs_plane && dim == 2 && cfg.levels > cfg.grid.axis(0).n_points / 4)
      r.error("levels", "must not exceed points / 4 = " + std::to_string(cfg.grid.axis(0).n_points / 4));
    if (potential_ok && !needs_plane && !(dim == 2 && kind == ScenarioKind::constraint_check)) {
      PhysicalParams p = cfg.params;
      try {
        p.validate();
        (void)sample_potential(p.potential, cfg.grid);
      } catch (const Error& e) {
        r.error("physics.potential", e.what());
        potential_ok = false;
      }
    }
    if (potential_ok && (kind == ScenarioKind::evolve || kind == ScenarioKind::compare_propagators) && dim == 1) {
      const double vmax = max_abs_potential(cfg.params.potential, cfg.grid);
      const double stiffness = cfg.evolve.dt * vmax / cfg.params.hbar;
      if (stiffness > 0.5)
        r.warn("evolve.dt", "dt * max|V| / hbar = " + Reader::format(stiffness) +
                                " exceeds 0.5; the phase error per step is not small (dt <= " +
                                Reader::format(0.5 * cfg.params.hbar / vmax) + " keeps it below the bound)");
      if (kind == ScenarioKind::compare_propagators) {
        const double h = cfg.grid.axis(0).spacing();
        // RK4 reaches 2 sqrt(2) on the imaginary axis; the fourth-order
        // Laplacian has spectral radius 16 / 3h^2.
        const double bound = 2.0 * std::sqrt(2.0) * 3.0 * cfg.params.mass(0) * h * h / (8.0 * cfg.params.hbar);
        if (cfg.evolve.dt > bound)
          r.warn("evolve.dt", "dt = " + Reader::format(cfg.evolve.dt) +
                                  " exceeds the explicit stability bound 3 sqrt(2) m h^2 / 4 hbar = " +
                                  Reader::format(bound));
      }
    }
  }
  if (scenario_ok && kind == ScenarioKind::fluctuate && cfg.fluctuate.window > 0.0) {
    for (int a = 0; a < cfg.fluctuate.dimension; ++a) {
      const double sigma = fluctuation_sigma(cfg.params.hbar, cfg.fluctuate.dt, cfg.params.mass(a));
      if (cfg.fluctuate.window < 6.0 * sigma)
        r.error("fluctuate.window", "half-width " + Reader::format(cfg.fluctuate.window) +
                                        " is below six standard deviations (" + Reader::format(6.0 * sigma) +
                                        ") for axis " + std::to_string(a));
    }
  }

  cfg.canonical = root.dump();
  return cfg;
}

// ---------------------------------------------------------------- running

void add_check(ScenarioReport& rep, const std::string& name, double value, double tolerance, bool at_least = false) {
  Check c;
  c.name = name;
  c.value = value;
  c.tolerance = tolerance;
  c.at_least = at_least;
  c.passed = std::isfinite(value) && (at_least ? value > tolerance : value <= tolerance);
  rep.checks.push_back(c);
}

std::optional<std::vector<double>> closed_form_levels(const PotentialSpec& spec, double hbar, double mass,
                                                      std::size_t k) {
  std::vector<double> out;
  if (const auto* h = std::get_if<potential::Harmonic>(&spec.kind)) {
    const double omega = std::sqrt(h->k / mass);
    for (std::size_t n = 0; n < k; ++n) out.push_back(hbar * omega * (static_cast<double>(n) + 0.5));
    return out;
  }
  if (const auto* w = std::get_if<potential::InfiniteWell>(&spec.kind)) {
    for (std::size_t n = 1; n <= k; ++n) {
      const double kn = static_cast<double>(n) * std::numbers::pi / w->width;
      out.push_back(hbar * hbar * kn * kn / (2.0 * mass));
    }
    return out;
  }
  return std::nullopt;
}

double max_abs_difference(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Series spectrum_series(const std::vector<std::string>& labels, const std::vector<std::vector<double>>& energies) {
  Series s;
  s.labels = {"n"};
  s.labels.insert(s.labels.end(), labels.begin(), labels.end());
  std::vector<double> n(energies.front().size());
  for (std::size_t i = 0; i < n.size(); ++i) n[i] = static_cast<double>(i);
  s.columns.push_back(std::move(n));
  for (const auto& e : energies) s.columns.push_back(e);
  return s;
}

Series line_series(const GridSpec& grid, const std::vector<std::string>& labels,
                   std::vector<std::vector<double>> columns) {
  Series s;
  s.labels = {"x"};
  s.labels.insert(s.labels.end(), labels.begin(), labels.end());
  s.columns.push_back(grid.coordinates(0));
  for (auto& c : columns) s.columns.push_back(std::move(c));
  return s;
}

Series grid_series(const GridSpec& grid, const std::string& label, std::vector<double> values) {
  Series s;
  s.labels = {"x_a", "x_b", label};
  for (std::size_t i = 0; i < grid.axis(0).n_points; ++i) s.axis0.push_back(grid.axis(0).coordinate(i));
  for (std::size_t j = 0; j < grid.axis(1).n_points; ++j) s.axis1.push_back(grid.axis(1).coordinate(j));
  s.grid_values = std::move(values);
  return s;
}

std::vector<double> to_vector(const RealField& f) { return {f.values().begin(), f.values().end()}; }

ComplexField packet_wavefunction(const GridSpec& grid, const InitialPacket& pk, double hbar) {
  const Axis& ax = grid.axis(0);
  const int images = ax.boundary == Boundary::periodic ? 3 : 0;
  ComplexField psi(grid);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    std::complex<double> acc = 0.0;
    for (int j = -images; j <= images; ++j) {
      const double d = grid.coordinate(0, k) - pk.center + j * ax.length();
      acc += std::exp(-d * d / (4.0 * pk.width * pk.width)) *
             std::polar(1.0, pk.momentum * (grid.coordinate(0, k) + j * ax.length()) / hbar);
    }
    psi[k] = acc;
  }
  return normalize(psi);
}

RealField density_of(const ComplexField& psi) {
  RealField rho(psi.grid());
  for (std::size_t k = 0; k < psi.size(); ++k) rho[k] = std::norm(psi[k]);
  return rho;
}

double norm_drift_per_1000(const std::vector<double>& norms, std::size_t steps) {
  double drift = 0.0;
  for (double n : norms) drift = std::max(drift, std::abs(n - norms.front()));
  return drift * 1000.0 / static_cast<double>(steps);
}

BipartiteParams bipartite_from(const PhysicalParams& p) {
  BipartiteParams bp;
  bp.hbar = p.hbar;
  bp.mass_a = p.masses[0];
  bp.mass_b = p.masses[1];
  bp.relative = p.potential;
  return bp;
}

void run_eigen(const ScenarioConfig& cfg, ScenarioReport& rep) {
  const SpectrumResult spec = eigensolve_1d(cfg.params, cfg.grid, cfg.levels);
  rep.arrays.emplace_back("energies", spec.energies);
  rep.arrays.emplace_back("residuals", spec.residuals);
  add_check(rep, "max_eigen_residual", *std::max_element(spec.residuals.begin(), spec.residuals.end()),
            cfg.tolerances.eigen_residual);
  std::vector<std::vector<double>> spectra{spec.energies};
  std::vector<std::string> labels{"E"};
  if (auto exact = closed_form_levels(cfg.params.potential, cfg.params.hbar, cfg.params.mass(0), cfg.levels)) {
    rep.arrays.emplace_back("closed_form", *exact);
    add_check(rep, "max_energy_error", max_abs_difference(spec.energies, *exact), cfg.tolerances.energy);
    spectra.push_back(*exact);
    labels.push_back("E_closed_form");
  }
  rep.series["spectrum"] = spectrum_series(labels, spectra);

  std::vector<std::vector<double>> dens;
  std::vector<std::string> dl;
  for (std::size_t n = 0; n < spec.states.size(); ++n) {
    RealField rho(cfg.grid);
    for (std::size_t k = 0; k < rho.size(); ++k) rho[k] = spec.states[n][k] * spec.states[n][k];
    dens.push_back(to_vector(rho));
    dl.push_back("rho_" + std::to_string(n));
  }
  RealField rho0(cfg.grid, dens.front());
  const BohmPotential q = bohm_potential(rho0, cfg.params);
  rep.series["density"] = line_series(cfg.grid, dl, dens);
  rep.series["quantum_potential"] = line_series(cfg.grid, {"Q_0"}, {to_vector(q.value)});
}

void run_evolve(const ScenarioConfig& cfg, ScenarioReport& rep) {
  const ComplexField psi0 = packet_wavefunction(cfg.grid, cfg.evolve.packet, cfg.params.hbar);
  const WaveTrajectory traj =
      propagate_wavefunction(psi0, cfg.params, cfg.evolve.dt, cfg.evolve.steps, cfg.evolve.record_every);
  if (!traj.warning.empty()) rep.warnings.push_back(traj.warning);
  add_check(rep, "norm_drift_per_1000_steps", norm_drift_per_1000(traj.norms, cfg.evolve.steps),
            cfg.tolerances.norm_drift);
  const RealField x = RealField::sample(cfg.grid, [](double v) { return v; });
  std::vector<double> mean;
  for (const auto& f : traj.frames) {
    const RealField rho = density_of(f);
    RealField xr(cfg.grid);
    for (std::size_t k = 0; k < xr.size(); ++k) xr[k] = x[k] * rho[k];
    mean.push_back(integrate(xr) / integrate(rho));
  }
  rep.scalars.emplace_back("final_time", traj.times.back());
  rep.scalars.emplace_back("final_mean_position", mean.back());
  rep.series["norm"] = Series{{"t", "norm"}, {traj.times, traj.norms}, {}, {}, {}};
  rep.series["mean_position"] = Series{{"t", "mean_x"}, {traj.times, mean}, {}, {}, {}};
  rep.series["density"] = line_series(cfg.grid, {"rho_initial", "rho_final"},
                                      {to_vector(density_of(traj.frames.front())),
                                       to_vector(density_of(traj.frames.back()))});
}

void run_fluctuate(const ScenarioConfig& cfg, ScenarioReport& rep) {
  TransitionSetup setup;
  setup.hbar = cfg.params.hbar;
  setup.masses = cfg.params.masses;
  setup.dimension = cfg.fluctuate.dimension;
  setup.dt = cfg.fluctuate.dt;
  setup.window = {cfg.fluctuate.window, cfg.fluctuate.window};
  setup.validate();
  const TransitionDistribution dist = optimal_transition(setup);
  const FluctuationStats stats = sample_fluctuations(dist, cfg.fluctuate.samples, *cfg.seed, cfg.fluctuate.threads);
  const double target = 0.5 * cfg.params.hbar;
  for (int a = 0; a < setup.dimension; ++a) {
    const std::string suffix = setup.dimension == 2 ? (a == 0 ? "_a" : "_b") : "";
    rep.scalars.emplace_back("uncertainty_product" + suffix, stats.uncertainty_product[a]);
    rep.scalars.emplace_back("displacement_variance" + suffix, stats.variance[a]);
    rep.scalars.emplace_back("displacement_mean" + suffix, stats.mean[a]);
    add_check(rep, "uncertainty_product_relative_error" + suffix,
              std::abs(stats.uncertainty_product[a] - target) / target, cfg.tolerances.uncertainty);
  }
  if (setup.dimension == 2) {
    rep.scalars.emplace_back("covariance", stats.covariance);
    rep.scalars.emplace_back("covariance_sigma", stats.covariance_sigma);
    add_check(rep, "covariance_in_sigmas", std::abs(stats.covariance) / stats.covariance_sigma,
              cfg.tolerances.covariance_sigmas);
  }
  if (cfg.fluctuate.optimizer) {
    const std::vector<double> uniform(dist.mass.size(), 1.0 / static_cast<double>(dist.mass.size()));
    const NumericTransition numeric = optimize_transition_numeric(setup, uniform);
    rep.scalars.emplace_back("optimizer_iterations", static_cast<double>(numeric.iterations));
    rep.scalars.emplace_back("objective_numeric", numeric.objective);
    rep.scalars.emplace_back("objective_closed_form", transition_objective(dist));
    add_check(rep, "kl_numeric_vs_closed_form", kl_divergence(numeric.distribution.mass, dist.mass),
              cfg.tolerances.kl);
  }
  const Axis& ax = dist.grid.axis(0);
  std::vector<double> w, counts, density;
  const double bin = ax.spacing() * static_cast<double>(stats.samples);
  std::vector<double> marginal(ax.n_points, 0.0);
  for (std::size_t k = 0; k < dist.grid.size(); ++k) marginal[dist.grid.index(k)[0]] += dist.mass[k];
  std::vector<double> marginal_density;
  for (std::size_t i = 0; i < ax.n_points; ++i) {
    w.push_back(ax.coordinate(i));
    counts.push_back(static_cast<double>(stats.counts[i]));
    density.push_back(static_cast<double>(stats.counts[i]) / bin);
    marginal_density.push_back(marginal[i] / ax.spacing());
  }
  rep.series["histogram"] = Series{{"w", "count", "sample_density", "closed_form_density"},
                                   {w, counts, density, marginal_density}, {}, {}, {}};
  if (setup.dimension == 2)
    rep.series["transition_2d"] = grid_series(dist.grid, "p", dist.mass);
}

void run_constraint_check(const ScenarioConfig& cfg, ScenarioReport& rep) {
  const bool plane = cfg.grid.dimension() == 2;
  PhysicalParams params = cfg.params;
  std::optional<MadelungState> state;
  std::optional<RealField> aux;
  Functional phi, theta;
  if (plane) {
    const BipartiteParams bp = bipartite_from(cfg.params);
    params = bp.physical();
    const SpectrumResult red = reduced_eigensolve(bp, relative_grid_for(cfg.grid), 1);
    const ComplexField psi = lift_relative_state(red.states[0], cfg.grid);
    state.emplace(density_of(psi), RealField(cfg.grid, 0.0));
    phi = ConstraintFunctional::total_momentum();
    theta = ConstraintFunctional::relative_density();
  } else {
    const SpectrumResult spec = eigensolve_1d(cfg.params, cfg.grid, 1);
    RealField rho(cfg.grid);
    for (std::size_t k = 0; k < rho.size(); ++k) rho[k] = spec.states[0][k] * spec.states[0][k];
    state.emplace(rho, RealField(cfg.grid, 0.0));
    aux.emplace(cfg.grid, 0.0);  // stationary: drho/dt = 0
    phi = ConstraintFunctional::local_momentum(0.0);
    theta = ConstraintFunctional::density_stationarity();
  }
  const RealField* theta_aux = aux ? &*aux : nullptr;
  const Functional h = EnsembleHamiltonian{};
  const BracketReport ph = poisson_bracket(phi, h, *state, params, nullptr, nullptr, cfg.tolerances.bracket);
  const BracketReport hp = poisson_bracket(h, phi, *state, params, nullptr, nullptr, cfg.tolerances.bracket);
  const BracketReport th = poisson_bracket(theta, h, *state, params, theta_aux, nullptr, cfg.tolerances.bracket);
  rep.labels.emplace_back("phi", functional_name(phi));
  rep.labels.emplace_back("theta", functional_name(theta));
  rep.scalars.emplace_back("phi_h_value", ph.value);
  rep.scalars.emplace_back("phi_h_scale", ph.scale);
  rep.scalars.emplace_back("theta_h_value", th.value);
  add_check(rep, "phi_h_normalized", std::abs(ph.normalized), cfg.tolerances.bracket);
  add_check(rep, "theta_h_abs", std::abs(th.value), 0.0);
  add_check(rep, "antisymmetry", std::abs(ph.value + hp.value) / std::max(ph.scale, 1.0), cfg.tolerances.roundoff);

  const ConsistencyResult classical = classical_consistency(
      plane ? PhaseSpaceCase::bipartite : PhaseSpaceCase::vanishing_momentum, cfg.grid, params.potential);
  rep.scalars.emplace_back("classical_bracket_max", classical.max_abs);
  rep.labels.emplace_back("classical_secondary_constraint", classical.secondary ? "yes" : "no");
  rep.labels.emplace_back("classical_description", classical.description);
  if (plane) {
    rep.series["classical_bracket_2d"] = grid_series(cfg.grid, "bracket", to_vector(classical.bracket));
    rep.series["density_2d"] = grid_series(cfg.grid, "rho", to_vector(state->density));
  } else {
    const BohmPotential q = bohm_potential(state->density, params);
    rep.series["classical_bracket"] = line_series(cfg.grid, {"bracket"}, {to_vector(classical.bracket)});
    rep.series["density"] = line_series(cfg.grid, {"rho"}, {to_vector(state->density)});
    rep.series["quantum_potential"] = line_series(cfg.grid, {"Q"}, {to_vector(q.value)});
  }
}

void run_vanishing_momentum(const ScenarioConfig& cfg, ScenarioReport& rep) {
  const Tolerances& tol = cfg.tolerances;
  const VanishingMomentumReport vm = vanishing_momentum_scenario(cfg.params, cfg.grid, cfg.levels);
  const DiracComparison dirac = dirac_vs_simultaneous_report(vm, cfg.params, cfg.grid, 0.7, tol.nonlinear);
  rep.arrays.emplace_back("energies", vm.spectrum.energies);
  std::vector<std::vector<double>> spectra{vm.spectrum.energies};
  std::vector<std::string> labels{"E"};
  if (auto exact = closed_form_levels(cfg.params.potential, cfg.params.hbar, cfg.params.mass(0), cfg.levels)) {
    rep.arrays.emplace_back("closed_form", *exact);
    add_check(rep, "max_energy_error", max_abs_difference(vm.spectrum.energies, *exact), tol.energy);
    spectra.push_back(*exact);
    labels.push_back("E_closed_form");
  }
  double identity = 0.0, rate = 0.0, hj = 0.0, cont = 0.0, nonlinear = 0.0;
  double min_ratio = std::numeric_limits<double>::infinity();
  std::size_t not_nontrivial = 0;
  std::vector<double> ratios, nonlinear_res;
  for (const auto& s : vm.states) {
    identity = std::max(identity, s.identity_residual_max);
    rate = std::max(rate, s.density_rate_max);
    hj = std::max(hj, s.hamilton_jacobi_residual);
    cont = std::max(cont, s.continuity_residual);
    if (s.branch != Branch::nontrivial) ++not_nontrivial;
    rep.labels.emplace_back("branch_" + std::to_string(s.level), branch_name(s.branch));
  }
  for (const auto& d : dirac.eigenstates) {
    min_ratio = std::min(min_ratio, d.momentum_ratio);
    nonlinear = std::max(nonlinear, d.nonlinear_residual);
    ratios.push_back(d.momentum_ratio);
    nonlinear_res.push_back(d.nonlinear_residual);
  }
  rep.arrays.emplace_back("momentum_ratio", ratios);
  rep.arrays.emplace_back("nonlinear_residual", nonlinear_res);
  add_check(rep, "max_identity_residual", identity, tol.identity);
  add_check(rep, "max_density_rate", rate, tol.density_rate);
  add_check(rep, "max_hamilton_jacobi_residual", hj, tol.identity);
  add_check(rep, "max_continuity_residual", cont, tol.identity);
  add_check(rep, "states_not_nontrivial", static_cast<double>(not_nontrivial), 0.0);
  add_check(rep, "min_momentum_ratio", min_ratio, tol.nonlinear, true);
  add_check(rep, "max_nonlinear_residual", nonlinear, tol.nonlinear);

  const TrivialBranchCheck& tb = vm.trivial;
  rep.labels.emplace_back("branch_uniform", branch_name(tb.branch));
  add_check(rep, "trivial_is_trivial", tb.branch == Branch::trivial ? 0.0 : 1.0, 0.0);
  add_check(rep, "trivial_density_gradient", tb.density_gradient_max, tol.roundoff);
  add_check(rep, "trivial_hamilton_jacobi", tb.hamilton_jacobi_residual, tol.roundoff);
  add_check(rep, "trivial_continuity", tb.continuity_residual, tol.roundoff);
  add_check(rep, "trivial_dirac_residual", dirac.trivial.momentum_ratio, tol.roundoff);

  rep.series["spectrum"] = spectrum_series(labels, spectra);
  std::vector<std::vector<double>> dens, qs;
  std::vector<std::string> dl, ql;
  for (std::size_t n = 0; n < vm.states.size(); ++n) {
    std::vector<double> rho(cfg.grid.size());
    for (std::size_t k = 0; k < rho.size(); ++k) rho[k] = vm.spectrum.states[n][k] * vm.spectrum.states[n][k];
    dens.push_back(std::move(rho));
    qs.push_back(vm.states[n].quantum_potential);
    dl.push_back("rho_" + std::to_string(n));
    ql.push_back("Q_" + std::to_string(n));
  }
  rep.series["density"] = line_series(cfg.grid, dl, dens);
  rep.series["quantum_potential"] = line_series(cfg.grid, ql, qs);
}

void run_bipartite(const ScenarioConfig& cfg, ScenarioReport& rep) {
  const Tolerances& tol = cfg.tolerances;
  const BipartiteParams bp = bipartite_from(cfg.params);
  const SpectrumResult red = reduced_eigensolve(bp, relative_grid_for(cfg.grid), cfg.levels);
  std::vector<double> plane_e, lift_res, cons_res;
  std::optional<ComplexField> ground;
  for (std::size_t n = 0; n < cfg.levels; ++n) {
    const ComplexField psi = lift_relative_state(red.states[n], cfg.grid);
    const LiftVerification v = verify_lifted_state(psi, red.energies[n], bp, tol.lift_residual, tol.constraint);
    plane_e.push_back(v.energy);
    lift_res.push_back(v.eigen_residual);
    cons_res.push_back(v.constraint_residual);
    if (n == 0) ground.emplace(psi);
  }
  rep.scalars.emplace_back("reduced_mass", bp.reduced_mass());
  rep.arrays.emplace_back("reduced_energies", red.energies);
  rep.arrays.emplace_back("plane_energies", plane_e);
  rep.arrays.emplace_back("lift_residuals", lift_res);
  rep.arrays.emplace_back("constraint_residuals", cons_res);
  add_check(rep, "max_lift_residual", *std::max_element(lift_res.begin(), lift_res.end()), tol.lift_residual);
  add_check(rep, "max_constraint_residual", *std::max_element(cons_res.begin(), cons_res.end()), tol.constraint);
  add_check(rep, "max_plane_vs_reduced", max_abs_difference(plane_e, red.energies), tol.energy);
  std::vector<std::vector<double>> spectra{red.energies, plane_e};
  std::vector<std::string> labels{"E_reduced", "E_plane"};
  if (auto exact = closed_form_levels(bp.relative, bp.hbar, bp.reduced_mass(), cfg.levels)) {
    add_check(rep, "ground_energy_error", std::abs(red.energies[0] - exact->front()), tol.energy);
    spectra.push_back(*exact);
    labels.push_back("E_closed_form");
  }
  rep.series["spectrum"] = spectrum_series(labels, spectra);
  rep.series["density_2d"] = grid_series(cfg.grid, "rho", to_vector(density_of(*ground)));
  const ComplexField da = derivative(*ground, 0), db = derivative(*ground, 1);
  std::vector<double> field(cfg.grid.size());
  for (std::size_t k = 0; k < field.size(); ++k) field[k] = bp.hbar * std::abs(da[k] + db[k]);
  rep.series["constraint_residual_2d"] = grid_series(cfg.grid, "abs_total_momentum_psi", std::move(field));
}

void run_three_route(const ScenarioConfig& cfg, ScenarioReport& rep) {
  const Tolerances& tol = cfg.tolerances;
  const BipartiteParams bp = bipartite_from(cfg.params);
  const RouteComparison rc = three_route_comparison(bp, cfg.grid, cfg.levels);
  std::vector<double> reduced, dirac, simultaneous, lambda_total, lambda_relative, hj, cont;
  for (const auto& row : rc.rows) {
    reduced.push_back(row.reduced);
    dirac.push_back(row.dirac);
    simultaneous.push_back(row.simultaneous);
    lambda_total.push_back(row.detail.multipliers[0]);
    lambda_relative.push_back(row.detail.multipliers[1]);
    hj.push_back(row.detail.hamilton_jacobi_residual);
    cont.push_back(row.detail.continuity_residual);
  }
  rep.scalars.emplace_back("reduced_mass", bp.reduced_mass());
  rep.arrays.emplace_back("reduced", reduced);
  rep.arrays.emplace_back("dirac", dirac);
  rep.arrays.emplace_back("simultaneous", simultaneous);
  rep.arrays.emplace_back("multiplier_total_momentum", lambda_total);
  rep.arrays.emplace_back("multiplier_relative_density", lambda_relative);
  rep.arrays.emplace_back("hamilton_jacobi_residual", hj);
  rep.arrays.emplace_back("continuity_residual", cont);
  add_check(rep, "max_route_deviation", rc.max_deviation, tol.route_deviation);
  add_check(rep, "max_constraint_residual", rc.max_constraint_residual, tol.constraint);
  add_check(rep, "max_stationarity_residual", rc.max_stationarity_residual, tol.stationarity);
  add_check(rep, "max_abs_multiplier", rc.max_multiplier, tol.roundoff);
  std::vector<std::vector<double>> spectra{reduced, dirac, simultaneous};
  std::vector<std::string> labels{"E_reduced", "E_dirac", "E_simultaneous"};
  if (auto exact = closed_form_levels(bp.relative, bp.hbar, bp.reduced_mass(), cfg.levels)) {
    add_check(rep, "ground_energy_error", std::abs(reduced[0] - exact->front()), tol.energy);
    spectra.push_back(*exact);
    labels.push_back("E_closed_form");
  }
  rep.series["spectrum"] = spectrum_series(labels, spectra);
}

void run_compare_propagators(const ScenarioConfig& cfg, ScenarioReport& rep) {
  const Tolerances& tol = cfg.tolerances;
  const ComplexField psi0 = packet_wavefunction(cfg.grid, cfg.evolve.packet, cfg.params.hbar);
  const MadelungState state0 = from_wavefunction(psi0, cfg.params.hbar).state;
  const WaveTrajectory wave =
      propagate_wavefunction(psi0, cfg.params, cfg.evolve.dt, cfg.evolve.steps, cfg.evolve.record_every);
  if (!wave.warning.empty()) rep.warnings.push_back(wave.warning);
  const MadelungTrajectory mad =
      propagate_madelung(state0, cfg.params, cfg.evolve.dt, cfg.evolve.steps, cfg.evolve.record_every);
  std::vector<double> l2;
  for (std::size_t f = 0; f < std::min(wave.frames.size(), mad.frames.size()); ++f) {
    const RealField rho_w = density_of(wave.frames[f]);
    RealField diff(cfg.grid);
    for (std::size_t k = 0; k < diff.size(); ++k) {
      const double d = rho_w[k] - mad.frames[f].density[k];
      diff[k] = d * d;
    }
    l2.push_back(std::sqrt(integrate(diff)));
  }
  rep.scalars.emplace_back("final_time", wave.times.back());
  rep.scalars.emplace_back("final_density_l2", l2.back());
  add_check(rep, "max_density_l2", *std::max_element(l2.begin(), l2.end()), tol.density_l2);
  add_check(rep, "norm_drift_per_1000_steps", norm_drift_per_1000(wave.norms, cfg.evolve.steps), tol.norm_drift);
  rep.series["density_l2"] = Series{{"t", "l2"}, {wave.times, l2}, {}, {}, {}};
  rep.series["density"] = line_series(cfg.grid, {"rho_wavefunction", "rho_madelung"},
                                      {to_vector(density_of(wave.frames.back())),
                                       to_vector(mad.frames.back().density)});
}

void write_value(std::ostream& os, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  os << buf;
}

}  // namespace

const char* scenario_name(ScenarioKind kind) {
  for (const auto& [k, name] : scenario_names)
    if (k == kind) return name;
  return "unknown";
}

std::optional<ScenarioKind> parse_scenario_name(const std::string& name) {
  for (const auto& [k, n] : scenario_names)
    if (name == n) return k;
  return std::nullopt;
}

std::vector<Diagnostic> validate_config(const std::string& json_text) {
  std::vector<Diagnostic> diags;
  (void)parse_impl(json_text, std::nullopt, diags);
  return diags;
}

ScenarioConfig parse_config(const std::string& json_text, std::optional<std::uint64_t> seed_override) {
  std::vector<Diagnostic> diags;
  ScenarioConfig cfg = parse_impl(json_text, seed_override, diags);
  std::ostringstream msg;
  bool any = false;
  for (const auto& d : diags) {
    if (d.severity != Severity::error) continue;
    msg << (any ? "; " : "invalid configuration: ") << (d.path.empty() ? "<root>" : d.path) << ": " << d.message;
    any = true;
  }
  if (any) throw InvalidConfig(msg.str());
  return cfg;
}

bool ScenarioReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::string config_hash(const std::string& canonical_json) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical_json) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

ScenarioReport run_scenario(const ScenarioConfig& config) {
  ScenarioReport rep;
  rep.scenario = config.scenario;
  rep.version = VARQ_VERSION;
  rep.config_hash = config_hash(config.canonical);
  rep.seed = config.seed;
  static const std::map<ScenarioKind, std::function<void(const ScenarioConfig&, ScenarioReport&)>> dispatch = {
      {ScenarioKind::eigen, run_eigen},
      {ScenarioKind::evolve, run_evolve},
      {ScenarioKind::fluctuate, run_fluctuate},
      {ScenarioKind::constraint_check, run_constraint_check},
      {ScenarioKind::vanishing_momentum, run_vanishing_momentum},
      {ScenarioKind::bipartite, run_bipartite},
      {ScenarioKind::three_route, run_three_route},
      {ScenarioKind::compare_propagators, run_compare_propagators},
  };
  try {
    dispatch.at(config.scenario)(config, rep);
  } catch (const Error& e) {
    throw Error(e.code(), std::string(scenario_name(config.scenario)) + ": " + e.what());
  }
  return rep;
}

std::string report_json(const ScenarioReport& report) {
  ordered_json j;
  j["scenario"] = scenario_name(report.scenario);
  j["version"] = report.version;
  j["config_hash"] = report.config_hash;
  j["seed"] = report.seed ? ordered_json(*report.seed) : ordered_json(nullptr);
  j["passed"] = report.passed();
  ordered_json checks = ordered_json::array();
  for (const auto& c : report.checks)
    checks.push_back({{"name", c.name},
                      {"value", c.value},
                      {"tolerance", c.tolerance},
                      {"relation", c.at_least ? ">" : "<="},
                      {"passed", c.passed}});
  j["checks"] = checks;
  ordered_json scalars = ordered_json::object(), arrays = ordered_json::object(), labels = ordered_json::object();
  for (const auto& [k, v] : report.scalars) scalars[k] = v;
  for (const auto& [k, v] : report.arrays) arrays[k] = v;
  for (const auto& [k, v] : report.labels) labels[k] = v;
  j["results"] = {{"scalars", scalars}, {"arrays", arrays}, {"labels", labels}};
  j["warnings"] = report.warnings;
  ordered_json series = ordered_json::array();
  for (const auto& [name, s] : report.series) series.push_back(name);
  j["series"] = series;
  return j.dump(2) + "\n";
}

std::vector<std::string> emit_plot_data(const ScenarioReport& report, const std::string& dir,
                                        const std::vector<std::string>& which) {
  std::vector<std::string> names = which;
  if (names.empty())
    for (const auto& [name, s] : report.series) names.push_back(name);
  for (const auto& name : names)
    if (!report.series.count(name)) throw InvalidArgument("emit_plot_data: no series named \"" + name + "\"");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoFailure("emit_plot_data: cannot create " + dir + ": " + ec.message());

  std::vector<std::string> written;
  for (const auto& name : names) {
    const Series& s = report.series.at(name);
    const std::string path = (std::filesystem::path(dir) / (name + ".dat")).string();
    std::ofstream os(path);
    if (!os) throw IoFailure("emit_plot_data: cannot write " + path);
    os << "# varq " << report.version << " scenario " << scenario_name(report.scenario) << "\n";
    os << "# config_hash " << report.config_hash << "\n";
    os << "# series " << name << "\n";
    if (s.gridded()) {
      os << "# grid " << s.axis0.size() << " x " << s.axis1.size() << " row-major, one row per " << s.labels[0]
         << " value, value " << s.labels[2] << "\n";
      os << "# " << s.labels[0] << ":";
      for (double v : s.axis0) write_value(os << ' ', v);
      os << "\n# " << s.labels[1] << ":";
      for (double v : s.axis1) write_value(os << ' ', v);
      os << "\n";
      for (std::size_t i = 0; i < s.axis0.size(); ++i) {
        for (std::size_t j = 0; j < s.axis1.size(); ++j) {
          if (j) os << ' ';
          write_value(os, s.grid_values[i * s.axis1.size() + j]);
        }
        os << "\n";
      }
    } else {
      os << "# columns";
      for (const auto& l : s.labels) os << ' ' << l;
      os << "\n";
      const std::size_t rows = s.columns.empty() ? 0 : s.columns.front().size();
      for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t c = 0; c < s.columns.size(); ++c) {
          if (c) os << ' ';
          write_value(os, s.columns[c][i]);
        }
        os << "\n";
      }
    }
    if (!os) throw IoFailure("emit_plot_data: write failed for " + path);
    written.push_back(path);
  }
  return written;
}

int exit_code(const ScenarioReport& report) { return report.passed() ? 0 : 2; }

}  // namespace varq
