#include "varq/varq.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "varq/scenario.hpp"

struct varq_report {
  varq::ScenarioReport report;
};

namespace {

thread_local std::string last_error;

varq_status status_for(varq::ErrorCode code) {
  switch (code) {
    case varq::ErrorCode::invalid_argument: return VARQ_ERR_INVALID_ARGUMENT;
    case varq::ErrorCode::grid_mismatch: return VARQ_ERR_GRID_MISMATCH;
    case varq::ErrorCode::invalid_config: return VARQ_ERR_INVALID_CONFIG;
    case varq::ErrorCode::numerical_failure: return VARQ_ERR_NUMERICAL;
    case varq::ErrorCode::density_floor: return VARQ_ERR_DENSITY_FLOOR;
    case varq::ErrorCode::phase_unwrap: return VARQ_ERR_PHASE_UNWRAP;
    case varq::ErrorCode::verification_failure: return VARQ_ERR_VERIFICATION;
    case varq::ErrorCode::io_failure: return VARQ_ERR_IO;
  }
  return VARQ_ERR_INTERNAL;
}

varq_status fail(varq_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <class F>
varq_status guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const varq::Error& e) {
    return fail(status_for(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(VARQ_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(VARQ_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(VARQ_ERR_INTERNAL, "unknown exception");
  }
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

const char* severity_name(varq::Severity s) { return s == varq::Severity::error ? "error" : "warning"; }

}  // namespace

extern "C" {

const char* varq_version(void) { return VARQ_VERSION; }

const char* varq_last_error(void) { return last_error.c_str(); }

void varq_string_free(char* s) { std::free(s); }

varq_status varq_validate_config(const char* config_json, char** diagnostics_json) {
  return guarded([&] {
    if (!config_json || !diagnostics_json) return fail(VARQ_ERR_INVALID_ARGUMENT, "null argument");
    const auto diags = varq::validate_config(config_json);
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    bool errors = false;
    for (const auto& d : diags) {
      arr.push_back({{"severity", severity_name(d.severity)}, {"path", d.path}, {"message", d.message}});
      errors = errors || d.severity == varq::Severity::error;
    }
    *diagnostics_json = copy_string(arr.dump());
    if (!errors) return VARQ_OK;
    std::ostringstream msg;
    for (const auto& d : diags)
      if (d.severity == varq::Severity::error) msg << (msg.tellp() ? "; " : "") << d.path << ": " << d.message;
    return fail(VARQ_ERR_INVALID_CONFIG, msg.str());
  });
}

varq_status varq_run(const char* scenario, const char* config_json, int has_seed, uint64_t seed, varq_report** out) {
  return guarded([&] {
    if (!config_json || !out) return fail(VARQ_ERR_INVALID_ARGUMENT, "null argument");
    *out = nullptr;
    std::string text = config_json;
    if (scenario && *scenario) {
      nlohmann::json root;
      try {
        root = nlohmann::json::parse(text);
      } catch (const nlohmann::json::parse_error& e) {
        return fail(VARQ_ERR_INVALID_CONFIG, std::string("invalid configuration: not valid JSON: ") + e.what());
      }
      if (root.is_object()) {
        if (!root.contains("scenario")) {
          root["scenario"] = scenario;
        } else if (!root["scenario"].is_string() || root["scenario"].get<std::string>() != scenario) {
          return fail(VARQ_ERR_INVALID_CONFIG, std::string("invalid configuration: scenario: config declares ") +
                                                   root["scenario"].dump() + " but \"" + scenario +
                                                   "\" was requested");
        }
        text = root.dump();
      }
    }
    std::optional<std::uint64_t> override;
    if (has_seed) override = seed;
    const varq::ScenarioConfig cfg = varq::parse_config(text, override);
    auto* handle = new varq_report{varq::run_scenario(cfg)};
    *out = handle;
    return VARQ_OK;
  });
}

int varq_report_passed(const varq_report* report) { return report && report->report.passed() ? 1 : 0; }

int varq_report_exit_code(const varq_report* report) { return report ? varq::exit_code(report->report) : 1; }

size_t varq_report_check_count(const varq_report* report) { return report ? report->report.checks.size() : 0; }

varq_status varq_report_check(const varq_report* report, size_t index, const char** name, double* value,
                              double* tolerance, int* passed) {
  return guarded([&] {
    if (!report) return fail(VARQ_ERR_INVALID_ARGUMENT, "null report");
    if (index >= report->report.checks.size()) return fail(VARQ_ERR_INVALID_ARGUMENT, "check index out of range");
    const varq::Check& c = report->report.checks[index];
    if (name) *name = c.name.c_str();
    if (value) *value = c.value;
    if (tolerance) *tolerance = c.tolerance;
    if (passed) *passed = c.passed ? 1 : 0;
    return VARQ_OK;
  });
}

varq_status varq_report_json(const varq_report* report, char** json) {
  return guarded([&] {
    if (!report || !json) return fail(VARQ_ERR_INVALID_ARGUMENT, "null argument");
    *json = copy_string(varq::report_json(report->report));
    return VARQ_OK;
  });
}

varq_status varq_report_emit_plots(const varq_report* report, const char* directory, const char* series,
                                   char** written_json) {
  return guarded([&] {
    if (!report || !directory) return fail(VARQ_ERR_INVALID_ARGUMENT, "null argument");
    std::vector<std::string> which;
    if (series && *series) {
      std::stringstream ss(series);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!item.empty()) which.push_back(item);
    }
    const auto paths = varq::emit_plot_data(report->report, directory, which);
    if (written_json) *written_json = copy_string(nlohmann::json(paths).dump());
    return VARQ_OK;
  });
}

void varq_report_free(varq_report* report) { delete report; }

varq_status varq_bohm_potential_1d(size_t n_points, double x_min, double x_max, varq_boundary boundary,
                                   int stencil_order, double hbar, double mass, const double* rho, double* q_out) {
  return guarded([&] {
    if (!rho || !q_out) return fail(VARQ_ERR_INVALID_ARGUMENT, "null array");
    if (stencil_order != 2 && stencil_order != 4) return fail(VARQ_ERR_INVALID_ARGUMENT, "stencil order must be 2 or 4");
    const varq::GridSpec grid = varq::GridSpec::line(
        {n_points, x_min, x_max, boundary == VARQ_PERIODIC ? varq::Boundary::periodic : varq::Boundary::dirichlet});
    varq::PhysicalParams params;
    params.hbar = hbar;
    params.masses = {mass, mass};
    params.validate();
    const varq::RealField density(grid, std::vector<double>(rho, rho + n_points));
    const auto q = varq::bohm_potential(density, params,
                                        stencil_order == 2 ? varq::StencilOrder::second : varq::StencilOrder::fourth);
    std::copy(q.value.values().begin(), q.value.values().end(), q_out);
    return VARQ_OK;
  });
}

varq_status varq_harmonic_levels(size_t n_points, double x_min, double x_max, double hbar, double mass, double k,
                                 double center, size_t levels, double* energies_out) {
  return guarded([&] {
    if (!energies_out) return fail(VARQ_ERR_INVALID_ARGUMENT, "null array");
    const varq::GridSpec grid = varq::GridSpec::line({n_points, x_min, x_max, varq::Boundary::dirichlet});
    varq::PhysicalParams params;
    params.hbar = hbar;
    params.masses = {mass, mass};
    params.potential = varq::PotentialSpec::harmonic(k, center);
    const auto spec = varq::eigensolve_1d(params, grid, levels);
    std::copy(spec.energies.begin(), spec.energies.end(), energies_out);
    return VARQ_OK;
  });
}

}  // extern "C"
