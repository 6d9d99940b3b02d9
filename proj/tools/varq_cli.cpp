// varq <scenario> --config <path> [--seed N] [--out <dir>] [--emit-plots]
//
// Exit status: 0 when every check passes, 2 when a check fails, 1 on error.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "varq/varq.h"

namespace {

struct Owned {
  char* s = nullptr;
  ~Owned() { varq_string_free(s); }
};

int report_error(const std::string& context) {
  std::cerr << "varq: " << context << ": " << varq_last_error() << "\n";
  return 1;
}

void print_diagnostics(const char* diagnostics_json) {
  const auto diags = nlohmann::json::parse(diagnostics_json);
  for (const auto& d : diags)
    std::cerr << d["severity"].get<std::string>() << ": " << (d["path"].get<std::string>().empty() ? "<root>" : d["path"].get<std::string>())
              << ": " << d["message"].get<std::string>() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variational ensemble scenarios"};
  app.set_version_flag("--version", std::string(varq_version()));
  std::string scenario, config_path, out_dir = ".", plots;
  std::optional<std::uint64_t> seed;
  bool emit_plots = false, validate_only = false;
  app.add_option("scenario", scenario,
                 "eigen, evolve, fluctuate, constraint-check, vanishing-momentum, bipartite, three-route, "
                 "compare-propagators")
      ->required();
  app.add_option("--config", config_path, "JSON configuration file")->required();
  app.add_option("--seed", seed, "Overrides the configured seed");
  app.add_option("--out", out_dir, "Directory for report.json and plot data");
  app.add_flag("--emit-plots", emit_plots, "Write plain-text plot data for the report series");
  app.add_option("--plots", plots, "Comma-separated series to emit (default: configured or all)");
  app.add_flag("--validate-only", validate_only, "Check the configuration without running");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "varq: cannot read config " << config_path << "\n";
    return 1;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();

  // Fill in or cross-check the scenario before validating.
  try {
    auto root = nlohmann::json::parse(text);
    if (root.is_object() && !root.contains("scenario")) root["scenario"] = scenario;
    if (root.is_object() && seed) root["seed"] = *seed;
    text = root.dump();
  } catch (const nlohmann::json::parse_error&) {
    // Reported with context by the validator below.
  }

  Owned diags;
  const varq_status vs = varq_validate_config(text.c_str(), &diags.s);
  if (diags.s) print_diagnostics(diags.s);
  if (vs != VARQ_OK) {
    std::cerr << "varq: invalid configuration\n";
    return 1;
  }
  if (validate_only) {
    std::cout << "configuration ok\n";
    return 0;
  }

  varq_report* report = nullptr;
  if (varq_run(scenario.c_str(), text.c_str(), seed ? 1 : 0, seed.value_or(0), &report) != VARQ_OK)
    return report_error(scenario);

  int code = varq_report_exit_code(report);
  const std::size_t checks = varq_report_check_count(report);
  for (std::size_t i = 0; i < checks; ++i) {
    const char* name = nullptr;
    double value = 0.0, tolerance = 0.0;
    int passed = 0;
    varq_report_check(report, i, &name, &value, &tolerance, &passed);
    std::printf("%-4s %-40s %.6e (tol %.3e)\n", passed ? "PASS" : "FAIL", name, value, tolerance);
  }

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  Owned json;
  if (varq_report_json(report, &json.s) != VARQ_OK) {
    varq_report_free(report);
    return report_error("report");
  }
  const std::string report_path = (std::filesystem::path(out_dir) / "report.json").string();
  std::ofstream out(report_path);
  out << json.s;
  if (!out) {
    std::cerr << "varq: cannot write " << report_path << "\n";
    varq_report_free(report);
    return 1;
  }
  std::printf("report: %s\n", report_path.c_str());

  if (emit_plots) {
    std::string which = plots;
    if (which.empty()) {
      const auto cfg = nlohmann::json::parse(text);
      if (cfg.contains("output") && cfg["output"].contains("plots"))
        for (const auto& p : cfg["output"]["plots"]) which += (which.empty() ? "" : ",") + p.get<std::string>();
    }
    Owned written;
    if (varq_report_emit_plots(report, out_dir.c_str(), which.c_str(), &written.s) != VARQ_OK) {
      varq_report_free(report);
      return report_error("plots");
    }
    for (const auto& p : nlohmann::json::parse(written.s)) std::printf("plot: %s\n", p.get<std::string>().c_str());
  }
  varq_report_free(report);
  std::printf("%s\n", code == 0 ? "all checks passed" : "some checks failed");
  return code;
}
