#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "dtrm/errors.hpp"
#include "dtrm/pipeline.hpp"

namespace dtrm {

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write to '" + path + "'");
  out << content;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"survival probability solver for seasonal discrete-time risk models"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run the pipeline described by a config file");
  std::string config_path;
  run->add_option("config", config_path, "JSON run configuration")->required();
  bool pretty = false;
  run->add_flag("--pretty", pretty, "print the table with 3-decimal display rounding");
  int u_max_override = -1;
  run->add_option("--u-max", u_max_override, "override u_max from the config");
  std::vector<int> t_override;
  run->add_option("--t", t_override, "override the finite horizons");
  long long mc_paths_override = 0;
  run->add_option("--mc-paths", mc_paths_override, "override oracle Monte Carlo path count");
  std::uint64_t seed_override = 0;
  bool seed_given = false;
  run->add_option("--seed", seed_override, "override the oracle seed")
      ->each([&](const std::string&) { seed_given = true; });
  std::string out_override;
  run->add_option("--out", out_override, "override the CSV output path");
  std::string report_override;
  run->add_option("--report", report_override, "override the report output path");
  double root_tol_override = 0.0;
  run->add_option("--root-tol", root_tol_override, "override the root residual tolerance");
  double cluster_tol_override = 0.0;
  run->add_option("--cluster-tol", cluster_tol_override, "override the root clustering tolerance");
  int max_degree_override = 0;
  run->add_option("--max-poly-degree", max_degree_override,
                  "override the polynomial degree guard");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      std::cout << app.help();
      return 0;
    }
    std::cerr << "ConfigError: " << e.what() << "\n";
    return 2;
  }

  try {
    RunConfig cfg = load_run_config(config_path);
    if (u_max_override >= 0) cfg.u_max = u_max_override;
    if (!t_override.empty()) {
      cfg.t_values = t_override;
      std::sort(cfg.t_values.begin(), cfg.t_values.end());
      cfg.t_values.erase(std::unique(cfg.t_values.begin(), cfg.t_values.end()),
                         cfg.t_values.end());
      if (cfg.t_values.front() < 1) throw ConfigError("--t entries must be >= 1");
    }
    if (mc_paths_override > 0) {
      if (!cfg.oracle.has_value()) cfg.oracle = OracleConfig{};
      cfg.oracle->mc_paths = mc_paths_override;
    }
    if (seed_given) {
      if (!cfg.oracle.has_value()) cfg.oracle = OracleConfig{};
      cfg.oracle->seed = seed_override;
    }
    if (!out_override.empty()) cfg.table_path = out_override;
    if (!report_override.empty()) cfg.report_path = report_override;
    if (root_tol_override > 0.0) cfg.root_tol = root_tol_override;
    if (cluster_tol_override > 0.0) cfg.cluster_tol = cluster_tol_override;
    if (max_degree_override > 0) cfg.max_poly_degree = max_degree_override;

    const RunResult result = execute(cfg);
    write_file(cfg.table_path, table_to_csv(result.table));
    write_file(cfg.report_path, result.report_json);
    std::cout << "classification: " << result.classification << "\n";
    std::cout << "table: " << cfg.table_path << "\nreport: " << cfg.report_path << "\n";
    if (pretty) std::cout << table_to_pretty(result.table);
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "InternalError: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace dtrm
