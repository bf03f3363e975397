#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "dtrm/survival.hpp"

namespace dtrm {

struct DistributionSpec {
  enum class Kind { kTable, kPoisson } kind = Kind::kTable;
  std::vector<double> weights;  // table
  double lambda = 0.0;          // poisson
};

struct OracleConfig {
  long long mc_paths = 100000;
  std::uint64_t seed = 1;
  double enum_cap = 1e7;
};

// Batch run description; JSON file with a pinned schema_version.
struct RunConfig {
  int schema_version = 1;
  std::vector<DistributionSpec> claims;
  int u_max = 10;
  std::vector<int> t_values;
  double eps_tail = kDefaultTailEps;
  double root_tol = 1e-10;
  double cluster_tol = 1e-6;
  int max_poly_degree = 8192;
  std::string table_path = "survival.csv";
  std::string report_path = "report.json";
  std::optional<OracleConfig> oracle;
};

RunConfig load_run_config(const std::string& path);  // throws ConfigError
RunConfig parse_run_config(const nlohmann::json& doc);

struct RunResult {
  SurvivalTable table;
  std::string classification;
  std::string report_json;  // serialized structured report
};

// Executes the whole pipeline for a config: classification, table(s),
// consistency checks, optional oracle comparison. Pure computation; writing
// files is the caller's concern.
RunResult execute(const RunConfig& cfg);

std::string table_to_csv(const SurvivalTable& table);
std::string table_to_pretty(const SurvivalTable& table);

// Full command-line front end. Returns the process exit code:
// 0 ok, 2 config error, 3 numerical error.
int run_cli(int argc, const char* const* argv);

}  // namespace dtrm
