#include "dtrm/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dtrm/errors.hpp"
#include "dtrm/oracle.hpp"

namespace dtrm {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.contains(it.key())) {
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
    }
  }
}

double get_number(const json& obj, const char* key, double fallback, bool required = false) {
  if (!obj.contains(key)) {
    if (required) throw ConfigError(std::string("missing required key '") + key + "'");
    return fallback;
  }
  if (!obj[key].is_number()) throw ConfigError(std::string("key '") + key + "' must be a number");
  return obj[key].get<double>();
}

std::string classification_name(Criticality tag) {
  switch (tag) {
    case Criticality::kNetProfit:
      return "NetProfit";
    case Criticality::kSupercritical:
      return "Supercritical";
    case Criticality::kCriticalNondegenerate:
      return "CriticalNondegenerate";
    case Criticality::kCriticalDegenerate:
      return "CriticalDegenerate";
  }
  return "?";
}

std::string row_label(const RowInfo& info) {
  std::ostringstream os;
  os.precision(12);
  switch (info.kind) {
    case RowKind::kRoot:
      os << "root(" << info.root.real() << (info.root.imag() < 0 ? "" : "+") << info.root.imag()
         << "i)";
      break;
    case RowKind::kDerivative:
      os << "derivative(" << info.root.real() << (info.root.imag() < 0 ? "" : "+")
         << info.root.imag() << "i; l=" << info.order << ")";
      break;
    case RowKind::kDegeneracy:
      os << "degeneracy(season=" << info.season << ")";
      break;
    case RowKind::kMass:
      os << "mass";
      break;
  }
  if (info.imag_part) os << "[imag]";
  return os.str();
}

void validate_table(const SurvivalTable& table) {
  const double slack = 1e-12;
  for (std::size_t u = 0; u < table.phi.size(); ++u) {
    const double v = table.phi[u];
    if (!(v >= -slack && v <= 1.0 + slack)) {
      throw NonProbabilisticSequence("table value out of [0,1]");
    }
    if (u > 0 && table.phi[u] < table.phi[u - 1] - slack) {
      throw ConsistencyFailure("ultimate survival not monotone in u");
    }
  }
  for (std::size_t u = 0; u < table.phi_finite.size(); ++u) {
    const auto& row = table.phi_finite[u];
    for (std::size_t t = 0; t < row.size(); ++t) {
      if (!(row[t] >= -slack && row[t] <= 1.0 + slack)) {
        throw NonProbabilisticSequence("finite-horizon value out of [0,1]");
      }
      if (t > 0 && row[t] > row[t - 1] + slack) {
        throw ConsistencyFailure("finite-horizon survival not monotone in T");
      }
      if (row[t] < table.phi[u] - 1e-9) {
        throw ConsistencyFailure("finite-horizon survival below the ultimate value");
      }
    }
    if (u > 0) {
      const auto& above = table.phi_finite[u - 1];
      for (std::size_t t = 0; t < row.size(); ++t) {
        if (row[t] < above[t] - slack) {
          throw ConsistencyFailure("finite-horizon survival not monotone in u");
        }
      }
    }
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

RunConfig parse_run_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  require_keys(doc,
               {"schema_version", "claims", "u_max", "t_values", "eps_tail", "root_tol",
                "cluster_tol", "max_poly_degree", "outputs", "oracle"},
               "config");

  RunConfig cfg;
  if (!doc.contains("schema_version") || !doc["schema_version"].is_number_integer()) {
    throw ConfigError("missing integer 'schema_version'");
  }
  cfg.schema_version = doc["schema_version"].get<int>();
  if (cfg.schema_version != 1) throw ConfigError("unsupported schema_version");

  if (!doc.contains("claims") || !doc["claims"].is_array() || doc["claims"].empty()) {
    throw ConfigError("'claims' must be a non-empty array");
  }
  for (const auto& entry : doc["claims"]) {
    if (!entry.is_object() || !entry.contains("kind")) {
      throw ConfigError("each claim needs a 'kind'");
    }
    DistributionSpec spec;
    const std::string kind = entry["kind"].get<std::string>();
    if (kind == "table") {
      require_keys(entry, {"kind", "weights"}, "claim");
      if (!entry.contains("weights") || !entry["weights"].is_array()) {
        throw ConfigError("table claim needs a 'weights' array");
      }
      spec.kind = DistributionSpec::Kind::kTable;
      for (const auto& w : entry["weights"]) {
        if (!w.is_number()) throw ConfigError("weights must be numbers");
        const double value = w.get<double>();
        if (!std::isfinite(value) || value < 0.0) {
          throw ConfigError("weights must be finite and non-negative");
        }
        spec.weights.push_back(value);
      }
    } else if (kind == "poisson") {
      require_keys(entry, {"kind", "lambda"}, "claim");
      spec.kind = DistributionSpec::Kind::kPoisson;
      spec.lambda = get_number(entry, "lambda", 0.0, /*required=*/true);
    } else {
      throw ConfigError("claim kind must be 'table' or 'poisson'");
    }
    cfg.claims.push_back(std::move(spec));
  }

  const double u_max = get_number(doc, "u_max", cfg.u_max);
  if (u_max < 0 || u_max != std::floor(u_max)) throw ConfigError("'u_max' must be an integer >= 0");
  cfg.u_max = static_cast<int>(u_max);

  if (doc.contains("t_values")) {
    if (!doc["t_values"].is_array()) throw ConfigError("'t_values' must be an array");
    for (const auto& t : doc["t_values"]) {
      if (!t.is_number_integer() || t.get<int>() < 1) {
        throw ConfigError("'t_values' entries must be integers >= 1");
      }
      cfg.t_values.push_back(t.get<int>());
    }
    std::sort(cfg.t_values.begin(), cfg.t_values.end());
    cfg.t_values.erase(std::unique(cfg.t_values.begin(), cfg.t_values.end()),
                       cfg.t_values.end());
  }

  cfg.eps_tail = get_number(doc, "eps_tail", cfg.eps_tail);
  cfg.root_tol = get_number(doc, "root_tol", cfg.root_tol);
  cfg.cluster_tol = get_number(doc, "cluster_tol", cfg.cluster_tol);
  cfg.max_poly_degree = static_cast<int>(get_number(doc, "max_poly_degree", cfg.max_poly_degree));
  for (double tol : {cfg.eps_tail, cfg.root_tol, cfg.cluster_tol}) {
    if (!(tol > 0.0 && tol < 1.0)) throw ConfigError("tolerances must lie in (0, 1)");
  }

  if (doc.contains("outputs")) {
    const auto& out = doc["outputs"];
    require_keys(out, {"table_path", "report_path"}, "outputs");
    if (out.contains("table_path")) cfg.table_path = out["table_path"].get<std::string>();
    if (out.contains("report_path")) cfg.report_path = out["report_path"].get<std::string>();
  }

  if (doc.contains("oracle")) {
    const auto& orc = doc["oracle"];
    require_keys(orc, {"mc_paths", "seed", "enum_cap"}, "oracle");
    OracleConfig oc;
    oc.mc_paths = static_cast<long long>(get_number(orc, "mc_paths", 100000));
    oc.seed = static_cast<std::uint64_t>(get_number(orc, "seed", 1));
    oc.enum_cap = get_number(orc, "enum_cap", 1e7);
    if (oc.mc_paths < 1) throw ConfigError("'mc_paths' must be >= 1");
    cfg.oracle = oc;
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_run_config(doc);
}

RunResult execute(const RunConfig& cfg) {
  std::vector<IntegerPmf> claims;
  claims.reserve(cfg.claims.size());
  for (const auto& spec : cfg.claims) {
    if (spec.kind == DistributionSpec::Kind::kTable) {
      claims.push_back(IntegerPmf::from_weights(spec.weights));
    } else {
      claims.push_back(IntegerPmf::poisson(spec.lambda, cfg.eps_tail));
    }
  }
  const SeasonalModel model = build_model(std::move(claims));
  const ModelClass cls = classify(model);
  const int n = model.seasons();

  RootConfig root_cfg;
  root_cfg.tol_root = cfg.root_tol;
  root_cfg.tol_cluster = cfg.cluster_tol;
  root_cfg.max_poly_degree = cfg.max_poly_degree;

  json report;
  report["schema_version"] = 1;
  report["classification"] = classification_name(cls.tag);
  report["n_seasons"] = n;
  report["mean_total_claim"] = model.mean_total();
  report["net_profit_margin"] = static_cast<double>(n) - model.mean_total();
  if (cls.tag == Criticality::kCriticalDegenerate) {
    report["degenerate"] = {{"t_star", cls.t_star}, {"min_drift", cls.min_drift}};
  }

  PipelineDiagnostics diag;
  SurvivalTable table = survival_ultimate(model, cfg.u_max, root_cfg, &diag);

  if (diag.ran_pipeline) {
    json roots = json::array();
    for (const auto& r : diag.roots.roots) {
      roots.push_back({{"re", r.value.real()},
                       {"im", r.value.imag()},
                       {"multiplicity", r.multiplicity},
                       {"residual", r.residual}});
    }
    report["roots"] = roots;
    report["initial_values"] = diag.m0.m0;
    report["initial_system"] = {
        {"condition_estimate", diag.solve.condition_estimate},
        {"solve_residual", diag.solve.residual_inf},
        {"mass_identity_defect", diag.solve.mass_identity_defect},
    };
    json rows = json::array();
    for (const auto& r : diag.system.rows) rows.push_back(row_label(r));
    report["initial_system"]["rows"] = rows;
    report["propagation_remaining_mass"] = diag.remaining_mass;
  }

  if (!cfg.t_values.empty()) {
    const int t_max = cfg.t_values.back();
    const auto grid = survival_finite(model, cfg.u_max, t_max);
    table.horizons = cfg.t_values;
    table.phi_finite.resize(grid.size());
    for (std::size_t u = 0; u < grid.size(); ++u) {
      for (int t : cfg.t_values) {
        table.phi_finite[u].push_back(grid[u][static_cast<std::size_t>(t - 1)]);
      }
    }
  }

  validate_table(table);

  if (cls.tag == Criticality::kNetProfit && cfg.u_max >= n) {
    const ConsistencyReport consistency = consistency_check(model, table);
    report["consistency"] = {{"max_defect", consistency.max_defect},
                             {"defects", consistency.defects}};
    if (!consistency.finite_gap.empty()) {
      report["consistency"]["finite_gap_at_last_horizon"] = consistency.finite_gap;
    }
  }

  if (cfg.oracle.has_value()) {
    const OracleConfig& oc = *cfg.oracle;
    // Reference horizon: the largest requested one, otherwise grown until the
    // finite value is within 1e-4 of the ultimate value at u = 0.
    int t_ref = 0;
    if (!cfg.t_values.empty()) {
      t_ref = cfg.t_values.back();
    } else {
      t_ref = std::max(2 * n, 8);
      while (t_ref < 4096) {
        const auto probe = survival_finite(model, 0, t_ref);
        if (probe[0].back() - table.phi[0] < 1e-4) break;
        t_ref *= 2;
      }
    }
    json oracle;
    const MonteCarloEstimate est = mc_survival(model, 0, t_ref, oc.mc_paths, oc.seed);
    const auto ref_grid = survival_finite(model, 0, t_ref);
    const double dp_ref = ref_grid[0].back();
    oracle["mc"] = {{"u", 0},
                    {"t", t_ref},
                    {"point", est.point},
                    {"half_width_95", est.half_width_95},
                    {"n_paths", est.n_paths},
                    {"seed", est.seed},
                    {"delta_vs_dp", est.point - dp_ref}};
    const int t_enum = std::min(t_ref, 4);
    try {
      const double exact = enum_survival_exact(model, 0, t_enum, oc.enum_cap);
      const auto enum_grid = survival_finite(model, 0, t_enum);
      oracle["enumeration"] = {{"u", 0},
                               {"t", t_enum},
                               {"value", exact},
                               {"delta_vs_dp", exact - enum_grid[0].back()}};
    } catch (const OracleTooLarge&) {
      oracle["enumeration"] = "skipped: path count above enum_cap";
    }
    report["oracle"] = oracle;
  }

  RunResult result;
  result.table = std::move(table);
  result.classification = classification_name(cls.tag);
  result.report_json = report.dump(2) + "\n";
  return result;
}

std::string table_to_csv(const SurvivalTable& table) {
  std::ostringstream os;
  os << "u,phi_inf";
  for (int t : table.horizons) os << ",phi_" << t;
  os << "\n";
  for (std::size_t u = 0; u < table.phi.size(); ++u) {
    os << u << ',' << format_double(table.phi[u]);
    if (u < table.phi_finite.size()) {
      for (double v : table.phi_finite[u]) os << ',' << format_double(v);
    }
    os << "\n";
  }
  return os.str();
}

std::string table_to_pretty(const SurvivalTable& table) {
  // three decimals, except values that would round to 1 print as "1"
  auto fmt = [](double v) -> std::string {
    if (std::round(v * 1000.0) >= 1000.0) return "1";
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
  };
  std::ostringstream os;
  os << "u\tphi";
  for (int t : table.horizons) os << "\tT=" << t;
  os << "\n";
  for (std::size_t u = 0; u < table.phi.size(); ++u) {
    os << u << '\t' << fmt(table.phi[u]);
    if (u < table.phi_finite.size()) {
      for (double v : table.phi_finite[u]) os << '\t' << fmt(v);
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace dtrm
