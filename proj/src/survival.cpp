#include "dtrm/survival.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dtrm/errors.hpp"
#include "dtrm/oracle.hpp"

namespace dtrm {

namespace {

constexpr double kProbTol = 1e-8;
constexpr int kMaxDpSpan = 200000;  // guard on u + t for the finite grid

// One DP step: p'[w'] = sum over claims k <= min(w, D) of p[w] z_k with
// w' = w + 1 - k >= 1. p is indexed by surplus; index 0 is only populated
// at the start when u = 0.
void advance(const IntegerPmf& z, const std::vector<double>& p, std::vector<double>& out) {
  std::fill(out.begin(), out.end(), 0.0);
  const int cap = static_cast<int>(p.size());
  const int d = static_cast<int>(z.degree());
  for (int w = 0; w < cap; ++w) {
    const double pw = p[static_cast<std::size_t>(w)];
    if (pw == 0.0) continue;
    const int kmax = std::min(w, d);
    for (int k = 0; k <= kmax; ++k) {
      const int w2 = w + 1 - k;
      if (w2 < cap) out[static_cast<std::size_t>(w2)] += pw * z.prob(static_cast<std::size_t>(k));
    }
  }
}

void check_entry(double v, int season, int level) {
  if (!(v >= -kProbTol && v <= 1.0 + kProbTol)) {
    std::ostringstream os;
    os.precision(12);
    os << "m[" << season << "][" << level << "] = " << v << " is not a probability";
    throw NonProbabilisticSequence(os.str());
  }
}

}  // namespace

std::vector<double> surviving_distribution(const SeasonalModel& model, int u, int steps) {
  if (u < 0 || steps < 0) throw InvalidArgument("need u >= 0 and steps >= 0");
  const int n = model.seasons();
  const std::size_t cap = static_cast<std::size_t>(u) + static_cast<std::size_t>(steps) + 1;
  std::vector<double> p(cap, 0.0);
  std::vector<double> scratch(cap, 0.0);
  p[static_cast<std::size_t>(u)] = 1.0;
  for (int step = 1; step <= steps; ++step) {
    advance(model.claim(((step - 1) % n) + 1), p, scratch);
    std::swap(p, scratch);
  }
  return p;
}

MSequence compute_m_sequence(const SeasonalModel& model, const InitialVector& m0, int n_max) {
  const int n = model.seasons();
  if (static_cast<int>(m0.m0.size()) != n) {
    throw InvalidArgument("initial vector length does not match season count");
  }
  if (n_max < 0) throw InvalidArgument("n_max must be >= 0");
  if (classify(model).tag != Criticality::kNetProfit) {
    throw InvalidArgument("m-sequence propagation requires the net profit condition");
  }

  auto prev_season = [n](int k) { return k == 1 ? n : k - 1; };

  // Seasons whose predecessor has z0 > 0 resolve directly from level n-1;
  // the others need their predecessor's value at the same level first.
  std::vector<int> order;
  std::vector<bool> scheduled(static_cast<std::size_t>(n) + 1, false);
  for (int k = 1; k <= n; ++k) {
    if (model.claim(prev_season(k)).prob(0) > 0.0) {
      order.push_back(k);
      scheduled[static_cast<std::size_t>(k)] = true;
    }
  }
  bool progress = true;
  while (static_cast<int>(order.size()) < n && progress) {
    progress = false;
    for (int k = 1; k <= n; ++k) {
      if (scheduled[static_cast<std::size_t>(k)]) continue;
      const int p = prev_season(k);
      if (scheduled[static_cast<std::size_t>(p)] && model.claim(p).prob(1) > 0.0) {
        order.push_back(k);
        scheduled[static_cast<std::size_t>(k)] = true;
        progress = true;
      }
    }
  }
  if (static_cast<int>(order.size()) < n) {
    std::ostringstream os;
    os << "cannot resolve the level recursion; seasons with P(Z=0) = P(Z=1) = 0 "
          "block propagation";
    throw DegenerateRecursionFailure(os.str());
  }

  MSequence seq;
  seq.n_max = n_max;
  seq.rows.assign(static_cast<std::size_t>(n),
                  std::vector<double>(static_cast<std::size_t>(n_max) + 1, 0.0));
  for (int k = 1; k <= n; ++k) {
    seq.rows[static_cast<std::size_t>(k - 1)][0] = m0.m0[static_cast<std::size_t>(k - 1)];
  }

  for (int level = 1; level <= n_max; ++level) {
    for (int k : order) {
      const int p = prev_season(k);
      const IntegerPmf& zp = model.claim(p);
      const int d = static_cast<int>(zp.degree());
      auto& row = seq.rows[static_cast<std::size_t>(k - 1)];
      const auto& prow = seq.rows[static_cast<std::size_t>(p - 1)];
      double value;
      if (zp.prob(0) > 0.0) {
        // z0 m_level = m_{level-1}^{prev} - sum_{j<level} z_{level-j} m_j - [level=1] m_0 z0
        double acc = prow[static_cast<std::size_t>(level - 1)];
        const int jlo = std::max(0, level - d);
        for (int j = jlo; j <= level - 1; ++j) {
          acc -= zp.prob(static_cast<std::size_t>(level - j)) * row[static_cast<std::size_t>(j)];
        }
        if (level == 1) acc -= row[0] * zp.prob(0);
        value = acc / zp.prob(0);
      } else {
        // shifted equation: z1 m_level = m_level^{prev} - sum_{j<level} z_{level+1-j} m_j
        double acc = prow[static_cast<std::size_t>(level)];
        const int jlo = std::max(0, level + 1 - d);
        for (int j = jlo; j <= level - 1; ++j) {
          acc -=
              zp.prob(static_cast<std::size_t>(level + 1 - j)) * row[static_cast<std::size_t>(j)];
        }
        value = acc / zp.prob(1);
      }
      check_entry(value, k, level);
      row[static_cast<std::size_t>(level)] = value;
    }
  }

  seq.remaining_mass.assign(static_cast<std::size_t>(n), 0.0);
  for (int k = 1; k <= n; ++k) {
    const auto& row = seq.rows[static_cast<std::size_t>(k - 1)];
    const double total = std::accumulate(row.begin(), row.end(), 0.0);
    seq.remaining_mass[static_cast<std::size_t>(k - 1)] = 1.0 - total;
  }
  return seq;
}

SurvivalTable survival_ultimate(const SeasonalModel& model, int u_max) {
  return survival_ultimate(model, u_max, RootConfig{}, nullptr);
}

SurvivalTable survival_ultimate(const SeasonalModel& model, int u_max, const RootConfig& cfg,
                                PipelineDiagnostics* diag) {
  if (u_max < 0) throw InvalidArgument("u_max must be >= 0");
  const int n = model.seasons();
  const ModelClass cls = classify(model);

  SurvivalTable table;
  table.phi.assign(static_cast<std::size_t>(u_max) + 1, 0.0);

  switch (cls.tag) {
    case Criticality::kSupercritical:
    case Criticality::kCriticalNondegenerate:
      return table;  // ruin is certain at every initial surplus
    case Criticality::kCriticalDegenerate:
      for (int u = 0; u <= u_max; ++u) {
        table.phi[static_cast<std::size_t>(u)] =
            static_cast<double>(degenerate_survival(cls, u));
      }
      return table;
    case Criticality::kNetProfit:
      break;
  }

  // Deterministic net-profit models: the per-period drift is a positive
  // integer, so the walk's global minimum is attained within the first
  // period and survival is a 0/1 step, with no interior roots to locate.
  bool all_point = true;
  for (const auto& z : model.claims()) all_point = all_point && z.is_point_mass();
  if (all_point) {
    long long claim_sum = 0;
    long long min_drift = 1;
    for (int t = 1; t <= n; ++t) {
      claim_sum += model.claim(t).min_support();
      min_drift = std::min(min_drift, static_cast<long long>(t) - claim_sum);
    }
    for (int u = 0; u <= u_max; ++u) {
      table.phi[static_cast<std::size_t>(u)] = (u + min_drift >= 1) ? 1.0 : 0.0;
    }
    return table;
  }

  if (n == 1) {
    const UltimateRuin ruin = homogeneous_ultimate_ruin(model.claim(1), u_max);
    for (int u = 0; u <= u_max; ++u) {
      table.phi[static_cast<std::size_t>(u)] = 1.0 - ruin.psi[static_cast<std::size_t>(u)];
    }
    return table;
  }

  const RootSet roots = find_unit_disk_roots(model, cfg);
  const InitialSystem system = build_initial_system(model, roots);
  SolveDiagnostics solve;
  const InitialVector m0 = solve_initial_values(system, &solve);
  const int levels = std::max(u_max, n);
  const MSequence seq = compute_m_sequence(model, m0, levels);
  if (diag != nullptr) {
    diag->ran_pipeline = true;
    diag->roots = roots;
    diag->system = system;
    diag->m0 = m0;
    diag->solve = solve;
    diag->remaining_mass = seq.remaining_mass;
  }

  // phi(u) = sum_{j < u} P(M_1 = j); values up to max(u_max, N) are needed
  // to seed the u = 0 evaluation.
  std::vector<double> phi(static_cast<std::size_t>(levels) + 1, 0.0);
  double acc = 0.0;
  for (int u = 1; u <= levels; ++u) {
    acc += seq.rows[0][static_cast<std::size_t>(u - 1)];
    phi[static_cast<std::size_t>(u)] = std::min(acc, 1.0);
  }

  // phi(0): one period of the survival recursion, phi(0) = sum_w P(survive
  // the first N steps from 0 and land at w) phi(w); the landing surplus w
  // stays within 1..N.
  const std::vector<double> land = surviving_distribution(model, 0, n);
  double phi0 = 0.0;
  for (std::size_t w = 1; w < land.size(); ++w) {
    phi0 += land[w] * phi[w];
  }
  phi[0] = phi0;

  for (int u = 0; u <= u_max; ++u) {
    const double v = phi[static_cast<std::size_t>(u)];
    if (!(v >= -kProbTol && v <= 1.0 + kProbTol)) {
      std::ostringstream os;
      os << "phi(" << u << ") = " << v << " is not a probability";
      throw NonProbabilisticSequence(os.str());
    }
    table.phi[static_cast<std::size_t>(u)] = std::clamp(v, 0.0, 1.0);
  }
  return table;
}

std::vector<std::vector<double>> survival_finite(const SeasonalModel& model, int u_max,
                                                 int t_max) {
  if (u_max < 0 || t_max < 1) throw InvalidArgument("need u_max >= 0 and t_max >= 1");
  if (u_max + t_max > kMaxDpSpan) {
    throw ResourceLimit("u_max + t_max exceeds the finite-horizon guard");
  }
  const int n = model.seasons();
  std::vector<std::vector<double>> grid(static_cast<std::size_t>(u_max) + 1);
  for (int u = 0; u <= u_max; ++u) {
    const std::size_t cap = static_cast<std::size_t>(u) + static_cast<std::size_t>(t_max) + 1;
    std::vector<double> p(cap, 0.0), scratch(cap, 0.0);
    p[static_cast<std::size_t>(u)] = 1.0;
    auto& row = grid[static_cast<std::size_t>(u)];
    row.resize(static_cast<std::size_t>(t_max));
    for (int t = 1; t <= t_max; ++t) {
      advance(model.claim(((t - 1) % n) + 1), p, scratch);
      std::swap(p, scratch);
      row[static_cast<std::size_t>(t - 1)] = std::accumulate(p.begin(), p.end(), 0.0);
    }
  }
  return grid;
}

ConsistencyReport consistency_check(const SeasonalModel& model, const SurvivalTable& table,
                                    double tol) {
  const int n = model.seasons();
  const int u_max = table.u_max();
  ConsistencyReport report;
  report.tol = tol;

  for (int u = 0; u + n <= u_max; ++u) {
    const std::vector<double> land = surviving_distribution(model, u, n);
    double replay = 0.0;
    for (std::size_t w = 1; w < land.size(); ++w) {
      if (static_cast<int>(w) <= u_max) replay += land[w] * table.phi[w];
    }
    const double defect = std::abs(table.phi[static_cast<std::size_t>(u)] - replay);
    report.defects.push_back(defect);
    report.max_defect = std::max(report.max_defect, defect);
  }

  if (!table.phi_finite.empty() && !table.horizons.empty()) {
    report.finite_gap.resize(table.phi_finite.size());
    for (std::size_t u = 0; u < table.phi_finite.size(); ++u) {
      report.finite_gap[u] = table.phi_finite[u].back() - table.phi[u];
    }
  }

  if (report.max_defect > tol) {
    std::ostringstream os;
    os << "one-period replay defect " << report.max_defect << " exceeds " << tol;
    throw ConsistencyFailure(os.str());
  }
  return report;
}

}  // namespace dtrm
