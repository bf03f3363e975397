#pragma once

#include <vector>

#include "dtrm/initial_values.hpp"
#include "dtrm/model.hpp"
#include "dtrm/roots.hpp"

namespace dtrm {

// Per-season laws of the running maxima of the premium-adjusted claim walks:
// rows[k-1][j] = P(M_k = j). The first row drives the survival table via
// phi(u) = sum_{j < u} rows[0][j].
struct MSequence {
  int n_max = 0;
  std::vector<std::vector<double>> rows;
  // 1 - sum_j rows[k-1][j]: mass not yet accumulated at n_max; approaches 0
  // as n_max grows for net-profit models.
  std::vector<double> remaining_mass;
};

// Propagates the level-n probabilities from the initial vector. Seasons whose
// predecessor has P(Z = 0) = 0 are resolved through the shifted equation that
// divides by P(Z = 1) instead; an unresolvable pattern raises
// DegenerateRecursionFailure.
//
// The recursion carries homogeneous modes at the unit-disk roots, so
// roundoff grows like max|alpha|^{-n}. Entries that leave [0, 1] beyond
// tolerance (deep levels, far past any practical surplus) raise
// NonProbabilisticSequence rather than silently degrading.
MSequence compute_m_sequence(const SeasonalModel& model, const InitialVector& m0, int n_max);

struct SurvivalTable {
  std::vector<double> phi;                      // ultimate, u = 0..u_max
  std::vector<int> horizons;                    // ascending finite horizons (may be empty)
  std::vector<std::vector<double>> phi_finite;  // [u][horizon index]
  int u_max() const { return static_cast<int>(phi.size()) - 1; }
};

// Intermediate artifacts of the ultimate-time pipeline, for reporting.
// Populated only on the N >= 2 net-profit path.
struct PipelineDiagnostics {
  bool ran_pipeline = false;
  RootSet roots;
  InitialSystem system;
  InitialVector m0;
  SolveDiagnostics solve;
  std::vector<double> remaining_mass;  // per season, from the propagation
};

// Ultimate-time survival for any model class: certain-ruin classes yield an
// all-zero table, the degenerate deterministic class a 0/1 table, single
// season models route through the classical homogeneous recursion, and
// N >= 2 net-profit models run the root / initial-value / propagation
// pipeline.
SurvivalTable survival_ultimate(const SeasonalModel& model, int u_max);

// As above, with the root configuration exposed and optional diagnostics.
SurvivalTable survival_ultimate(const SeasonalModel& model, int u_max, const RootConfig& cfg,
                                PipelineDiagnostics* diag = nullptr);

// Exact finite-horizon survival grid phi(u, t), u = 0..u_max, t = 1..t_max,
// by forward dynamic programming on the surplus distribution. Claim tail
// mass beyond the truncated tables counts as ruin, so entries are exact for
// finitely supported claims and conservative within t * eps_tail otherwise.
std::vector<std::vector<double>> survival_finite(const SeasonalModel& model, int u_max,
                                                 int t_max);

// Surviving-surplus distribution after the first `steps` steps from surplus u:
// result[w] = P(W(n) > 0 for n <= steps, W(steps) = w). Shared kernel of the
// finite grid, the u = 0 evaluation, and the consistency check.
std::vector<double> surviving_distribution(const SeasonalModel& model, int u, int steps);

struct ConsistencyReport {
  std::vector<double> defects;  // one per u = 0..u_max-N
  double max_defect = 0.0;
  std::vector<double> finite_gap;  // phi(u, t_last) - phi(u) when a grid is attached
  double tol = 0.0;
};

// Replays the one-period recursion of the survival function as an identity
// on the computed table and reports the worst defect; defects above tol
// raise ConsistencyFailure.
ConsistencyReport consistency_check(const SeasonalModel& model, const SurvivalTable& table,
                                    double tol = 1e-8);

}  // namespace dtrm
