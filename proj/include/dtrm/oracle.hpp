#pragma once

#include <cstdint>
#include <vector>

#include "dtrm/model.hpp"

namespace dtrm {

// Classical single-season recursions and brute-force validators. These paths
// are kept independent of the generating-function pipeline so the two can
// check each other.

// Finite-horizon ruin probability of the homogeneous model:
//   psi(u, 1) = P(Z > u),
//   psi(u, t) = P(Z > u) + sum_{k=0}^{u} P(Z = k) psi(u + 1 - k, t - 1).
double homogeneous_finite_ruin(const IntegerPmf& z, int u, int t);

struct UltimateRuin {
  std::vector<double> psi;  // u = 0..u_max
  // Upper estimate of the error introduced by truncating the infinite tail
  // sums at the table end: (degree + 1) * tail_mass.
  double tail_bound = 0.0;
};

// Ultimate-time ruin of the homogeneous model under E Z < 1:
//   psi(0) = E Z,
//   z0 psi(u) = sum_{j=1}^{u-1} P(Z > j) psi(u - j) + sum_{j >= u} P(Z > j).
UltimateRuin homogeneous_ultimate_ruin(const IntegerPmf& z, int u_max);

// Exact finite-horizon survival by enumerating every claim path of length t
// (over the truncated supports) and checking the surplus at each step.
// Throws OracleTooLarge when the raw path count exceeds path_cap.
double enum_survival_exact(const SeasonalModel& model, int u, int t, double path_cap = 1e7);

struct MonteCarloEstimate {
  double point = 0.0;
  double half_width_95 = 0.0;  // 1.96 sqrt(point (1 - point) / n_paths)
  long long n_paths = 0;
  std::uint64_t seed = 0;
};

// Plain Monte Carlo estimate of the finite-horizon survival probability.
// Path i draws from a counter-based substream keyed by (seed, i), so the
// result is reproducible independent of execution order.
MonteCarloEstimate mc_survival(const SeasonalModel& model, int u, int t, long long n_paths,
                               std::uint64_t seed);

}  // namespace dtrm
