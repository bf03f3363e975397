#pragma once

#include <complex>
#include <vector>

#include "dtrm/model.hpp"

namespace dtrm {

struct RootConfig {
  double tol_root = 1e-10;      // residual bound |G(a) - a^N| per root
  double tol_boundary = 1e-8;   // strict-interior margin: require |a| < 1 - tol
  double tol_cluster = 1e-6;    // roots closer than this merge into one
  double tol_multiplicity = 1e-6;  // relative bound in the derivative test
  int max_poly_degree = 8192;
};

// A root of G_{S_N}(s) = s^N strictly inside the unit disk.
struct DiskRoot {
  std::complex<double> value;
  int multiplicity = 1;
  double residual = 0.0;  // |G(value) - value^N|
};

struct RootSet {
  std::vector<DiskRoot> roots;  // sorted by (real, imag)
  int total_multiplicity() const {
    int m = 0;
    for (const auto& r : roots) m += r.multiplicity;
    return m;
  }
};

// Locates the N-1 roots (with multiplicity) of G_{S_N}(s) = s^N in |s| < 1.
// Requires a net-profit model with N >= 2. The count N-1 includes a root at
// s = 0 (with multiplicity equal to the minimal support of S_N) whenever
// P(S_N = 0) = 0.
//
// Candidates come from the balanced companion matrix of the truncated
// polynomial G(s) - s^N with the always-present root s = 1 deflated; each
// interior candidate is Newton-refined on the original polynomial, clusters
// are merged and their multiplicity confirmed by the vanishing of the first
// multiplicity-1 derivatives.
RootSet find_unit_disk_roots(const SeasonalModel& model, const RootConfig& cfg = {});

}  // namespace dtrm
