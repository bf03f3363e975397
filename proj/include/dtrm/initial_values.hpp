#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "dtrm/model.hpp"
#include "dtrm/roots.hpp"

namespace dtrm {

// Residual contract of the linear solve.
inline constexpr double kInitialSystemTol = 1e-10;

// m0[k-1] = P(M_k = 0): the probability that the season-k shifted claim walk
// never climbs above zero.
struct InitialVector {
  std::vector<double> m0;
};

enum class RowKind { kRoot, kDerivative, kMass, kDegeneracy };

struct RowInfo {
  RowKind kind = RowKind::kMass;
  std::complex<double> root;  // root and derivative rows
  int order = 0;              // derivative rows: derivative order l
  int season = 0;             // degeneracy rows: season k with z0^{(k)} = 0
  bool imag_part = false;     // set on the imaginary component of a pair row
};

// Real N x N system whose solution is the initial vector. Complex conjugate
// root pairs are reduced to the real and imaginary parts of one
// representative row. Row order: root rows sorted by root (each followed by
// its derivative rows), then degeneracy rows by season, then the mass row.
struct InitialSystem {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
  std::vector<RowInfo> rows;
  std::vector<int> zero_z0_seasons;  // seasons with P(Z_k = 0) = 0
};

InitialSystem build_initial_system(const SeasonalModel& model, const RootSet& roots);

// Validation variant keeping one complex row per root (both conjugates
// present). Solving it and taking real parts must agree with the real path.
struct ComplexInitialSystem {
  Eigen::MatrixXcd matrix;
  Eigen::VectorXcd rhs;
};
ComplexInitialSystem build_initial_system_complex(const SeasonalModel& model,
                                                  const RootSet& roots);

struct SolveDiagnostics {
  double residual_inf = 0.0;      // ||A m - b||_inf after refinement
  double condition_estimate = 0;  // 1 / rcond from the LU factorization
  double mass_identity_defect = 0.0;
};

// LU with partial pivoting plus one iterative-refinement step.
InitialVector solve_initial_values(const InitialSystem& system,
                                   SolveDiagnostics* diag = nullptr);

// Closed-form initial survival values for the two-season model.
struct BiSeasonalValues {
  double phi0 = 0.0;
  double phi1 = 0.0;
  double alpha = 0.0;  // NaN when the degenerate branch applies
};
BiSeasonalValues bi_seasonal_closed_form(const SeasonalModel& model);

}  // namespace dtrm
