#include "dtrm/initial_values.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dtrm/errors.hpp"

namespace dtrm {

namespace {

using Complex = std::complex<double>;

// Prefix convolutions C_k = law of Z_N + Z_1 + ... + Z_{k-1}, k = 1..N-1.
std::vector<IntegerPmf> prefix_products(const SeasonalModel& model) {
  const int n = model.seasons();
  std::vector<IntegerPmf> out;
  out.reserve(static_cast<std::size_t>(n - 1));
  out.push_back(model.claim(n));
  for (int k = 2; k <= n - 1; ++k) {
    out.push_back(convolve(out.back(), model.claim(k - 1)));
  }
  return out;
}

// l-th derivative of C(s) * s^{-k} at a, by the Leibniz rule; the power-law
// factor differentiates exactly, the polynomial factor via pgf_derivative.
Complex product_derivative(const IntegerPmf& ck, int k, Complex a, int l) {
  Complex total = 0.0;
  double binom = 1.0;
  for (int i = 0; i <= l; ++i) {
    if (i > 0) binom = binom * static_cast<double>(l - i + 1) / static_cast<double>(i);
    const Complex ci = (i == 0) ? ck.pgf(a) : ck.pgf_derivative(a, i);
    double falling = 1.0;
    for (int t = 0; t < l - i; ++t) falling *= -static_cast<double>(k + t);
    total += binom * ci * falling * std::pow(a, Complex(-(k + (l - i)), 0.0));
  }
  return total;
}

struct RowBlock {
  std::vector<Complex> coeffs;
  Complex rhs;
  RowInfo info;
  bool is_pair = false;  // complex row standing for a conjugate pair
};

// Complex rows of the system, one per nonzero representative root (with its
// derivative rows), then degeneracy rows, then the mass row.
std::vector<RowBlock> assemble_rows(const SeasonalModel& model, const RootSet& roots) {
  const int n = model.seasons();
  if (n < 2) throw InvalidArgument("initial system needs at least two seasons");
  if (classify(model).tag != Criticality::kNetProfit) {
    throw InvalidArgument("initial system requires the net profit condition");
  }

  const auto prefixes = prefix_products(model);
  std::vector<double> z0(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) z0[static_cast<std::size_t>(k - 1)] = model.claim(k).prob(0);

  std::vector<RowBlock> blocks;

  for (const auto& root : roots.roots) {
    if (root.value == Complex(0.0, 0.0)) continue;  // zero roots carry no equation
    if (root.value.imag() < 0.0) continue;          // partner of a conjugate pair
    const bool pair = root.value.imag() > 0.0;
    const Complex a = root.value;

    RowBlock base;
    base.coeffs.assign(static_cast<std::size_t>(n), Complex(0.0));
    base.coeffs[0] = z0[static_cast<std::size_t>(n - 1)];
    for (int k = 1; k <= n - 1; ++k) {
      const Complex g = prefixes[static_cast<std::size_t>(k - 1)].pgf(a);
      base.coeffs[static_cast<std::size_t>(k)] =
          z0[static_cast<std::size_t>(k - 1)] * g * std::pow(a, Complex(-k, 0.0));
    }
    base.rhs = 0.0;
    base.info = {RowKind::kRoot, a, 0, 0, false};
    base.is_pair = pair;
    blocks.push_back(std::move(base));

    for (int l = 1; l < root.multiplicity; ++l) {
      RowBlock drow;
      drow.coeffs.assign(static_cast<std::size_t>(n), Complex(0.0));
      for (int k = 1; k <= n - 1; ++k) {
        drow.coeffs[static_cast<std::size_t>(k)] =
            z0[static_cast<std::size_t>(k - 1)] *
            product_derivative(prefixes[static_cast<std::size_t>(k - 1)], k, a, l);
      }
      drow.rhs = 0.0;
      drow.info = {RowKind::kDerivative, a, l, 0, false};
      drow.is_pair = pair;
      blocks.push_back(std::move(drow));
    }
  }

  // Seasons with z0 = 0 zero out a column of the root rows; the n = 1 step of
  // the propagation system pins those unknowns against their successors.
  for (int k = 1; k <= n; ++k) {
    if (z0[static_cast<std::size_t>(k - 1)] != 0.0) continue;
    const IntegerPmf& zk = model.claim(k);
    if (zk.prob(1) <= 0.0) {
      std::ostringstream os;
      os << "season " << k << " has P(Z=0) = P(Z=1) = 0; the degeneracy repair needs "
            "P(Z=1) > 0";
      throw SingularInitialSystem(os.str());
    }
    RowBlock row;
    row.coeffs.assign(static_cast<std::size_t>(n), Complex(0.0));
    row.coeffs[static_cast<std::size_t>(k - 1)] = 1.0;
    const int next = (k % n) + 1;
    row.coeffs[static_cast<std::size_t>(next - 1)] = -(zk.prob(0) + zk.prob(1));
    row.rhs = 0.0;
    row.info = {RowKind::kDegeneracy, Complex(0.0), 0, k, false};
    blocks.push_back(std::move(row));
  }

  RowBlock mass;
  mass.coeffs.assign(static_cast<std::size_t>(n), Complex(0.0));
  mass.coeffs[0] = z0[static_cast<std::size_t>(n - 1)];
  for (int k = 1; k <= n - 1; ++k) {
    mass.coeffs[static_cast<std::size_t>(k)] = z0[static_cast<std::size_t>(k - 1)];
  }
  mass.rhs = static_cast<double>(n) - model.mean_total();
  mass.info = {RowKind::kMass, Complex(0.0), 0, 0, false};
  blocks.push_back(std::move(mass));
  return blocks;
}

}  // namespace

InitialSystem build_initial_system(const SeasonalModel& model, const RootSet& roots) {
  const int n = model.seasons();
  const auto blocks = assemble_rows(model, roots);

  int real_rows = 0;
  for (const auto& b : blocks) real_rows += b.is_pair ? 2 : 1;
  if (real_rows != n) {
    std::ostringstream os;
    os << "system has " << real_rows << " equations for " << n
       << " unknowns; root multiplicities and zero-z0 seasons do not line up";
    throw SingularInitialSystem(os.str());
  }

  InitialSystem sys;
  sys.matrix.resize(n, n);
  sys.rhs.resize(n);
  int r = 0;
  for (const auto& b : blocks) {
    for (int j = 0; j < n; ++j) sys.matrix(r, j) = b.coeffs[static_cast<std::size_t>(j)].real();
    sys.rhs(r) = b.rhs.real();
    sys.rows.push_back(b.info);
    ++r;
    if (b.is_pair) {
      for (int j = 0; j < n; ++j) sys.matrix(r, j) = b.coeffs[static_cast<std::size_t>(j)].imag();
      sys.rhs(r) = b.rhs.imag();
      RowInfo info = b.info;
      info.imag_part = true;
      sys.rows.push_back(info);
      ++r;
    }
  }
  for (int k = 1; k <= n; ++k) {
    if (model.claim(k).prob(0) == 0.0) sys.zero_z0_seasons.push_back(k);
  }
  return sys;
}

ComplexInitialSystem build_initial_system_complex(const SeasonalModel& model,
                                                  const RootSet& roots) {
  const int n = model.seasons();
  const auto blocks = assemble_rows(model, roots);
  int rows = 0;
  for (const auto& b : blocks) rows += b.is_pair ? 2 : 1;
  if (rows != n) throw SingularInitialSystem("equation count does not match season count");

  ComplexInitialSystem sys;
  sys.matrix.resize(n, n);
  sys.rhs.resize(n);
  int r = 0;
  for (const auto& b : blocks) {
    for (int j = 0; j < n; ++j) sys.matrix(r, j) = b.coeffs[static_cast<std::size_t>(j)];
    sys.rhs(r) = b.rhs;
    ++r;
    if (b.is_pair) {
      // the conjugate root's own equation
      for (int j = 0; j < n; ++j) {
        sys.matrix(r, j) = std::conj(b.coeffs[static_cast<std::size_t>(j)]);
      }
      sys.rhs(r) = std::conj(b.rhs);
      ++r;
    }
  }
  return sys;
}

InitialVector solve_initial_values(const InitialSystem& system, SolveDiagnostics* diag) {
  const int n = static_cast<int>(system.matrix.rows());
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(system.matrix);
  const double rcond = lu.rcond();
  Eigen::VectorXd x = lu.solve(system.rhs);
  // one refinement step
  Eigen::VectorXd resid = system.rhs - system.matrix * x;
  x += lu.solve(resid);
  resid = system.rhs - system.matrix * x;
  const double rinf = resid.lpNorm<Eigen::Infinity>();

  if (!x.allFinite() || !(rcond > 1e-14)) {
    Eigen::FullPivLU<Eigen::MatrixXd> full(system.matrix);
    full.setThreshold(1e-12);
    std::ostringstream os;
    os << "rank " << full.rank() << " of " << n << ", rcond " << rcond
       << ", zero-z0 seasons:";
    for (int k : system.zero_z0_seasons) os << ' ' << k;
    throw SingularInitialSystem(os.str());
  }
  if (!(rinf < kInitialSystemTol * std::max(1.0, system.rhs.lpNorm<Eigen::Infinity>()))) {
    std::ostringstream os;
    os << "solve residual " << rinf << " exceeds tolerance";
    throw SingularInitialSystem(os.str());
  }

  const double tol_prob = 1e-8;
  for (int i = 0; i < n; ++i) {
    if (x(i) < -tol_prob || x(i) > 1.0 + tol_prob) {
      std::ostringstream os;
      os.precision(12);
      os << "entry m0[" << i << "] = " << x(i) << " is not a probability";
      throw NonProbabilisticSolution(os.str());
    }
  }

  InitialVector out;
  out.m0.assign(x.data(), x.data() + n);

  if (diag != nullptr) {
    diag->residual_inf = rinf;
    diag->condition_estimate = rcond > 0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    // mass identity: the mass row is last by construction
    const int last = n - 1;
    diag->mass_identity_defect =
        std::abs(system.matrix.row(last).dot(x) - system.rhs(last));
  }
  return out;
}

BiSeasonalValues bi_seasonal_closed_form(const SeasonalModel& model) {
  if (model.seasons() != 2) {
    throw InvalidArgument("closed form applies to two-season models only");
  }
  const double es2 = model.mean_total();
  if (!(es2 < 2.0 - kNetProfitEps)) {
    throw NetProfitViolation("closed form requires E(Z1 + Z2) < 2");
  }
  const IntegerPmf& z1 = model.claim(1);
  const IntegerPmf& z2 = model.claim(2);
  const double z01 = z1.prob(0);
  const double z02 = z2.prob(0);
  const double margin = 2.0 - es2;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  if (z01 > 0.0 && z02 > 0.0) {
    // unique root of G_{S_2}(s) = s^2 in (-1, 0): bisection on a bracketing
    // sign change, then Newton polish
    const IntegerPmf& total = model.total();
    auto f = [&](double s) {
      return total.pgf(Complex(s, 0.0)).real() - s * s;
    };
    double lo = -1.0, hi = 0.0;
    double flo = f(lo);
    if (!(flo < 0.0)) {
      throw RootCountMismatch(
          "no sign change of G(s) - s^2 on (-1, 0); interior root missing");
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (f(mid) < 0.0) {
        lo = mid;
      } else {
        hi = mid;
      }
      if (hi - lo < 1e-15) break;
    }
    double alpha = 0.5 * (lo + hi);
    for (int it = 0; it < 8; ++it) {
      const double fv = f(alpha);
      const double dv = total.pgf_derivative(Complex(alpha, 0.0), 1).real() - 2.0 * alpha;
      if (dv == 0.0) break;
      alpha -= fv / dv;
    }
    const double g2 = z2.pgf(Complex(alpha, 0.0)).real();
    BiSeasonalValues out;
    out.alpha = alpha;
    out.phi0 = margin * alpha / (alpha - g2);
    out.phi1 = margin / z02 * g2 / (g2 - alpha);
    return out;
  }
  if (z01 > 0.0 && z02 == 0.0) {
    const double z12 = z2.prob(1);
    if (z12 <= 0.0) {
      throw SingularInitialSystem("P(Z2 = 0) = P(Z2 = 1) = 0 is not repairable");
    }
    return {margin, margin / (z01 * z12), nan};
  }
  if (z01 == 0.0 && z02 > 0.0) {
    return {0.0, margin / z02, nan};
  }
  // both zero would force E S_2 >= 2, excluded above
  throw NetProfitViolation("P(Z1 = 0) = P(Z2 = 0) = 0 contradicts E(Z1 + Z2) < 2");
}

}  // namespace dtrm
