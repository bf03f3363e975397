#include "dtrm/roots.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "dtrm/errors.hpp"

namespace dtrm {

namespace {

using Complex = std::complex<double>;

// Ascending-coefficient polynomial helpers.

Complex poly_eval(const std::vector<double>& c, Complex s) {
  Complex acc = 0.0;
  for (std::size_t j = c.size(); j-- > 0;) acc = acc * s + c[j];
  return acc;
}

// Magnitude scale of the evaluation, sum |c_j| |s|^j; used for relative
// smallness tests.
double poly_scale(const std::vector<double>& c, Complex s) {
  const double r = std::abs(s);
  double acc = 0.0;
  for (std::size_t j = c.size(); j-- > 0;) acc = acc * r + std::abs(c[j]);
  return acc;
}

std::vector<double> poly_derivative(const std::vector<double>& c) {
  if (c.size() <= 1) return {0.0};
  std::vector<double> d(c.size() - 1);
  for (std::size_t j = 1; j < c.size(); ++j) d[j - 1] = c[j] * static_cast<double>(j);
  return d;
}

// Newton iteration; returns the refined point (best effort, callers verify).
Complex newton_refine(const std::vector<double>& c, const std::vector<double>& dc,
                      Complex s, int max_iter = 100) {
  Complex best = s;
  double best_abs = std::abs(poly_eval(c, s));
  for (int it = 0; it < max_iter; ++it) {
    const Complex f = poly_eval(c, s);
    const Complex df = poly_eval(dc, s);
    if (df == 0.0) break;
    const Complex step = f / df;
    s -= step;
    const double fa = std::abs(poly_eval(c, s));
    if (fa < best_abs) {
      best_abs = fa;
      best = s;
    }
    if (std::abs(step) <= 1e-16 * (1.0 + std::abs(s))) break;
  }
  return best;
}

// Synthetic division of c by (s - 1); the remainder c(1) is dropped.
std::vector<double> deflate_at_one(const std::vector<double>& c) {
  std::vector<double> q(c.size() - 1, 0.0);
  double carry = c.back();
  for (std::size_t j = c.size() - 1; j-- > 0;) {
    q[j] = carry;
    carry = c[j] + carry;
  }
  return q;
}

// Parlett-Reinsch balancing with powers of two (no rounding error).
void balance(Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  const double gamma = 0.9;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < n; ++i) {
      double row_norm = a.row(i).lpNorm<1>() - std::abs(a(i, i));
      double col_norm = a.col(i).lpNorm<1>() - std::abs(a(i, i));
      if (row_norm == 0.0 || col_norm == 0.0) continue;
      int exponent = 0;
      std::frexp(row_norm / col_norm, &exponent);
      exponent /= 2;
      if (exponent == 0) continue;
      const double scaled_col = std::ldexp(col_norm, exponent);
      const double scaled_row = std::ldexp(row_norm, -exponent);
      if (scaled_col + scaled_row < gamma * (col_norm + row_norm)) {
        changed = true;
        a.row(i) *= std::ldexp(1.0, -exponent);
        a.col(i) *= std::ldexp(1.0, exponent);
      }
    }
  }
}

std::vector<Complex> companion_eigenvalues(const std::vector<double>& coeffs) {
  // trim exact zero leading coefficients (callers deflated zeros already)
  std::size_t deg = coeffs.size() - 1;
  while (deg > 0 && coeffs[deg] == 0.0) --deg;
  if (deg == 0) return {};
  const double lead = coeffs[deg];
  if (deg == 1) return {Complex(-coeffs[0] / lead, 0.0)};

  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(static_cast<int>(deg), static_cast<int>(deg));
  for (std::size_t i = 1; i < deg; ++i) comp(static_cast<int>(i), static_cast<int>(i - 1)) = 1.0;
  for (std::size_t i = 0; i < deg; ++i) {
    comp(static_cast<int>(i), static_cast<int>(deg - 1)) = -coeffs[i] / lead;
  }
  balance(comp);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(comp, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw RootRefinementFailure("companion eigenvalue iteration did not converge");
  }
  std::vector<Complex> out(deg);
  for (std::size_t i = 0; i < deg; ++i) out[i] = solver.eigenvalues()(static_cast<int>(i));
  return out;
}

std::string describe_candidates(const std::vector<Complex>& all) {
  std::ostringstream os;
  os.precision(12);
  for (const auto& r : all) {
    os << " (" << r.real() << (r.imag() < 0 ? "" : "+") << r.imag() << "i, |s|=" << std::abs(r)
       << ")";
  }
  return os.str();
}

}  // namespace

RootSet find_unit_disk_roots(const SeasonalModel& model, const RootConfig& cfg) {
  const int n = model.seasons();
  if (n < 2) throw InvalidArgument("unit-disk root location needs at least two seasons");
  if (classify(model).tag != Criticality::kNetProfit) {
    throw InvalidArgument("unit-disk root location requires the net profit condition");
  }

  // P(s) = G_{S_N}(s) - s^N on the truncated table.
  const auto& total = model.total().probs();
  const std::size_t deg = std::max(total.size() - 1, static_cast<std::size_t>(n));
  if (deg > static_cast<std::size_t>(cfg.max_poly_degree)) {
    throw ResourceLimit("polynomial degree exceeds max_poly_degree");
  }
  std::vector<double> c(deg + 1, 0.0);
  std::copy(total.begin(), total.end(), c.begin());
  c[static_cast<std::size_t>(n)] -= 1.0;
  const std::vector<double> dc = poly_derivative(c);

  // Exact leading zeros: a root at s = 0 of that multiplicity (the minimal
  // support of S_N, which is < N under the net profit condition).
  std::size_t zero_mult = 0;
  while (zero_mult < c.size() && c[zero_mult] == 0.0) ++zero_mult;
  if (zero_mult >= static_cast<std::size_t>(n)) {
    throw InvalidModel("total claim law has minimal support >= N despite net profit");
  }
  std::vector<double> reduced(c.begin() + static_cast<std::ptrdiff_t>(zero_mult), c.end());

  // s = 1 solves G(1) = 1 up to tail mass; deflating it keeps its numerical
  // image from straddling the |s| = 1 boundary filter.
  reduced = deflate_at_one(reduced);

  const std::vector<Complex> eigs = companion_eigenvalues(reduced);

  std::vector<Complex> inside;
  std::vector<Complex> grazing;
  for (const auto& r : eigs) {
    const double mod = std::abs(r);
    if (mod < 1.0 - cfg.tol_boundary) {
      inside.push_back(r);
    } else if (mod < 1.0) {
      grazing.push_back(r);
    }
  }
  if (!grazing.empty()) {
    throw RootCountMismatch("roots graze the unit circle; candidates:" +
                            describe_candidates(eigs));
  }

  // Refine on the original polynomial.
  for (auto& r : inside) r = newton_refine(c, dc, r);

  // Snap numerically-real values; the eigen solver already returns exact
  // conjugate pairs, so this only normalizes refinement noise.
  for (auto& r : inside) {
    if (std::abs(r.imag()) <= 1e-11 * (1.0 + std::abs(r.real()))) r = Complex(r.real(), 0.0);
  }

  std::sort(inside.begin(), inside.end(), [](const Complex& a, const Complex& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });

  // Greedy clustering within tol_cluster.
  std::vector<std::vector<Complex>> clusters;
  for (const auto& r : inside) {
    bool placed = false;
    for (auto& cl : clusters) {
      if (std::abs(cl.front() - r) < cfg.tol_cluster) {
        cl.push_back(r);
        placed = true;
        break;
      }
    }
    if (!placed) clusters.push_back({r});
  }

  // Derivative ladder for the multiplicity test and for refining multiple
  // roots (a root of multiplicity m is a simple root of the (m-1)-th
  // derivative).
  std::vector<std::vector<double>> ladder = {c};
  for (int l = 0; l < n; ++l) ladder.push_back(poly_derivative(ladder.back()));

  auto derivative_test = [&](Complex a, int mult) {
    for (int l = 0; l < mult; ++l) {
      const double val = std::abs(poly_eval(ladder[static_cast<std::size_t>(l)], a));
      const double scale =
          std::max(poly_scale(ladder[static_cast<std::size_t>(l)], a), 1e-30);
      if (val > cfg.tol_multiplicity * scale) return false;
    }
    return true;
  };

  std::vector<DiskRoot> found;
  for (const auto& cl : clusters) {
    const int mult = static_cast<int>(cl.size());
    Complex center = 0.0;
    for (const auto& r : cl) center += r;
    center /= static_cast<double>(mult);
    if (std::abs(center.imag()) <= 1e-11 * (1.0 + std::abs(center.real()))) {
      center = Complex(center.real(), 0.0);
    }
    if (mult == 1) {
      found.push_back({center, 1, std::abs(poly_eval(c, center))});
      continue;
    }
    // The cluster mean of a perturbed multiple root is already accurate;
    // polish it on the derivative where the root is simple.
    Complex a = newton_refine(ladder[static_cast<std::size_t>(mult - 1)],
                              ladder[static_cast<std::size_t>(mult)], center);
    if (std::abs(a.imag()) <= 1e-11 * (1.0 + std::abs(a.real()))) a = Complex(a.real(), 0.0);
    if (derivative_test(a, mult)) {
      found.push_back({a, mult, std::abs(poly_eval(c, a))});
    } else {
      // Not a genuine multiple root: keep the members as separate simple
      // roots (they were individually Newton-refined above).
      for (const auto& r : cl) found.push_back({r, 1, std::abs(poly_eval(c, r))});
    }
  }

  if (zero_mult > 0) {
    found.push_back({Complex(0.0, 0.0), static_cast<int>(zero_mult), 0.0});
  }

  // Conjugate closure: pair complex roots and average the representatives.
  std::vector<DiskRoot> closed;
  std::vector<bool> used(found.size(), false);
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (used[i]) continue;
    if (found[i].value.imag() == 0.0) {
      used[i] = true;
      closed.push_back(found[i]);
      continue;
    }
    bool paired = false;
    for (std::size_t j = i + 1; j < found.size(); ++j) {
      if (used[j] || found[j].multiplicity != found[i].multiplicity) continue;
      if (std::abs(std::conj(found[i].value) - found[j].value) < cfg.tol_cluster) {
        used[i] = used[j] = true;
        Complex rep = (found[i].value + std::conj(found[j].value)) / 2.0;
        if (rep.imag() < 0.0) rep = std::conj(rep);
        const double res_lo = std::abs(poly_eval(c, std::conj(rep)));
        const double res_hi = std::abs(poly_eval(c, rep));
        closed.push_back({std::conj(rep), found[i].multiplicity, res_lo});
        closed.push_back({rep, found[i].multiplicity, res_hi});
        paired = true;
        break;
      }
    }
    if (!paired) {
      throw RootCountMismatch("complex root without conjugate partner; candidates:" +
                              describe_candidates(eigs));
    }
  }

  std::sort(closed.begin(), closed.end(), [](const DiskRoot& a, const DiskRoot& b) {
    return a.value.real() != b.value.real() ? a.value.real() < b.value.real()
                                            : a.value.imag() < b.value.imag();
  });

  RootSet set{std::move(closed)};
  if (set.total_multiplicity() != n - 1) {
    std::ostringstream os;
    os << "expected " << n - 1 << " unit-disk roots with multiplicity, found "
       << set.total_multiplicity() << "; candidates:" << describe_candidates(eigs);
    throw RootCountMismatch(os.str());
  }
  for (const auto& r : set.roots) {
    if (!(r.residual < cfg.tol_root)) {
      std::ostringstream os;
      os.precision(12);
      os << "root " << r.value.real() << "+" << r.value.imag() << "i kept residual "
         << r.residual;
      throw RootRefinementFailure(os.str());
    }
  }
  return set;
}

}  // namespace dtrm
