#include "dtrm/pmf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dtrm/errors.hpp"

namespace dtrm {

namespace {
constexpr double kPgfDomainSlack = 1e-9;
constexpr int kMaxPoissonTerms = 200000;
}  // namespace

IntegerPmf::IntegerPmf(std::vector<double> probs, double tail_mass)
    : probs_(std::move(probs)), tail_mass_(tail_mass) {
  suffix_.assign(probs_.size() + 1, 0.0);
  for (std::size_t j = probs_.size(); j-- > 0;) {
    suffix_[j] = suffix_[j + 1] + probs_[j];
  }
  // suffix_[j] currently holds P(X >= j); shift to P(X > j).
  for (std::size_t j = 0; j < probs_.size(); ++j) {
    suffix_[j] = suffix_[j + 1];
  }
  double m = 0.0;
  int nonzero = 0;
  min_support_ = 0;
  for (std::size_t j = 0; j < probs_.size(); ++j) {
    m += static_cast<double>(j) * probs_[j];
    if (probs_[j] > 0.0) {
      if (nonzero == 0) min_support_ = static_cast<int>(j);
      ++nonzero;
    }
  }
  mean_ = m;
  point_mass_ = (nonzero == 1 && tail_mass_ == 0.0);
}

IntegerPmf IntegerPmf::from_weights(std::span<const double> weights) {
  if (weights.empty()) {
    throw InvalidDistribution("empty weight table");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w)) throw InvalidDistribution("non-finite weight");
    if (w < 0.0) throw InvalidDistribution("negative weight");
    sum += w;
  }
  if (sum <= 0.0) throw InvalidDistribution("all weights are zero");

  std::size_t last = weights.size();
  while (last > 1 && weights[last - 1] == 0.0) --last;
  std::vector<double> probs(last);
  for (std::size_t j = 0; j < last; ++j) probs[j] = weights[j] / sum;
  return IntegerPmf(std::move(probs), 0.0);
}

IntegerPmf IntegerPmf::from_weights(std::initializer_list<double> weights) {
  return from_weights(std::span<const double>(weights.begin(), weights.size()));
}

IntegerPmf IntegerPmf::poisson(double lambda, double eps_tail) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidDistribution("Poisson parameter must be positive and finite");
  }
  if (!(eps_tail > 0.0 && eps_tail < 1.0)) {
    throw InvalidDistribution("tail tolerance must lie in (0, 1)");
  }
  if (std::exp(-lambda) == 0.0) {
    throw InvalidDistribution("Poisson parameter too large for double precision");
  }
  std::vector<double> probs;
  double p = std::exp(-lambda);
  double cum = p;
  probs.push_back(p);
  int j = 0;
  while (1.0 - cum >= eps_tail) {
    if (++j > kMaxPoissonTerms) {
      throw InvalidDistribution("Poisson truncation did not converge");
    }
    p *= lambda / j;
    cum += p;
    probs.push_back(p);
  }
  return IntegerPmf(std::move(probs), std::max(0.0, 1.0 - cum));
}

IntegerPmf IntegerPmf::point_mass(int atom) {
  if (atom < 0) throw InvalidDistribution("point mass atom must be >= 0");
  std::vector<double> probs(static_cast<std::size_t>(atom) + 1, 0.0);
  probs.back() = 1.0;
  return IntegerPmf(std::move(probs), 0.0);
}

double IntegerPmf::tail_above(std::size_t j) const {
  if (j + 1 >= suffix_.size()) return 0.0;
  return suffix_[j];
}

std::complex<double> IntegerPmf::pgf(std::complex<double> s) const {
  if (std::abs(s) > 1.0 + kPgfDomainSlack) {
    throw DomainError("generating function evaluated outside the unit disk");
  }
  std::complex<double> acc = 0.0;
  for (std::size_t j = probs_.size(); j-- > 0;) {
    acc = acc * s + probs_[j];
  }
  return acc;
}

std::complex<double> IntegerPmf::pgf_derivative(std::complex<double> s, int order) const {
  if (order <= 0) throw InvalidArgument("derivative order must be >= 1");
  if (std::abs(s) > 1.0 + kPgfDomainSlack) {
    throw DomainError("generating function evaluated outside the unit disk");
  }
  if (static_cast<std::size_t>(order) > degree()) return 0.0;
  // Horner on the exactly differentiated coefficient table.
  std::complex<double> acc = 0.0;
  for (std::size_t j = probs_.size(); j-- > static_cast<std::size_t>(order);) {
    double coef = probs_[j];
    for (int l = 0; l < order; ++l) coef *= static_cast<double>(j - l);
    acc = acc * s + coef;
  }
  return acc;
}

IntegerPmf convolve(const IntegerPmf& a, const IntegerPmf& b) {
  const auto& pa = a.probs();
  const auto& pb = b.probs();
  std::vector<double> out(pa.size() + pb.size() - 1, 0.0);
  for (std::size_t i = 0; i < pa.size(); ++i) {
    if (pa[i] == 0.0) continue;
    for (std::size_t j = 0; j < pb.size(); ++j) {
      out[i + j] += pa[i] * pb[j];
    }
  }
  // No renormalization: the table sums to (1-ta)(1-tb) and the recorded
  // tail ta+tb over-counts the missing mass by the negligible ta*tb.
  return IntegerPmf(std::move(out), a.tail_mass() + b.tail_mass());
}

}  // namespace dtrm
