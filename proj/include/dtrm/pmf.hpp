#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace dtrm {

// Default truncation tolerance: laws with infinite support are truncated so
// that the discarded tail mass stays below this bound.
inline constexpr double kDefaultTailEps = 1e-14;

// Probability mass function of a non-negative integer random variable,
// stored as a dense table p[0..D]. Immutable after construction; the mean and
// tail sums are cached so instances can be shared freely across threads.
//
// For truncated laws `tail_mass()` records the discarded mass, and
// sum(probs) + tail_mass == 1 up to roundoff. `mean()` is the mean of the
// truncated table.
class IntegerPmf {
 public:
  // Builds a PMF proportional to the given non-negative weights.
  // Trailing zero weights are trimmed; interior zeros are kept exactly.
  static IntegerPmf from_weights(std::span<const double> weights);
  static IntegerPmf from_weights(std::initializer_list<double> weights);

  // Poisson(lambda), truncated to tail mass < eps_tail.
  static IntegerPmf poisson(double lambda, double eps_tail = kDefaultTailEps);

  // Distribution concentrated at a single atom.
  static IntegerPmf point_mass(int atom);

  const std::vector<double>& probs() const { return probs_; }
  std::size_t degree() const { return probs_.size() - 1; }
  double prob(std::size_t j) const { return j < probs_.size() ? probs_[j] : 0.0; }
  double tail_mass() const { return tail_mass_; }
  double mean() const { return mean_; }

  // P(X > j) over the truncated table (i.e. excluding tail_mass).
  double tail_above(std::size_t j) const;

  // Smallest j with p[j] > 0. Zero probabilities are structural: they come
  // through construction exactly, so this is an exact integer property.
  int min_support() const { return min_support_; }
  bool is_point_mass() const { return point_mass_; }

  // Generating function sum p[j] s^j, Horner-evaluated. Requires
  // |s| <= 1 + 1e-9, the region where the truncated series is trustworthy.
  std::complex<double> pgf(std::complex<double> s) const;

  // Exact derivative of the truncated polynomial, order >= 1.
  std::complex<double> pgf_derivative(std::complex<double> s, int order) const;

 private:
  IntegerPmf(std::vector<double> probs, double tail_mass);
  friend IntegerPmf convolve(const IntegerPmf& a, const IntegerPmf& b);

  std::vector<double> probs_;
  std::vector<double> suffix_;  // suffix_[j] = P(X > j), cached
  double tail_mass_ = 0.0;
  double mean_ = 0.0;
  int min_support_ = 0;
  bool point_mass_ = false;
};

// Distribution of the sum of two independent variables (exact discrete
// convolution). The recorded tail mass a.tail + b.tail is an upper bound on
// the mass actually missing from the table.
IntegerPmf convolve(const IntegerPmf& a, const IntegerPmf& b);

}  // namespace dtrm
