#pragma once

#include <vector>

#include "dtrm/pmf.hpp"

namespace dtrm {

inline constexpr int kMaxSeasons = 16;

// Classification band around the critical mean E S_N = N. The trichotomy is
// exact in theory; numerically, models within the band are treated as
// critical.
inline constexpr double kNetProfitEps = 1e-9;

// The N-seasonal risk model: surplus u + n - (Z_1 + ... + Z_n) with claim
// laws repeating with period N. Immutable; the law of the per-period total
// S_N = Z_1 + ... + Z_N is cached at construction.
class SeasonalModel {
 public:
  explicit SeasonalModel(std::vector<IntegerPmf> claims);

  int seasons() const { return static_cast<int>(claims_.size()); }
  // 1-based season accessor matching the usual Z_k indexing.
  const IntegerPmf& claim(int k) const { return claims_[static_cast<std::size_t>(k - 1)]; }
  const std::vector<IntegerPmf>& claims() const { return claims_; }
  const IntegerPmf& total() const { return total_; }
  // E S_N computed as the sum of the (truncated) season means.
  double mean_total() const { return mean_total_; }

 private:
  std::vector<IntegerPmf> claims_;
  IntegerPmf total_;
  double mean_total_;
};

SeasonalModel build_model(std::vector<IntegerPmf> claims, int max_seasons = kMaxSeasons);

enum class Criticality {
  kNetProfit,              // E S_N < N: survival is nontrivial
  kSupercritical,          // E S_N > N: ruin is certain
  kCriticalNondegenerate,  // E S_N = N, P(S_N = N) < 1: ruin is certain
  kCriticalDegenerate,     // P(S_N = N) = 1: deterministic walk
};

struct ModelClass {
  Criticality tag = Criticality::kNetProfit;
  // Degenerate case only: smallest t in 1..N minimizing t - (Z_1+...+Z_t),
  // and that minimal drift value.
  int t_star = 0;
  long long min_drift = 0;
};

ModelClass classify(const SeasonalModel& model);

// Deterministic survival indicator for the degenerate critical case:
// 0 if u + min_drift <= 0, else 1.
int degenerate_survival(const ModelClass& cls, long long u);

}  // namespace dtrm
