#include "dtrm/model.hpp"

#include <utility>

#include "dtrm/errors.hpp"

namespace dtrm {

namespace {

IntegerPmf total_of(const std::vector<IntegerPmf>& claims) {
  IntegerPmf acc = claims.front();
  for (std::size_t i = 1; i < claims.size(); ++i) {
    acc = convolve(acc, claims[i]);
  }
  return acc;
}

}  // namespace

SeasonalModel::SeasonalModel(std::vector<IntegerPmf> claims)
    : claims_(std::move(claims)), total_(total_of(claims_)) {
  double m = 0.0;
  for (const auto& z : claims_) m += z.mean();
  mean_total_ = m;
}

SeasonalModel build_model(std::vector<IntegerPmf> claims, int max_seasons) {
  if (claims.empty()) throw InvalidModel("model needs at least one season");
  if (static_cast<int>(claims.size()) > max_seasons) {
    throw InvalidModel("season count exceeds the configured maximum");
  }
  return SeasonalModel(std::move(claims));
}

ModelClass classify(const SeasonalModel& model) {
  const int n = model.seasons();
  const double mean = model.mean_total();

  if (mean < n - kNetProfitEps) return {Criticality::kNetProfit, 0, 0};
  if (mean > n + kNetProfitEps) return {Criticality::kSupercritical, 0, 0};

  // Critical band. P(S_N = N) = 1 is detected structurally (every claim a
  // point mass), not from the convolved table, to avoid truncation noise.
  bool all_point = true;
  for (const auto& z : model.claims()) {
    if (!z.is_point_mass()) {
      all_point = false;
      break;
    }
  }
  if (!all_point) return {Criticality::kCriticalNondegenerate, 0, 0};

  // All claims deterministic; the atoms sum to N exactly within the band.
  ModelClass cls;
  cls.tag = Criticality::kCriticalDegenerate;
  long long claim_sum = 0;
  long long best = 0;
  int best_t = 0;
  for (int t = 1; t <= n; ++t) {
    claim_sum += model.claim(t).min_support();
    const long long drift = static_cast<long long>(t) - claim_sum;
    if (best_t == 0 || drift < best) {
      best = drift;
      best_t = t;
    }
  }
  cls.t_star = best_t;
  cls.min_drift = best;
  return cls;
}

int degenerate_survival(const ModelClass& cls, long long u) {
  if (cls.tag != Criticality::kCriticalDegenerate) {
    throw InvalidArgument("degenerate_survival requires the degenerate critical class");
  }
  return (u + cls.min_drift <= 0) ? 0 : 1;
}

}  // namespace dtrm
