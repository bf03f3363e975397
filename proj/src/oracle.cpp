#include "dtrm/oracle.hpp"

#include <cmath>
#include <sstream>

#include "dtrm/errors.hpp"

namespace dtrm {

namespace {

// splitmix64 finalizer; full-period 64-bit mixer.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Counter-based substream: state derived from (seed, counter), then advanced
// in golden-ratio increments.
class SubStream {
 public:
  SubStream(std::uint64_t seed, std::uint64_t counter)
      : state_(mix64(seed + 0x9E3779B97F4A7C15ull * (counter + 1)) ^ mix64(~seed)) {}

  double uniform01() {
    state_ += 0x9E3779B97F4A7C15ull;
    return static_cast<double>(mix64(state_) >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

}  // namespace

double homogeneous_finite_ruin(const IntegerPmf& z, int u, int t) {
  if (u < 0 || t < 1) throw InvalidArgument("need u >= 0 and t >= 1");
  const int width = u + t + 1;  // largest surplus reachable at any level
  std::vector<double> prev(static_cast<std::size_t>(width) + 1, 0.0);
  std::vector<double> cur(prev.size(), 0.0);
  for (int level = 1; level <= t; ++level) {
    // cur[v] = psi(v, level) for v = 0..u+t-level
    const int vmax = u + t - level;
    for (int v = 0; v <= vmax; ++v) {
      double acc = z.tail_above(static_cast<std::size_t>(v));
      if (level > 1) {
        const int kmax = std::min<int>(v, static_cast<int>(z.degree()));
        for (int k = 0; k <= kmax; ++k) {
          acc += z.prob(static_cast<std::size_t>(k)) *
                 prev[static_cast<std::size_t>(v + 1 - k)];
        }
      }
      cur[static_cast<std::size_t>(v)] = acc;
    }
    std::swap(prev, cur);
  }
  return prev[static_cast<std::size_t>(u)];
}

UltimateRuin homogeneous_ultimate_ruin(const IntegerPmf& z, int u_max) {
  if (u_max < 0) throw InvalidArgument("u_max must be >= 0");
  if (!(z.mean() < 1.0)) {
    throw NetProfitViolation("homogeneous recursion requires E Z < 1");
  }
  const double z0 = z.prob(0);
  // E Z < 1 forces P(Z = 0) > 0
  const int d = static_cast<int>(z.degree());
  // suffix sums of tails: cum[j] = sum_{i >= j} P(Z > i)
  std::vector<double> cum(static_cast<std::size_t>(d) + 2, 0.0);
  for (int j = d; j >= 0; --j) {
    cum[static_cast<std::size_t>(j)] =
        cum[static_cast<std::size_t>(j) + 1] + z.tail_above(static_cast<std::size_t>(j));
  }
  auto tails_from = [&](int j) {
    return j <= d ? cum[static_cast<std::size_t>(j)] : 0.0;
  };

  UltimateRuin out;
  out.psi.assign(static_cast<std::size_t>(u_max) + 1, 0.0);
  out.psi[0] = z.mean();
  out.tail_bound = (static_cast<double>(d) + 1.0) * z.tail_mass();
  for (int u = 1; u <= u_max; ++u) {
    double acc = tails_from(u);
    const int jmax = std::min(u - 1, d);
    for (int j = 1; j <= jmax; ++j) {
      acc += z.tail_above(static_cast<std::size_t>(j)) * out.psi[static_cast<std::size_t>(u - j)];
    }
    out.psi[static_cast<std::size_t>(u)] = acc / z0;
  }
  return out;
}

double enum_survival_exact(const SeasonalModel& model, int u, int t, double path_cap) {
  if (u < 0 || t < 1) throw InvalidArgument("need u >= 0 and t >= 1");
  const int n = model.seasons();
  double raw_paths = 1.0;
  for (int step = 1; step <= t; ++step) {
    int atoms = 0;
    const auto& probs = model.claim(((step - 1) % n) + 1).probs();
    for (double p : probs) atoms += p > 0.0 ? 1 : 0;
    raw_paths *= static_cast<double>(atoms);
    if (raw_paths > path_cap) {
      std::ostringstream os;
      os << "path enumeration needs more than " << path_cap << " paths";
      throw OracleTooLarge(os.str());
    }
  }

  // depth-first over claim paths; surplus w, constraint Z <= w at each step
  double survive = 0.0;
  struct Frame {
    int w;
    double prob;
  };
  // recursion with explicit lambda
  auto rec = [&](auto&& self, int step, int w, double prob) -> void {
    if (step > t) {
      survive += prob;
      return;
    }
    const IntegerPmf& z = model.claim(((step - 1) % n) + 1);
    const int kmax = std::min<int>(w, static_cast<int>(z.degree()));
    for (int k = 0; k <= kmax; ++k) {
      const double p = z.prob(static_cast<std::size_t>(k));
      if (p == 0.0) continue;
      self(self, step + 1, w + 1 - k, prob * p);
    }
  };
  rec(rec, 1, u, 1.0);
  return survive;
}

MonteCarloEstimate mc_survival(const SeasonalModel& model, int u, int t, long long n_paths,
                               std::uint64_t seed) {
  if (n_paths < 1) throw InvalidArgument("need at least one path");
  if (u < 0 || t < 1) throw InvalidArgument("need u >= 0 and t >= 1");
  const int n = model.seasons();

  // cumulative tables for inverse-CDF sampling
  std::vector<std::vector<double>> cdf(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    const auto& probs = model.claim(k).probs();
    auto& c = cdf[static_cast<std::size_t>(k - 1)];
    c.resize(probs.size());
    double acc = 0.0;
    for (std::size_t j = 0; j < probs.size(); ++j) {
      acc += probs[j];
      c[j] = acc;
    }
  }

  long long survivors = 0;
  for (long long i = 0; i < n_paths; ++i) {
    SubStream rng(seed, static_cast<std::uint64_t>(i));
    long long w = u;
    bool alive = true;
    for (int step = 1; step <= t; ++step) {
      const auto& c = cdf[static_cast<std::size_t>((step - 1) % n)];
      const double x = rng.uniform01();
      std::size_t k = 0;
      while (k + 1 < c.size() && x >= c[k]) ++k;
      // draws beyond the truncated table land on the last atom
      w += 1 - static_cast<long long>(k);
      if (w <= 0) {
        alive = false;
        break;
      }
    }
    survivors += alive ? 1 : 0;
  }

  MonteCarloEstimate est;
  est.n_paths = n_paths;
  est.seed = seed;
  est.point = static_cast<double>(survivors) / static_cast<double>(n_paths);
  est.half_width_95 =
      1.96 * std::sqrt(est.point * (1.0 - est.point) / static_cast<double>(n_paths));
  return est;
}

}  // namespace dtrm
