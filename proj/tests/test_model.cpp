#include <doctest.h>

#include <cmath>

#include "dtrm/errors.hpp"
#include "dtrm/model.hpp"
#include "test_util.hpp"

using dtrm::build_model;
using dtrm::classify;
using dtrm::Criticality;
using dtrm::IntegerPmf;

TEST_SUITE_BEGIN("model");

TEST_CASE("build caches the period total") {
  const auto m = build_model({IntegerPmf::poisson(0.3), IntegerPmf::poisson(1.4)});
  CHECK(m.seasons() == 2);
  CHECK(m.mean_total() == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(m.total().mean() == doctest::Approx(m.mean_total()).epsilon(1e-9));

  const auto single = build_model({IntegerPmf::point_mass(1)});
  CHECK(single.seasons() == 1);
  CHECK(single.total().is_point_mass());
  CHECK(single.total().min_support() == 1);

  // ten seasons, lambda_k = k / (k + 1); the mean is 11 - H_11
  std::vector<IntegerPmf> ten;
  for (int k = 1; k <= 10; ++k) {
    ten.push_back(IntegerPmf::poisson(static_cast<double>(k) / (k + 1)));
  }
  const auto big = build_model(std::move(ten));
  CHECK(big.mean_total() == doctest::Approx(7.980122655122278).epsilon(1e-12));

  CHECK_THROWS_AS(build_model({}), dtrm::InvalidModel);
  CHECK_THROWS_AS(build_model(std::vector<IntegerPmf>(17, IntegerPmf::point_mass(0))),
                  dtrm::InvalidModel);
}

TEST_CASE("classification covers the trichotomy") {
  const auto net = classify(build_model({IntegerPmf::poisson(0.3), IntegerPmf::poisson(1.4)}));
  CHECK(net.tag == Criticality::kNetProfit);

  const auto super = classify(build_model({IntegerPmf::point_mass(2), IntegerPmf::point_mass(2)}));
  CHECK(super.tag == Criticality::kSupercritical);

  // E S_1 = 1 with randomness: certain ruin but non-degenerate
  const auto crit = classify(build_model({IntegerPmf::from_weights({0.5, 0.0, 0.5})}));
  CHECK(crit.tag == Criticality::kCriticalNondegenerate);

  // deterministic critical walk: t - sum Z_t is 1 at t = 1 and 0 at t = 2
  const auto degen = classify(build_model({IntegerPmf::point_mass(0), IntegerPmf::point_mass(2)}));
  CHECK(degen.tag == Criticality::kCriticalDegenerate);
  CHECK(degen.t_star == 2);
  CHECK(degen.min_drift == 0);

  const auto degen2 = classify(build_model({IntegerPmf::point_mass(2), IntegerPmf::point_mass(0)}));
  CHECK(degen2.tag == Criticality::kCriticalDegenerate);
  CHECK(degen2.t_star == 1);
  CHECK(degen2.min_drift == -1);
}

TEST_CASE("degenerate survival is a unit step") {
  const auto cls20 = classify(build_model({IntegerPmf::point_mass(2), IntegerPmf::point_mass(0)}));
  CHECK(dtrm::degenerate_survival(cls20, 0) == 0);
  CHECK(dtrm::degenerate_survival(cls20, 1) == 0);
  CHECK(dtrm::degenerate_survival(cls20, 2) == 1);

  const auto cls02 = classify(build_model({IntegerPmf::point_mass(0), IntegerPmf::point_mass(2)}));
  CHECK(dtrm::degenerate_survival(cls02, 0) == 0);
  CHECK(dtrm::degenerate_survival(cls02, 1) == 1);

  const auto ones =
      classify(build_model({IntegerPmf::point_mass(1), IntegerPmf::point_mass(1)}));
  CHECK(ones.tag == Criticality::kCriticalDegenerate);
  for (int u = 1; u <= 5; ++u) CHECK(dtrm::degenerate_survival(ones, u) == 1);

  const auto net = classify(build_model({IntegerPmf::poisson(0.3)}));
  CHECK_THROWS_AS(dtrm::degenerate_survival(net, 1), dtrm::InvalidArgument);
}

TEST_CASE("degenerate survival is monotone and saturates by u = N") {
  dtest::Rng rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = rng.uniform_int(1, 6);
    // random deterministic claims summing to n
    std::vector<int> atoms(static_cast<std::size_t>(n), 0);
    int left = n;
    for (int i = 0; i < n && left > 0; ++i) {
      const int a = rng.uniform_int(0, left);
      atoms[static_cast<std::size_t>(i)] = a;
      left -= a;
    }
    atoms[static_cast<std::size_t>(n - 1)] += left;
    std::vector<IntegerPmf> claims;
    for (int a : atoms) claims.push_back(IntegerPmf::point_mass(a));
    const auto cls = classify(build_model(std::move(claims)));
    REQUIRE(cls.tag == Criticality::kCriticalDegenerate);
    int prev = 0;
    for (int u = 0; u <= n; ++u) {
      const int s = dtrm::degenerate_survival(cls, u);
      CHECK(s >= prev);
      prev = s;
    }
    CHECK(dtrm::degenerate_survival(cls, n) == 1);
  }
}

TEST_SUITE_END();
