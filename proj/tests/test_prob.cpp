#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "focksep/prob.hpp"
#include "focksep/rng.hpp"
#include "oracles.hpp"

using namespace focksep;

TEST_CASE("poisson binomial basics") {
  const std::vector<double> fair{0.5, 0.5};
  const PMF p = poisson_binomial_pmf(fair);
  REQUIRE(p.probs.size() == 3);
  CHECK(p.probs[0] == doctest::Approx(0.25));
  CHECK(p.probs[1] == doctest::Approx(0.5));
  CHECK(p.probs[2] == doctest::Approx(0.25));

  const std::vector<double> mixed{0.1, 0.2, 0.3};
  const PMF q = poisson_binomial_pmf(mixed);
  CHECK(q.probs[0] == doctest::Approx(0.504).epsilon(1e-12));
  CHECK(q.probs[1] == doctest::Approx(0.398).epsilon(1e-12));
  CHECK(q.probs[2] == doctest::Approx(0.092).epsilon(1e-12));
  CHECK(q.probs[3] == doctest::Approx(0.006).epsilon(1e-12));

  const PMF empty = poisson_binomial_pmf(std::vector<double>{});
  REQUIRE(empty.probs.size() == 1);
  CHECK(empty.probs[0] == 1.0);

  CHECK_THROWS_AS(poisson_binomial_pmf(std::vector<double>{1.2}), InvalidParameter);
  CHECK_THROWS_AS(poisson_binomial_pmf(std::vector<double>{-0.1}), InvalidParameter);
}

TEST_CASE("dp equals exhaustive enumeration") {
  for (int c = 0; c < 120; ++c) {
    rng::Stream s = rng::substream(99, rng::kTagGeneric, 1, c);
    const int len = static_cast<int>(s.next_unit() * 15.0);
    std::vector<double> p(len);
    for (double& pi : p) pi = s.next_unit();
    const PMF dp = poisson_binomial_pmf(p);
    const auto brute = oracles::brute_pb(p);
    REQUIRE(dp.probs.size() == brute.size() - std::count(p.begin(), p.end(), 0.0));
    for (std::size_t m = 0; m < dp.probs.size(); ++m)
      CHECK(std::abs(dp.probs[m] - brute[m]) <= 1e-12);
    dp.require_complete(1e-12);
  }
}

TEST_CASE("poisson pmf") {
  const auto zero = poisson_pmf(0.0, 10);
  REQUIRE(zero.pmf.probs.size() == 1);
  CHECK(zero.pmf.probs[0] == 1.0);

  const auto two = poisson_pmf(2.0, 30);
  CHECK(two.pmf.probs[2] == doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-13));

  const auto one = poisson_pmf(1.0, 20);
  CHECK(one.remainder < 1e-18);
  CHECK(one.remainder >= 0.0);
}

TEST_CASE("tv distance and lecam bound") {
  const PMF a{{1.0}};
  const PMF b{{0.0, 1.0}};
  CHECK(tv_distance(a, a) == 0.0);
  CHECK(tv_distance(a, b) == doctest::Approx(2.0));

  std::vector<double> tenth(10, 0.1);
  CHECK(lecam_bound(tenth) == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(lecam_bound(std::vector<double>{}) == 0.0);
  CHECK(lecam_bound(std::vector<double>{1.0}) == doctest::Approx(2.0));

  // PB(0.1 x10) vs Poisson(1): below the bound and strictly positive
  const PMF pb = poisson_binomial_pmf(tenth);
  const auto pois = poisson_pmf(1.0, 60);
  const double l1 = tv_distance(pb, pois.pmf) + pois.remainder;
  CHECK(l1 > 0.0);
  CHECK(l1 <= 0.2);
}

TEST_CASE("lecam holds on random sequences") {
  for (int c = 0; c < 80; ++c) {
    rng::Stream s = rng::substream(7, rng::kTagGeneric, 2, c);
    const int len = 1 + static_cast<int>(s.next_unit() * 200.0);
    std::vector<double> p(len);
    double mu = 0.0;
    for (double& pi : p) {
      pi = s.next_unit() * 0.3;
      mu += pi;
    }
    const PMF pb = poisson_binomial_pmf(p);
    const auto pois = poisson_pmf(mu, static_cast<int>(pb.probs.size()) + 64);
    CHECK(tv_distance(pb, pois.pmf) + pois.remainder < lecam_bound(p));
  }
}

TEST_CASE("chernoff bound formulas") {
  CHECK(chernoff_bound(10.0, 1.0, TailKind::UpperTail) ==
        doctest::Approx(std::exp(-10.0 / 3.0)).epsilon(1e-14));
  CHECK(chernoff_bound(10.0, 0.5, TailKind::LowerTail) ==
        doctest::Approx(std::exp(-1.25)).epsilon(1e-14));
  CHECK(chernoff_bound(12.0, 0.5, TailKind::TwoSided) ==
        doctest::Approx(2.0 * std::exp(-1.0)).epsilon(1e-14));
  CHECK_THROWS_AS(chernoff_bound(10.0, 1.5, TailKind::LowerTail), InvalidParameter);
  CHECK_THROWS_AS(chernoff_bound(10.0, -0.5, TailKind::UpperTail), InvalidParameter);
  CHECK(chernoff_bound(0.01, 4.0, TailKind::UpperTail) <= 1.0);
}

TEST_CASE("chernoff bounds dominate exact tails") {
  for (int c = 0; c < 60; ++c) {
    rng::Stream s = rng::substream(11, rng::kTagGeneric, 3, c);
    const int len = 1 + static_cast<int>(s.next_unit() * 100.0);
    std::vector<double> p(len);
    double mu = 0.0;
    for (double& pi : p) {
      pi = s.next_unit();
      mu += pi;
    }
    if (mu <= 0.0) continue;
    const PMF pmf = poisson_binomial_pmf(p);
    for (double d : {0.1, 0.5, 1.0, 3.0})
      CHECK(pmf.tail_ge((1.0 + d) * mu) <=
            chernoff_bound(mu, d, TailKind::UpperTail) + 1e-15);
    for (double d : {0.1, 0.5, 0.9}) {
      CHECK(pmf.head_le((1.0 - d) * mu) <=
            chernoff_bound(mu, d, TailKind::LowerTail) + 1e-15);
      CHECK(pmf.tail_ge((1.0 + d) * mu) + pmf.head_le((1.0 - d) * mu) <=
            chernoff_bound(mu, d, TailKind::TwoSided) + 1e-15);
    }
  }
}

TEST_CASE("uncrowded road probability") {
  CHECK(uncrowded_road_prob(2, 1.0, 0.5) == 0.0);
  CHECK(uncrowded_road_prob(5, 1.0, 0.05) == doctest::Approx(0.31640625).epsilon(1e-14));
  CHECK(uncrowded_road_prob(1, 1.0, 0.9) == 1.0);

  // nonincreasing in m and in d
  double prev = 1.0;
  for (int m = 1; m <= 12; ++m) {
    const double v = uncrowded_road_prob(m, 1.0, 0.03);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
  prev = 1.0;
  for (double d : {0.01, 0.02, 0.05, 0.1, 0.15, 0.2}) {
    const double v = uncrowded_road_prob(4, 1.0, d);
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
}

TEST_CASE("uncrowded road agrees with direct simulation") {
  const long long trials = 200000;
  const double d = 0.05;
  long long hits = 0;
  for (long long t = 0; t < trials; ++t) {
    rng::Stream s = rng::substream(5, rng::kTagGeneric, 4, t);
    double u[5];
    for (double& x : u) x = s.next_unit();
    std::sort(u, u + 5);
    bool ok = 1.0 - (u[4] - u[0]) >= d;
    for (int i = 0; ok && i < 4; ++i) ok = u[i + 1] - u[i] >= d;
    hits += ok ? 1 : 0;
  }
  const double emp = static_cast<double>(hits) / trials;
  const double expected = 0.31640625;
  const double sigma = std::sqrt(expected * (1 - expected) / trials);
  CHECK(std::abs(emp - expected) < 3.0 * sigma);
}

TEST_CASE("product complement bound with constant 2 at small mass") {
  // sup_k [(1-p_k) - prod_{j != k} (1-p_j)] <= 2 sum p_j whenever sum p <= 1/2
  for (int c = 0; c < 200; ++c) {
    rng::Stream s = rng::substream(13, rng::kTagGeneric, 5, c);
    const int len = 1 + static_cast<int>(s.next_unit() * 60.0);
    std::vector<double> p(len);
    double total = 0.0;
    for (double& pi : p) {
      pi = s.next_unit() * (0.5 / len);
      total += pi;
    }
    REQUIRE(total <= 0.5);
    double log_all = 0.0;
    for (double pi : p) log_all += std::log1p(-pi);
    double sup = -1e300;
    for (int k = 0; k < len; ++k) {
      const double rest = std::exp(log_all - std::log1p(-p[k]));
      sup = std::max(sup, (1.0 - p[k]) - rest);
    }
    CHECK(sup <= 2.0 * total + 1e-12);
  }
}

TEST_CASE("pmf tail helpers include boundary atoms") {
  const PMF p = poisson_binomial_pmf(std::vector<double>{0.5, 0.5, 0.5, 0.5});
  CHECK(p.tail_ge(2.0) == doctest::Approx(p.probs[2] + p.probs[3] + p.probs[4]));
  CHECK(p.head_le(2.0) == doctest::Approx(p.probs[0] + p.probs[1] + p.probs[2]));
  CHECK(p.mean() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("all distinct prob") {
  CHECK(all_distinct_prob(0, 5) == 1.0);
  CHECK(all_distinct_prob(1, 5) == 1.0);
  CHECK(all_distinct_prob(2, 4) == doctest::Approx(0.75));
  CHECK(all_distinct_prob(5, 4) == 0.0);
}
