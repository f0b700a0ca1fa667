#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "focksep/kernel.hpp"
#include "oracles.hpp"

using namespace focksep;
using oracles::kPi;

TEST_CASE("coefficient logs for alpha 2") {
  const RadialWeight w = RadialWeight::power(2.0);
  // a_k^2 = 2^(k+1) / (4 pi^2 k!); a_0^2 = 1/(2 pi^2), a_1^2 = 1/pi^2
  CHECK(log_ak2(w, 0) == doctest::Approx(std::log(1.0 / (2.0 * kPi * kPi))).epsilon(1e-9));
  CHECK(log_ak2(w, 0) == doctest::Approx(-2.98261).epsilon(1e-5));
  CHECK(log_ak2(w, 1) == doctest::Approx(std::log(1.0 / (kPi * kPi))).epsilon(1e-9));
  CHECK(log_ak2(w, 1) == doctest::Approx(-2.28946).epsilon(1e-5));
  for (int k = 0; k <= 50; ++k)
    CHECK(log_ak2(w, k + 1) - log_ak2(w, k) ==
          doctest::Approx(std::log(2.0 / (k + 1.0))).epsilon(1e-8));
}

TEST_CASE("normalized diagonal is constant for alpha 2") {
  const RadialWeight w = RadialWeight::power(2.0);
  const KernelModel m = build_kernel_model(w, 6.0);
  for (double r : {0.0, 0.5, 2.0, 5.5}) {
    const KernelValue v = normalized_kernel(m, r, r, 0.0);
    CHECK(v.value == doctest::Approx(1.0 / (2.0 * kPi * kPi)).epsilon(1e-9));
    CHECK(v.tail_bound < 1e-12);
  }
}

TEST_CASE("r2 = 0 leaves only the constant term") {
  const RadialWeight w = RadialWeight::power(2.0);
  const KernelModel m = build_kernel_model(w, 4.0);
  for (double r1 : {0.7, 2.0}) {
    const double expected = std::exp(log_ak2(w, 0) - std::pow(r1, 2.0));
    CHECK(normalized_kernel(m, r1, 0.0, 1.0).value == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("off-diagonal decay against a brute-series oracle") {
  const RadialWeight w = RadialWeight::power(2.0);
  const KernelModel m = build_kernel_model(w, 4.0);
  // brute: K(z,zeta) = (1/(2 pi^2)) exp(2 z zbar) for alpha 2
  for (double dt : {0.3, 1.0, kPi}) {
    const std::complex<double> z(2.0, 0.0);
    const std::complex<double> zeta(2.0 * std::cos(dt), 2.0 * std::sin(dt));
    const std::complex<double> prod = z * std::conj(zeta);
    const double brute =
        std::abs(std::exp(2.0 * prod)) / (2.0 * kPi * kPi) * std::exp(-8.0);
    CHECK(normalized_kernel(m, 2.0, 2.0, dt).value == doctest::Approx(brute).epsilon(1e-8));
  }
  CHECK(normalized_kernel(m, 2.0, 2.0, kPi).value <
        normalized_kernel(m, 2.0, 2.0, 0.0).value);
}

TEST_CASE("hermitian symmetry of the magnitude") {
  const RadialWeight w = RadialWeight::power(1.5);
  const KernelModel m = build_kernel_model(w, 5.0);
  for (double dt : {0.2, 1.3, 2.9})
    CHECK(normalized_kernel(m, 1.7, 3.1, dt).value ==
          doctest::Approx(normalized_kernel(m, 3.1, 1.7, -dt).value).epsilon(1e-12));
}

TEST_CASE("diagonal comparability for supported weights") {
  for (double alpha : {0.5, 1.5}) {
    const RadialWeight w = RadialWeight::power(alpha);
    const KernelModel m = build_kernel_model(w, 11.0);
    double lo = 1e300, hi = 0.0;
    for (double r = 0.0; r <= 10.0; r += 0.5) {
      const double v = normalized_kernel(m, r, r, 0.0).value;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    CHECK(hi / lo <= 100.0);
  }
}

TEST_CASE("tail bound failure outside the certified radius") {
  const RadialWeight w = RadialWeight::power(2.0);
  const KernelModel m = build_kernel_model(w, 2.0);
  CHECK_THROWS_AS(normalized_kernel(m, 8.0, 8.0, 0.0), TailBoundFailure);
}

TEST_CASE("trace identity for alpha 2") {
  const RadialWeight w = RadialWeight::power(2.0);
  // oracle: p_k from Poisson tails, squared and summed
  for (int n : {1, 2}) {
    const TraceIdentityReport rep = trace_identity_check(w, n);
    double oracle = 0.0;
    for (long long k = 0; k <= rep.k_cut + 64; ++k) {
      const double pk = oracles::pkn_alpha2(static_cast<int>(k), n);
      oracle += pk * pk;
    }
    CHECK(rep.sum_pk2 == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(rep.rel_err < 1e-3);
    // p^2 <= p termwise, so the squared sum is below mu_n
    CHECK(rep.sum_pk2 <= 4.0 * n - 2.0);
  }
  const TraceIdentityReport rep1 = trace_identity_check(w, 1);
  CHECK(rep1.sum_pk2 == doctest::Approx(1.2285).epsilon(2e-3));
}

TEST_CASE("squared-eigenvalue mass vanishes relative to mu^2") {
  // divergent-critical-sum regime with rho -> infinity: alpha = 1.5
  const RadialWeight w = RadialWeight::power(1.5);
  auto fam = shared_family(w);
  double prev = 1e300;
  for (int n : {5, 10, 20, 40}) {
    const auto scan = fam->scan_interval(n - 1.0, static_cast<double>(n), true);
    double s2 = 0.0;
    for (double p : scan.probs) s2 += p * p;
    const double ratio = s2 / (scan.mu * scan.mu);
    CHECK(ratio < prev);
    prev = ratio;
  }
}

TEST_CASE("decay fit reports a positive exponent") {
  const RadialWeight w = RadialWeight::power(2.0);
  const KernelModel m = build_kernel_model(w, 8.0);
  const DecayFit fit = kernel_decay_fit(m, 4.0);
  CHECK(fit.points >= 4);
  // alpha = 2: |K| e^{-phi-phi} = c exp(-gap^2) along equal radii, so the
  // fitted exponent is 2
  CHECK(fit.epsilon == doctest::Approx(2.0).epsilon(0.05));
}
