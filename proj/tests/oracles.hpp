#pragma once

// Independent test oracles. Everything here is deliberately computed by a
// different route than the library: finite Poisson sums instead of adaptive
// quadrature, exhaustive enumeration instead of DP, fixed-grid 2-D quadrature
// instead of the chord-angle reduction.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "focksep/weight.hpp"

namespace oracles {

inline constexpr double kPi = 3.14159265358979323846;

// P(Poisson(lam) >= j) via stable direct summation.
inline double poisson_tail_ge(double lam, long long j) {
  if (j <= 0) return 1.0;
  if (lam <= 0.0) return 0.0;
  if (static_cast<double>(j) <= lam) {
    double logp = -lam, head = 0.0;
    for (long long m = 0; m < j; ++m) {
      head += std::exp(logp);
      logp += std::log(lam) - std::log1p(static_cast<double>(m));
    }
    return std::max(0.0, 1.0 - head);
  }
  double logp = j * std::log(lam) - lam - std::lgamma(static_cast<double>(j) + 1.0);
  double term = std::exp(logp), tail = 0.0;
  for (long long m = j;; ++m) {
    tail += term;
    term *= lam / static_cast<double>(m + 1);
    if (term < 1e-25 * std::max(tail, 1e-300) && m > j + 4) break;
    if (m > j + 1000000) break;
  }
  return tail;
}

// P(Gamma(shape k+1, rate 2) <= t), exact for integer shape.
inline double gamma_cdf_rate2(int k, double t) {
  return poisson_tail_ge(2.0 * t, k + 1);
}

// p_k^(n) for the alpha = 2 weight.
inline double pkn_alpha2(int k, int n) {
  const double hi = 2.0 * n * n;
  const double lo = 2.0 * (n - 1.0) * (n - 1.0);
  return poisson_tail_ge(hi, k + 1) - poisson_tail_ge(lo, k + 1);
}

// Exhaustive 2^n Poisson-binomial PMF.
inline std::vector<double> brute_pb(const std::vector<double>& p) {
  const std::size_t n = p.size();
  std::vector<double> pmf(n + 1, 0.0);
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    double prob = 1.0;
    int ones = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask & (std::size_t{1} << i)) {
        prob *= p[i];
        ++ones;
      } else {
        prob *= 1.0 - p[i];
      }
    }
    pmf[ones] += prob;
  }
  return pmf;
}

// Fixed-grid midpoint quadrature of the Laplacian mass over D(center, radius),
// polar about the disk center. High resolution, no adaptivity.
inline double disk_mass_2d(const focksep::RadialWeight& w, double center, double radius,
                           int n_s = 800, int n_theta = 800) {
  const double ds = radius / n_s;
  const double dth = 2.0 * kPi / n_theta;
  double sum = 0.0;
  for (int i = 0; i < n_s; ++i) {
    const double s = (i + 0.5) * ds;
    double ring = 0.0;
    for (int j = 0; j < n_theta; ++j) {
      const double th = (j + 0.5) * dth;
      const double rr = std::sqrt(center * center + s * s + 2.0 * center * s * std::cos(th));
      ring += w.laplacian(std::max(rr, 1e-300));
    }
    sum += ring * s * ds * dth;
  }
  return sum;
}

// least-squares slope of y against x
inline double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline std::vector<double> tabulated_radii_loglin(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i)
    out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return out;
}

}  // namespace oracles
