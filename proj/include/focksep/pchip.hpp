#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "focksep/errors.hpp"

namespace focksep {

// Fritsch-Carlson slope limiter for one interior point: harmonic mean of the
// adjacent secants, zero across local extrema. Produces a C1 interpolant that
// preserves monotonicity of the data.
inline double fc_slope(double h0, double h1, double s0, double s1) {
  if (s0 * s1 <= 0.0) return 0.0;
  const double w0 = 2.0 * h1 + h0;
  const double w1 = h1 + 2.0 * h0;
  return (w0 + w1) / (w0 / s0 + w1 / s1);
}

// Monotone cubic Hermite interpolant on fixed data. Used for CDF tables and
// radial profile lookups; `inverse` requires strictly increasing y-data.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;

  MonotoneCubic(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw InvalidParameter("MonotoneCubic: need >=2 points");
    d_.resize(n);
    std::vector<double> sec(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double h = x_[i + 1] - x_[i];
      if (!(h > 0.0)) throw InvalidParameter("MonotoneCubic: x not increasing");
      sec[i] = (y_[i + 1] - y_[i]) / h;
    }
    auto endpoint = [](double h0, double h1, double s0, double s1) {
      // one-sided parabolic slope, clamped to preserve monotonicity
      double d = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
      if (d * s0 <= 0.0) return 0.0;
      if (std::abs(d) > 3.0 * std::abs(s0)) return 3.0 * s0;
      return d;
    };
    d_[0] = n == 2 ? sec[0]
                   : endpoint(x_[1] - x_[0], x_[2] - x_[1], sec[0], sec[1]);
    d_[n - 1] = n == 2 ? sec[n - 2]
                       : endpoint(x_[n - 1] - x_[n - 2], x_[n - 2] - x_[n - 3],
                                  sec[n - 2], sec[n - 3]);
    for (std::size_t i = 1; i + 1 < n; ++i)
      d_[i] = fc_slope(x_[i] - x_[i - 1], x_[i + 1] - x_[i], sec[i - 1], sec[i]);
  }

  bool empty() const { return x_.empty(); }
  const std::vector<double>& xs() const { return x_; }
  const std::vector<double>& ys() const { return y_; }

  double eval(double x) const {
    const std::size_t i = cell(x);
    return hermite(x, i).first;
  }

  double deriv(double x) const {
    const std::size_t i = cell(x);
    return hermite(x, i).second;
  }

  // Solve eval(t) = y for strictly increasing data; safeguarded Newton.
  double inverse(double y) const {
    if (y <= y_.front()) return x_.front();
    if (y >= y_.back()) return x_.back();
    std::size_t lo = 0, hi = y_.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (y_[mid] <= y ? lo : hi) = mid;
    }
    double a = x_[lo], b = x_[lo + 1];
    double t = a + (b - a) * (y - y_[lo]) / std::max(y_[lo + 1] - y_[lo], 1e-300);
    for (int it = 0; it < 60; ++it) {
      const auto [v, dv] = hermite(t, lo);
      const double err = v - y;
      if (err > 0.0)
        b = t;
      else
        a = t;
      if (std::abs(err) <= 1e-15 * std::max(1.0, std::abs(y))) break;
      double step = dv > 0.0 ? err / dv : 0.0;
      double next = t - step;
      if (!(next > a && next < b)) next = 0.5 * (a + b);
      if (next == t) break;
      t = next;
    }
    return t;
  }

 private:
  std::size_t cell(double x) const {
    if (x <= x_.front()) return 0;
    if (x >= x_.back()) return x_.size() - 2;
    std::size_t lo = 0, hi = x_.size() - 1;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (x_[mid] <= x ? lo : hi) = mid;
    }
    return lo;
  }

  std::pair<double, double> hermite(double x, std::size_t i) const {
    const double h = x_[i + 1] - x_[i];
    const double t = (x - x_[i]) / h;
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    const double v = h00 * y_[i] + h * h10 * d_[i] + h01 * y_[i + 1] + h * h11 * d_[i + 1];
    const double dv = ((6 * t2 - 6 * t) * y_[i] + h * (3 * t2 - 4 * t + 1) * d_[i] +
                       (6 * t - 6 * t2) * y_[i + 1] + h * (3 * t2 - 2 * t) * d_[i + 1]) /
                      h;
    return {v, dv};
  }

  std::vector<double> x_, y_, d_;
};

}  // namespace focksep
