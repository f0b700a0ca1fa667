#include "focksep/prob.hpp"

#include <algorithm>
#include <cmath>

namespace focksep {

namespace {

double kahan(std::span<const double> xs) {
  double s = 0.0, c = 0.0;
  for (double x : xs) {
    const double y = x - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

}  // namespace

double PMF::sum() const { return kahan(probs); }

double PMF::tail_ge(double threshold) const {
  // include the boundary atom even under tiny float noise in the threshold
  const long long m0 = static_cast<long long>(std::ceil(threshold - 1e-9));
  double s = 0.0, c = 0.0;
  for (std::size_t m = probs.size(); m-- > 0;) {
    if (static_cast<long long>(m) < m0) break;
    const double y = probs[m] - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

double PMF::head_le(double threshold) const {
  const long long m1 = static_cast<long long>(std::floor(threshold + 1e-9));
  double s = 0.0, c = 0.0;
  for (std::size_t m = 0; m < probs.size(); ++m) {
    if (static_cast<long long>(m) > m1) break;
    const double y = probs[m] - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

double PMF::mean() const {
  double s = 0.0, c = 0.0;
  for (std::size_t m = 0; m < probs.size(); ++m) {
    const double y = static_cast<double>(m) * probs[m] - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

void PMF::require_complete(double tol) const {
  for (double p : probs)
    if (!(p >= 0.0)) throw InvalidParameter("PMF entry negative");
  const double s = sum();
  if (std::abs(s - 1.0) > tol)
    throw InvalidParameter("PMF does not sum to 1 within tolerance");
}

PMF poisson_binomial_pmf(std::span<const double> p) {
  for (double pi : p)
    if (!(pi >= 0.0 && pi <= 1.0))
      throw InvalidParameter("poisson_binomial_pmf: probabilities must lie in [0,1]");

  PMF out;
  out.probs.assign(1, 1.0);
  std::vector<double> comp(1, 0.0);  // per-entry Kahan carry across convolutions
  for (double pi : p) {
    if (pi == 0.0) continue;
    const std::size_t m = out.probs.size();
    out.probs.push_back(0.0);
    comp.push_back(0.0);
    // in-place downward update: q[j] = q[j](1-p) + q[j-1] p
    for (std::size_t j = m; j-- > 0;) {
      const double shifted = out.probs[j] * pi;
      out.probs[j] *= (1.0 - pi);
      const double y = shifted - comp[j + 1];
      const double t = out.probs[j + 1] + y;
      comp[j + 1] = (t - out.probs[j + 1]) - y;
      out.probs[j + 1] = t;
    }
  }
  for (double& q : out.probs) q = std::clamp(q, 0.0, 1.0);
  return out;
}

PoissonPMF poisson_pmf(double mu, int m_max) {
  if (!(mu >= 0.0)) throw InvalidParameter("poisson_pmf: mu must be >= 0");
  if (m_max < 0) throw InvalidParameter("poisson_pmf: m_max must be >= 0");
  PoissonPMF out;
  if (mu == 0.0) {
    out.pmf.probs = {1.0};
    out.remainder = 0.0;
    return out;
  }
  out.pmf.probs.resize(static_cast<std::size_t>(m_max) + 1);
  // stable recurrence in log space to survive large mu
  double logp = -mu;  // log P(0)
  double acc = 0.0, c = 0.0;
  for (int m = 0; m <= m_max; ++m) {
    const double pm = std::exp(logp);
    out.pmf.probs[m] = pm;
    const double y = pm - c;
    const double t = acc + y;
    c = (t - acc) - y;
    acc = t;
    logp += std::log(mu) - std::log1p(static_cast<double>(m));
  }
  out.remainder = std::max(0.0, 1.0 - acc);
  return out;
}

double tv_distance(const PMF& P, const PMF& Q) {
  const std::size_t n = std::max(P.probs.size(), Q.probs.size());
  double s = 0.0, c = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    const double pm = m < P.probs.size() ? P.probs[m] : 0.0;
    const double qm = m < Q.probs.size() ? Q.probs[m] : 0.0;
    const double y = std::abs(pm - qm) - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

double lecam_bound(std::span<const double> p) {
  double s = 0.0, c = 0.0;
  for (double pi : p) {
    if (!(pi >= 0.0 && pi <= 1.0))
      throw InvalidParameter("lecam_bound: probabilities must lie in [0,1]");
    const double y = pi * pi - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return 2.0 * s;
}

double chernoff_bound(double mu, double delta, TailKind kind) {
  if (!(mu > 0.0)) throw InvalidParameter("chernoff_bound: mu must be > 0");
  double b;
  switch (kind) {
    case TailKind::UpperTail:
      if (!(delta > 0.0)) throw InvalidParameter("chernoff_bound: delta must be > 0");
      b = std::exp(-delta * delta * mu / (2.0 + delta));
      break;
    case TailKind::LowerTail:
      if (!(delta > 0.0 && delta < 1.0))
        throw InvalidParameter("chernoff_bound: delta must be in (0,1)");
      b = std::exp(-delta * delta * mu / 2.0);
      break;
    case TailKind::TwoSided:
      if (!(delta > 0.0 && delta < 1.0))
        throw InvalidParameter("chernoff_bound: delta must be in (0,1)");
      b = 2.0 * std::exp(-delta * delta * mu / 3.0);
      break;
    default:
      throw InvalidParameter("chernoff_bound: unknown kind");
  }
  return std::clamp(b, 0.0, 1.0);
}

double uncrowded_road_prob(long long m, double L, double d) {
  if (m < 1) throw InvalidParameter("uncrowded_road_prob: m must be >= 1");
  if (!(L > 0.0) || !(d > 0.0))
    throw InvalidParameter("uncrowded_road_prob: L and d must be > 0");
  const double base = 1.0 - static_cast<double>(m) * d / L;
  if (base <= 0.0) return 0.0;
  if (m == 1) return 1.0;
  return std::pow(base, static_cast<double>(m - 1));
}

double all_distinct_prob(long long m, long long cells) {
  if (m < 0 || cells < 1) throw InvalidParameter("all_distinct_prob: bad arguments");
  if (m > cells) return 0.0;
  double p = 1.0;
  for (long long j = 1; j < m; ++j)
    p *= 1.0 - static_cast<double>(j) / static_cast<double>(cells);
  return p;
}

}  // namespace focksep
