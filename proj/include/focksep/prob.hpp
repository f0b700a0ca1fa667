#pragma once

#include <span>
#include <vector>

#include "focksep/errors.hpp"

namespace focksep {

// Finitely supported PMF on {0,1,...,probs.size()-1}.
struct PMF {
  std::vector<double> probs;

  double sum() const;
  // mass of {m : m >= threshold}
  double tail_ge(double threshold) const;
  // mass of {m : m <= threshold}
  double head_le(double threshold) const;
  double mean() const;
  void require_complete(double tol = 1e-12) const;  // InvalidParameter otherwise
};

// Exact law of a sum of independent Bernoulli(p_i) by iterative convolution.
// Zero entries are skipped, so the support length is (#nonzero entries) + 1.
PMF poisson_binomial_pmf(std::span<const double> p);

struct PoissonPMF {
  PMF pmf;
  double remainder;  // tail mass beyond m_max, reported, never folded in
};
PoissonPMF poisson_pmf(double mu, int m_max);

// Full L1 distance sum_m |P_m - Q_m| with implicit zero padding. This is the
// quantity bounded by lecam_bound, i.e. twice the usual total variation.
double tv_distance(const PMF& P, const PMF& Q);

// 2 * sum p_i^2.
double lecam_bound(std::span<const double> p);

enum class TailKind { UpperTail, LowerTail, TwoSided };

// Bernoulli-sum concentration bounds:
//   UpperTail: P(X >= (1+d)mu) <= exp(-d^2 mu / (2+d)),  d > 0
//   LowerTail: P(X <= (1-d)mu) <= exp(-d^2 mu / 2),      d in (0,1)
//   TwoSided:  P(|X-mu| >= d mu) <= 2 exp(-d^2 mu / 3),  d in (0,1)
double chernoff_bound(double mu, double delta, TailKind kind);

// Probability that m uniform points on a circle of circumference L are
// pairwise at least d apart: max(0, 1 - m d / L)^(m-1).
double uncrowded_road_prob(long long m, double L, double d);

// Probability that m uniform cell assignments over `cells` equal cells are
// all distinct (birthday factor); used as the exact conditional no-collision
// law inside one annulus.
double all_distinct_prob(long long m, long long cells);

}  // namespace focksep
