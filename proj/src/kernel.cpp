#include "focksep/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "focksep/quad.hpp"

namespace focksep {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}  // namespace

double log_ak2(const RadialWeight& w, int k, const RhoSolverConfig& cfg) {
  if (k < 0) throw InvalidParameter("log_ak2: k must be >= 0");
  return -std::log(kPi) - shared_family(w, cfg)->core(k).log_Z;
}

KernelModel build_kernel_model(const RadialWeight& w, double r_max,
                               const RhoSolverConfig& cfg) {
  if (!(r_max > 0.0)) throw InvalidParameter("build_kernel_model: r_max must be > 0");
  auto fam = shared_family(w, cfg);
  KernelModel m;
  m.weight = w;
  m.r_max = r_max;
  m.profile = shared_profile(w, cfg);

  const double x = 2.0 * std::log(r_max);  // log(r_max^2)
  const double pass_k = w.cumulative_mass(r_max) + 2.0;
  double best = kNegInf;
  int k = 0;
  while (true) {
    const double lak2 = -std::log(kPi) - fam->core(k).log_Z;
    m.log_ak2.push_back(lak2);
    const double L = lak2 + k * x;
    best = std::max(best, L);
    if (static_cast<double>(k) > pass_k && L < best - 60.0 && k >= 2) {
      const double Lm1 = m.log_ak2[k - 1] + (k - 1) * x;
      if (L - Lm1 < std::log(0.5)) break;  // geometric tail regime certified
    }
    ++k;
    if (k > 2000000) throw TruncationFailure("kernel model: k_cap search exceeded");
  }
  m.k_cap = k;
  return m;
}

KernelValue normalized_kernel(const KernelModel& m, double r1, double r2, double dtheta) {
  if (r1 < 0.0 || r2 < 0.0) throw InvalidParameter("normalized_kernel: radii must be >= 0");
  const double phi1 = m.profile->phi(r1);
  const double phi2 = m.profile->phi(r2);
  KernelValue out;
  if (r1 == 0.0 || r2 == 0.0) {
    out.value = std::exp(m.log_ak2[0] - phi1 - phi2);
    out.tail_bound = 0.0;
    return out;
  }
  const double x = std::log(r1) + std::log(r2);

  double peak = kNegInf;
  for (int k = 0; k <= m.k_cap; ++k)
    peak = std::max(peak, m.log_ak2[k] + k * x);

  const double c = std::cos(dtheta), s = std::sin(dtheta);
  double re = 0.0, im = 0.0;
  double ck = 1.0, sk = 0.0;  // cos(k dtheta), sin(k dtheta) by rotation
  for (int k = 0; k <= m.k_cap; ++k) {
    const double mag = std::exp(m.log_ak2[k] + k * x - peak);
    re += mag * ck;
    im += mag * sk;
    const double cn = ck * c - sk * s;
    sk = sk * c + ck * s;
    ck = cn;
  }
  // certify the truncated tail
  const double L_last = m.log_ak2[m.k_cap] + m.k_cap * x;
  const double L_prev = m.log_ak2[m.k_cap - 1] + (m.k_cap - 1) * x;
  const double ratio = std::exp(L_last - L_prev);
  if (!(ratio < 0.95) || L_last - peak > -40.0)
    throw TailBoundFailure("normalized_kernel: k_cap insufficient for these radii");
  const double tail_shifted = std::exp(L_last - peak) * ratio / (1.0 - ratio);

  const double mod = std::hypot(re, im);
  out.value = mod > 0.0 ? std::exp(peak - phi1 - phi2 + std::log(mod)) : 0.0;
  out.tail_bound = std::exp(peak - phi1 - phi2) * tail_shifted;
  return out;
}

TraceIdentityReport trace_identity_check(const RadialWeight& w, int n,
                                         const RhoSolverConfig& cfg) {
  if (n < 1) throw InvalidParameter("trace_identity_check: n must be >= 1");
  auto fam = shared_family(w, cfg);
  const auto scan = fam->scan_interval(static_cast<double>(n - 1), static_cast<double>(n),
                                       /*keep_probs=*/true);
  TraceIdentityReport rep;
  rep.n = n;
  rep.k_cut = scan.k_cut;
  double s2 = 0.0, comp = 0.0;
  for (double p : scan.probs) {
    const double y = p * p - comp;
    const double t = s2 + y;
    comp = (t - s2) - y;
    s2 = t;
  }
  rep.sum_pk2 = s2;

  const KernelModel model = build_kernel_model(w, static_cast<double>(n), cfg);
  auto profile = shared_profile(w, cfg);
  const double lo = static_cast<double>(n - 1), hi = static_cast<double>(n);
  const double theta_bps[] = {kPi / 64.0, kPi / 16.0, kPi / 4.0};

  auto theta_integral = [&](double r1, double r2) {
    return 2.0 * quad::integrate_or_throw(
                     [&](double th) {
                       const double v = normalized_kernel(model, r1, r2, th).value;
                       return v * v;
                     },
                     0.0, kPi, {.rel_tol = 1e-7, .abs_tol = 1e-300, .max_panels = 4000},
                     theta_bps);
  };
  auto inner = [&](double r1) {
    return quad::integrate_or_throw(
        [&](double r2) {
          const double rho2 = profile->rho(r2);
          return r2 / (rho2 * rho2) * theta_integral(r1, r2);
        },
        lo, hi, {.rel_tol = 5e-6, .abs_tol = 0.0, .max_panels = 4000});
  };
  rep.double_integral =
      2.0 * kPi *
      quad::integrate_or_throw(
          [&](double r1) {
            const double rho1 = profile->rho(r1);
            return r1 / (rho1 * rho1) * inner(r1);
          },
          lo, hi, {.rel_tol = 2e-5, .abs_tol = 0.0, .max_panels = 2000});

  rep.rel_err = std::abs(rep.double_integral - rep.sum_pk2) / rep.sum_pk2;
  return rep;
}

DecayFit kernel_decay_fit(const KernelModel& m, double r) {
  if (!(r > 0.0)) throw InvalidParameter("kernel_decay_fit: r must be > 0");
  const double rho = m.profile->rho(r);
  const double v0 = normalized_kernel(m, r, r, 0.0).value;
  DecayFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double gaps[] = {0.7, 1.0, 1.4, 2.0, 2.8, 4.0};
  for (double gscale : gaps) {
    const double gap = gscale * rho;
    if (gap >= 1.98 * r) continue;  // chord must exist
    const double dtheta = 2.0 * std::asin(gap / (2.0 * r));
    const double u = normalized_kernel(m, r, r, dtheta).value / v0;
    if (!(u > 0.0 && u < 1.0)) continue;
    const double x = std::log(gap / rho);
    const double y = std::log(-std::log(u));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++fit.points;
  }
  if (fit.points >= 2)
    fit.epsilon = (fit.points * sxy - sx * sy) / (fit.points * sxx - sx * sx);
  return fit;
}

}  // namespace focksep
