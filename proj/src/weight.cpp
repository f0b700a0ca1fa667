#include "focksep/weight.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "focksep/pchip.hpp"
#include "focksep/quad.hpp"

namespace focksep {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;
constexpr int kProfileLinearPoints = 100;  // r = 0.01*i up to 1.0
constexpr double kProfileLinearStep = 0.01;
constexpr double kProfileGrowth = 1.02;
constexpr int kProfileMaxPoints = 1200;

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t hash_doubles(const std::vector<double>& v, std::uint64_t h) {
  return v.empty() ? h : fnv1a(v.data(), v.size() * sizeof(double), h);
}

// int_a^b c u^(s+1) du, the mass of one power-law segment.
double segment_mass(double c, double s, double a, double b) {
  if (s == -2.0) return c * std::log(b / a);
  const double e = s + 2.0;
  return c / e * (std::pow(b, e) - std::pow(a, e));
}

}  // namespace

void RhoSolverConfig::validate() const {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw InvalidParameter("rel_tol must be in (0,1)");
  if (!(quad_rel_tol > 0.0 && quad_rel_tol < 1.0))
    throw InvalidParameter("quad_rel_tol must be in (0,1)");
  if (max_iter < 1) throw InvalidParameter("max_iter must be >= 1");
  if (!(radius_cap > 0.0)) throw InvalidParameter("radius_cap must be positive");
}

RadialWeight::RadialWeight() { *this = power(2.0); }

RadialWeight RadialWeight::power(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw InvalidParameter("power weight requires alpha > 0");
  RadialWeight w{Raw{}};
  w.kind_ = WeightKind::Power;
  w.alpha_ = alpha;
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a("pow", 3, h);
  h = fnv1a(&alpha, sizeof alpha, h);
  w.hash_ = h;
  return w;
}

RadialWeight RadialWeight::tabulated(std::vector<double> radii,
                                     std::vector<double> log_laplacian) {
  if (radii.size() != log_laplacian.size() || radii.size() < 2)
    throw InvalidParameter("tabulated weight needs >= 2 matching knots");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!std::isfinite(radii[i]) || radii[i] < 0.0)
      throw InvalidParameter("tabulated radii must be finite and >= 0");
    if (!std::isfinite(log_laplacian[i]))
      throw InvalidParameter("tabulated log_laplacian must be finite");
    if (i > 0 && !(radii[i] > radii[i - 1]))
      throw InvalidParameter("tabulated radii must be strictly increasing");
  }
  RadialWeight w{Raw{}};
  w.kind_ = WeightKind::Tabulated;
  w.radii_ = std::move(radii);
  w.log_lap_ = std::move(log_laplacian);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = fnv1a("tab", 3, h);
  h = hash_doubles(w.radii_, h);
  h = hash_doubles(w.log_lap_, h);
  w.hash_ = h;
  w.finalize_tabulated();

  const double ratio = doubling_probe(w);
  RhoSolverConfig defaults;
  if (!(ratio <= defaults.doubling_bound))
    throw InvalidParameter("tabulated weight failed the doubling probe (ratio " +
                           std::to_string(ratio) + ")");
  return w;
}

void RadialWeight::finalize_tabulated() {
  const std::size_t n = radii_.size();
  slope_.assign(n - 1, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (radii_[i] == 0.0) {
      slope_[i] = 0.0;  // leading zero-radius knot: handled linearly in r
      continue;
    }
    slope_[i] = (log_lap_[i + 1] - log_lap_[i]) / (std::log(radii_[i + 1]) - std::log(radii_[i]));
  }
  head_slope_ = radii_[0] == 0.0 ? 0.0 : slope_[0];
  tail_slope_ = slope_[n - 2];
  if (radii_[0] > 0.0 && !(head_slope_ > -2.0))
    throw InvalidParameter("tabulated weight not integrable at the origin");
  if (!(tail_slope_ >= -2.0))
    throw InvalidParameter("tabulated weight has finite total mass (tail exponent < -2)");

  // mass prefix at knots
  mass_prefix_.assign(n, 0.0);
  if (radii_[0] > 0.0) {
    const double c0 = std::exp(log_lap_[0] - head_slope_ * std::log(radii_[0]));
    mass_prefix_[0] = segment_mass(c0, head_slope_, 0.0, radii_[0]);
  } else {
    mass_prefix_[0] = 0.0;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double seg;
    if (radii_[i] == 0.0) {
      // log-density linear in r on [0, r1]
      const double r1 = radii_[1];
      const double L0 = log_lap_[0], L1 = log_lap_[1];
      seg = quad::integrate_or_throw(
          [&](double u) { return u * std::exp(L0 + (L1 - L0) * u / r1); }, 0.0, r1,
          {.rel_tol = 1e-13, .abs_tol = 0.0, .max_panels = 2000});
    } else {
      const double c = std::exp(log_lap_[i] - slope_[i] * std::log(radii_[i]));
      seg = segment_mass(c, slope_[i], radii_[i], radii_[i + 1]);
    }
    mass_prefix_[i + 1] = mass_prefix_[i] + seg;
  }
}

double RadialWeight::alpha() const {
  if (kind_ != WeightKind::Power) throw InvalidParameter("alpha: not a power weight");
  return alpha_;
}

bool RadialWeight::singular_at_origin() const {
  if (kind_ == WeightKind::Power) return alpha_ < 2.0;
  return radii_[0] > 0.0 && head_slope_ < 0.0;
}

double RadialWeight::laplacian(double r) const {
  if (r < 0.0) throw InvalidParameter("laplacian: r must be >= 0");
  if (kind_ == WeightKind::Power) {
    if (r == 0.0) {
      if (alpha_ < 2.0) throw DomainError("laplacian density singular at r = 0");
      return alpha_ == 2.0 ? 4.0 : 0.0;
    }
    return alpha_ * alpha_ * std::pow(r, alpha_ - 2.0);
  }
  if (r == 0.0) {
    if (radii_[0] == 0.0) return std::exp(log_lap_[0]);
    if (head_slope_ < 0.0) throw DomainError("laplacian density singular at r = 0");
    return head_slope_ == 0.0 ? std::exp(log_lap_[0]) : 0.0;
  }
  return std::exp(log_laplacian(r));
}

double RadialWeight::log_laplacian(double r) const {
  if (!(r > 0.0)) throw InvalidParameter("log_laplacian: r must be > 0");
  if (kind_ == WeightKind::Power)
    return 2.0 * std::log(alpha_) + (alpha_ - 2.0) * std::log(r);

  const std::size_t n = radii_.size();
  if (radii_[0] == 0.0 && r < radii_[1])
    return log_lap_[0] + (log_lap_[1] - log_lap_[0]) * r / radii_[1];
  std::size_t i;
  if (r <= radii_[0])
    i = 0;
  else if (r >= radii_[n - 1])
    i = n - 2;
  else
    i = static_cast<std::size_t>(
            std::upper_bound(radii_.begin(), radii_.end(), r) - radii_.begin()) - 1;
  const double s = slope_[i];
  const double base = radii_[i] > 0.0 ? radii_[i] : radii_[1];
  const double L = radii_[i] > 0.0 ? log_lap_[i] : log_lap_[1];
  return L + s * (std::log(r) - std::log(base));
}

double RadialWeight::cumulative_mass(double r) const {
  if (r < 0.0) throw InvalidParameter("cumulative_mass: r must be >= 0");
  if (r == 0.0) return 0.0;
  if (kind_ == WeightKind::Power) return alpha_ * std::pow(r, alpha_);

  const std::size_t n = radii_.size();
  if (r <= radii_[0]) {
    const double c0 = std::exp(log_lap_[0] - head_slope_ * std::log(radii_[0]));
    return segment_mass(c0, head_slope_, 0.0, r);
  }
  std::size_t i;
  if (r >= radii_[n - 1])
    i = n - 1;
  else
    i = static_cast<std::size_t>(
        std::upper_bound(radii_.begin(), radii_.end(), r) - radii_.begin()) - 1;
  if (i == n - 1) {
    const double c = std::exp(log_lap_[n - 1] - tail_slope_ * std::log(radii_[n - 1]));
    return mass_prefix_[n - 1] + segment_mass(c, tail_slope_, radii_[n - 1], r);
  }
  if (radii_[i] == 0.0) {
    const double r1 = radii_[1];
    const double L0 = log_lap_[0], L1 = log_lap_[1];
    return quad::integrate_or_throw(
        [&](double u) { return u * std::exp(L0 + (L1 - L0) * u / r1); }, 0.0, r,
        {.rel_tol = 1e-13, .abs_tol = 0.0, .max_panels = 2000});
  }
  const double c = std::exp(log_lap_[i] - slope_[i] * std::log(radii_[i]));
  return mass_prefix_[i] + segment_mass(c, slope_[i], radii_[i], r);
}

double RadialWeight::value(double r) const {
  if (r < 0.0) throw InvalidParameter("value: r must be >= 0");
  if (kind_ == WeightKind::Power) return std::pow(r, alpha_);
  return tab_phi(r);
}

// phi from the radial Poisson equation: (r phi')' = r lap, phi(0) = 0, so
// phi(r) = int_0^r M(u)/u du. Head segment has the closed form
// c u^(s+2)/(s+2)^2; beyond that we integrate the smooth M(u)/u adaptively.
// Called through RadialProfile's cumulative table in hot paths.
double RadialWeight::tab_phi(double r) const {
  if (r == 0.0) return 0.0;
  const double r_head = radii_[0] > 0.0 ? radii_[0] : 0.0;
  double phi = 0.0;
  double lo = 0.0;
  if (r_head > 0.0) {
    const double c0 = std::exp(log_lap_[0] - head_slope_ * std::log(r_head));
    const double e = head_slope_ + 2.0;
    const double stop = std::min(r, r_head);
    phi += c0 * std::pow(stop, e) / (e * e);
    lo = stop;
  }
  if (r > lo) {
    phi += quad::integrate_or_throw(
        [this](double u) { return cumulative_mass(u) / u; }, lo, r,
        {.rel_tol = 1e-12, .abs_tol = 0.0, .max_panels = 4000});
  }
  return phi;
}

RadialWeight RadialWeight::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw InvalidParameter("weight spec must be an object with a \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "power") return power(j.at("alpha").get<double>());
  if (kind == "tabulated")
    return tabulated(j.at("radii").get<std::vector<double>>(),
                     j.at("log_laplacian").get<std::vector<double>>());
  throw InvalidParameter("unknown weight kind: " + kind);
}

nlohmann::json RadialWeight::to_json() const {
  nlohmann::json j;
  if (kind_ == WeightKind::Power) {
    j["kind"] = "power";
    j["alpha"] = alpha_;
  } else {
    j["kind"] = "tabulated";
    j["radii"] = radii_;
    j["log_laplacian"] = log_lap_;
  }
  return j;
}

double laplacian_density(const RadialWeight& w, double r) { return w.laplacian(r); }

double disk_mass(const RadialWeight& w, double center, double radius,
                 const RhoSolverConfig& cfg) {
  if (!(radius > 0.0)) throw InvalidParameter("disk_mass: radius must be > 0");
  if (center < 0.0) throw InvalidParameter("disk_mass: center must be >= 0");
  const double x = center, r = radius;
  if (x == 0.0) return kTwoPi * w.cumulative_mass(r);

  // Circles of radius u about the origin meet D(x,r) in an arc of angle
  // 2 acos((x^2+u^2-r^2)/(2xu)); below u = r-x the whole circle is inside.
  // The acos argument is evaluated as 1 - (r-d)(r+d)/(2xu) with d = u-x,
  // which stays fully accurate when x >> r.
  double mass = 0.0;
  double lo = std::abs(x - r);
  if (x < r) mass += kTwoPi * w.cumulative_mass(r - x);
  const double hi = x + r;
  auto arc = [&](double u) {
    const double d = u - x;
    const double eps = (r - d) * (r + d) / (2.0 * x * u);  // = 1 - cos(angle)
    if (eps <= 0.0) return 0.0;
    double theta;
    if (eps >= 2.0)
      theta = kPi;
    else if (eps < 0.5)
      theta = 2.0 * std::asin(std::sqrt(0.5 * eps));
    else
      theta = std::acos(1.0 - eps);
    return w.laplacian(u) * u * 2.0 * theta;
  };
  quad::QuadOptions opt;
  opt.rel_tol = cfg.quad_rel_tol;
  opt.abs_tol = mass * cfg.quad_rel_tol;
  opt.max_panels = 20000;
  const double mid[] = {0.5 * (lo + hi)};
  const auto res = quad::integrate(arc, lo, hi, opt, mid);
  if (!res.converged) throw QuadratureFailure("disk_mass quadrature did not converge");
  return mass + res.value;
}

double rho_at(const RadialWeight& w, double center, const RhoSolverConfig& cfg) {
  cfg.validate();
  if (center < 0.0) throw InvalidParameter("rho_at: center must be >= 0");
  RhoSolverConfig mass_cfg = cfg;
  mass_cfg.quad_rel_tol = std::min(cfg.quad_rel_tol, 0.05 * cfg.rel_tol);
  auto mass = [&](double r) { return disk_mass(w, center, r, mass_cfg); };

  // Local-density seed, exact wherever the density is locally constant.
  double r0 = 1.0;
  if (center > 0.0) {
    const double d = w.laplacian(center);
    if (d > 0.0 && std::isfinite(d)) r0 = 1.0 / std::sqrt(kPi * d);
  } else if (!w.singular_at_origin()) {
    const double d = w.laplacian(0.0);
    if (d > 0.0 && std::isfinite(d)) r0 = 1.0 / std::sqrt(kPi * d);
  }
  r0 = std::clamp(r0, 1e-150, cfg.radius_cap);

  double lo = r0, hi = r0;
  double mlo = mass(r0), mhi = mlo;
  int guard = 0;
  while (mhi < 1.0) {
    lo = hi;
    mlo = mhi;
    hi *= 2.0;
    if (hi > cfg.radius_cap)
      throw BracketFailure("rho_at: no unit-mass radius below the radius cap");
    mhi = mass(hi);
    if (++guard > 2000) throw BracketFailure("rho_at: bracket expansion stalled");
  }
  while (mlo > 1.0) {
    hi = lo;
    mhi = mlo;
    lo *= 0.5;
    if (lo < 1e-300) throw BracketFailure("rho_at: mass exceeds 1 at vanishing radius");
    mlo = mass(lo);
    if (++guard > 4000) throw BracketFailure("rho_at: bracket expansion stalled");
  }

  // Guarded secant with bisection fallback; mass is strictly increasing in r.
  double r_best = 0.5 * (lo + hi);
  for (int it = 0; it < cfg.max_iter; ++it) {
    double r_next;
    const double denom = mhi - mlo;
    if (denom > 0.0) {
      r_next = lo + (hi - lo) * (1.0 - mlo) / denom;
      const double margin = 0.1 * (hi - lo);
      if (!(r_next > lo + margin && r_next < hi - margin)) r_next = 0.5 * (lo + hi);
    } else {
      r_next = 0.5 * (lo + hi);
    }
    const double m = mass(r_next);
    r_best = r_next;
    if (std::abs(m - 1.0) <= cfg.rel_tol) return r_next;
    if (m < 1.0) {
      lo = r_next;
      mlo = m;
    } else {
      hi = r_next;
      mhi = m;
    }
    if (hi - lo <= 1e-15 * hi) return 0.5 * (lo + hi);
  }
  return r_best;
}

double doubling_probe(const RadialWeight& w, const RhoSolverConfig& cfg) {
  RhoSolverConfig coarse = cfg;
  coarse.quad_rel_tol = 1e-5;
  const double scale = 1.0;
  const double centers[] = {0.0, 0.5 * scale, 2.0 * scale, 10.0 * scale};
  const double radii[] = {0.05 * scale, 0.5 * scale, 2.0 * scale, 10.0 * scale};
  double worst = 0.0;
  for (double x : centers)
    for (double r : radii) {
      const double m1 = disk_mass(w, x, r, coarse);
      const double m2 = disk_mass(w, x, 2.0 * r, coarse);
      if (m1 > 0.0) worst = std::max(worst, m2 / m1);
    }
  return worst;
}

ClassificationReport classify_critical_sum(const RadialWeight& w, int n_max,
                                           const RhoSolverConfig& cfg) {
  if (n_max < 10) throw InvalidParameter("classify_critical_sum: n_max must be >= 10");
  auto profile = shared_profile(w, cfg);

  ClassificationReport rep;
  rep.n_max = n_max;
  rep.rho_values.reserve(n_max);
  rep.summands.reserve(n_max);
  rep.partial_sums.reserve(n_max);
  double acc = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const double rho = profile->rho(static_cast<double>(n));
    const double s = static_cast<double>(n) / (rho * rho * rho * rho);
    acc += s;
    rep.rho_values.push_back(rho);
    rep.summands.push_back(s);
    rep.partial_sums.push_back(acc);
  }

  // log-log regression of the summand (and of rho) over the upper half
  auto regress = [&](const std::vector<double>& ys) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int n = n_max / 2; n <= n_max; ++n) {
      const double lx = std::log(static_cast<double>(n));
      const double ly = std::log(ys[n - 1]);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++cnt;
    }
    return (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  };
  rep.fitted_tail_exponent = regress(rep.summands);
  const double rho_exponent = regress(rep.rho_values);

  if (w.kind() == WeightKind::Power) {
    rep.analytic = true;
    rep.degenerate = w.alpha() >= 2.0;
    rep.verdict = w.alpha() < 1.0 ? SumVerdict::Convergent : SumVerdict::Divergent;
    return rep;
  }
  rep.degenerate = rho_exponent <= 0.02;
  if (rep.degenerate) {
    rep.verdict = SumVerdict::Divergent;
    return rep;
  }
  if (rep.fitted_tail_exponent < -1.0 - rep.undecided_band)
    rep.verdict = SumVerdict::Convergent;
  else if (rep.fitted_tail_exponent > -1.0 + rep.undecided_band)
    rep.verdict = SumVerdict::Divergent;
  else
    rep.verdict = SumVerdict::Undecided;
  return rep;
}

RadialProfile::RadialProfile(const RadialWeight& w, const RhoSolverConfig& cfg)
    : w_(w), cfg_(cfg) {
  rho_vals_.reserve(kProfileMaxPoints);
  if (w_.kind() == WeightKind::Tabulated) phi_vals_.reserve(kProfileMaxPoints);
  ensure(8);
}

double RadialProfile::grid_radius(int i) {
  if (i <= kProfileLinearPoints) return kProfileLinearStep * i;
  return std::pow(kProfileGrowth, i - kProfileLinearPoints);
}

void RadialProfile::ensure(int idx) const {
  if (idx + 2 < count_.load(std::memory_order_acquire)) return;
  std::lock_guard<std::mutex> lock(grow_mutex_);
  int have = count_.load(std::memory_order_relaxed);
  const int want = idx + 3;
  if (want > kProfileMaxPoints)
    throw TruncationFailure("radial profile extent exceeded");
  while (have < want) {
    const double r = grid_radius(have);
    rho_vals_.push_back(rho_at(w_, r, cfg_));
    if (w_.kind() == WeightKind::Tabulated) {
      double prev = have == 0 ? 0.0 : phi_vals_.back();
      if (have > 0) {
        const double a = grid_radius(have - 1);
        prev += quad::integrate_or_throw(
            [this](double u) { return w_.cumulative_mass(u) / u; }, a, r,
            {.rel_tol = 1e-12, .abs_tol = 0.0, .max_panels = 512});
      }
      phi_vals_.push_back(prev);
    }
    ++have;
    count_.store(have, std::memory_order_release);
  }
}

double RadialProfile::interp(const std::vector<double>& vals, double r) const {
  int i;
  if (r <= 1.0)
    i = static_cast<int>(r / kProfileLinearStep);
  else
    i = kProfileLinearPoints + static_cast<int>(std::log(r) / std::log(kProfileGrowth));
  if (i < 0) i = 0;
  ensure(i + 1);
  while (grid_radius(i + 1) < r) ++i;  // guard against log rounding
  while (i > 0 && grid_radius(i) > r) --i;
  ensure(i + 1);

  const double x0 = grid_radius(i), x1 = grid_radius(i + 1);
  const double y0 = vals[i], y1 = vals[i + 1];
  const double h = x1 - x0;
  const double sec = (y1 - y0) / h;
  double d0, d1;
  if (i == 0) {
    // one-sided parabolic endpoint slope with the usual monotone clamp
    const double hp0 = grid_radius(2) - x1;
    const double sp0 = (vals[2] - y1) / hp0;
    d0 = ((2.0 * h + hp0) * sec - h * sp0) / (h + hp0);
    if (d0 * sec <= 0.0)
      d0 = 0.0;
    else if (std::abs(d0) > 3.0 * std::abs(sec))
      d0 = 3.0 * sec;
  } else {
    const double hm = x0 - grid_radius(i - 1);
    const double sm = (y0 - vals[i - 1]) / hm;
    d0 = fc_slope(hm, h, sm, sec);
  }
  const double hp = grid_radius(i + 2) - x1;
  const double sp = (vals[i + 2] - y1) / hp;
  d1 = fc_slope(h, hp, sec, sp);

  const double t = (r - x0) / h;
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + h * (t3 - 2 * t2 + t) * d0 +
         (-2 * t3 + 3 * t2) * y1 + h * (t3 - t2) * d1;
}

double RadialProfile::rho(double r) const {
  if (r < 0.0) throw InvalidParameter("profile rho: r must be >= 0");
  return interp(rho_vals_, r);
}

double RadialProfile::log_rho2(double r) const { return 2.0 * std::log(rho(r)); }

double RadialProfile::phi(double r) const {
  if (r < 0.0) throw InvalidParameter("profile phi: r must be >= 0");
  if (w_.kind() == WeightKind::Power) return std::pow(r, w_.alpha());
  return interp(phi_vals_, r);
}

std::shared_ptr<const RadialProfile> shared_profile(const RadialWeight& w,
                                                    const RhoSolverConfig& cfg) {
  struct Key {
    std::uint64_t hash;
    double rel_tol, quad_rel_tol;
    bool operator<(const Key& o) const {
      return std::tie(hash, rel_tol, quad_rel_tol) <
             std::tie(o.hash, o.rel_tol, o.quad_rel_tol);
    }
  };
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<const RadialProfile>> cache;
  const Key key{w.hash(), cfg.rel_tol, cfg.quad_rel_tol};
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto p = std::make_shared<const RadialProfile>(w, cfg);
  cache.emplace(key, p);
  return p;
}

}  // namespace focksep
