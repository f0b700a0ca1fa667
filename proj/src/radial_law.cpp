#include "focksep/radial_law.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>

#include <json.hpp>

#include "focksep/parallel.hpp"
#include "focksep/quad.hpp"

namespace focksep {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kDropAll = 62.0;   // integration window: mass outside ~ e^-62
constexpr double kDropHint = 30.0;  // support hint: mass outside ~ 1e-13

std::string g_cache_dir;  // optional law cache, set once at startup

}  // namespace

void set_law_cache_dir(const std::string& dir) { g_cache_dir = dir; }

double ModulusLaw::cdf(double t) const {
  if (t <= cdf_t.front()) return 0.0;
  if (t >= cdf_t.back()) return 1.0;
  return std::clamp(interp_.eval(t), 0.0, 1.0);
}

LawFamily::LawFamily(const RadialWeight& w, const RhoSolverConfig& cfg)
    : w_(w), cfg_(cfg), profile_(shared_profile(w, cfg)), cache_dir_(g_cache_dir) {}

double LawFamily::log_density_unnormalized(int k, double t) const {
  if (k < 0) throw InvalidParameter("log density: k must be >= 0");
  if (t < 0.0) throw InvalidParameter("log density: t must be >= 0");
  if (t == 0.0 && k > 0) return kNegInf;
  const double r = std::sqrt(t);
  double g = -2.0 * profile_->phi(r) - profile_->log_rho2(r);
  if (k > 0) g += static_cast<double>(k) * std::log(t);
  return g;
}

// All internal quadrature runs in the radius domain, where the integrand
// r^(2k+1) exp(-2 phi(r)) / rho^2(r) vanishes polynomially at 0 instead of
// carrying the t-domain's infinite edge slope. log of that integrand:
double LawFamily::log_density_r(int k, double r) const {
  if (r <= 0.0) return kNegInf;
  return (2.0 * k + 1.0) * std::log(r) - 2.0 * profile_->phi(r) - profile_->log_rho2(r);
}

double LawFamily::mode_scale(int k) const {
  // stationarity of the r-integrand: (2k+1)/2 = M(r) + O(1)
  const double target = static_cast<double>(k) + 0.5;
  double lo = 1e-9, hi = 1.0;
  int guard = 0;
  while (w_.cumulative_mass(hi) < target && ++guard < 200) {
    lo = hi;
    hi *= 2.0;
  }
  guard = 0;
  while (w_.cumulative_mass(lo) > target && ++guard < 200) {
    hi = lo;
    lo *= 0.5;
  }
  for (int i = 0; i < 60; ++i) {
    const double mid = std::sqrt(lo * hi);
    (w_.cumulative_mass(mid) < target ? lo : hi) = mid;
  }
  const double r = std::sqrt(lo * hi);
  return r * r;
}

LawCore LawFamily::build_core(int k) const {
  LawCore c;
  c.k = k;
  const double r_ref = std::sqrt(mode_scale(k));
  auto g = [&](double r) { return log_density_r(k, r); };

  // coarse dyadic sweep for the argmax, then golden refinement in log r;
  // the cumulative-mass seed r_ref is already within a small factor of the peak
  double best_r = r_ref, best_g = kNegInf;
  for (int j = -10; j <= 8; ++j) {
    const double r = r_ref * std::pow(2.0, j);
    const double gr = g(r);
    if (gr > best_g) {
      best_g = gr;
      best_r = r;
    }
  }
  {
    double la = std::log(best_r) - std::log(2.0);
    double lb = std::log(best_r) + std::log(2.0);
    const double golden = 0.6180339887498949;
    double x1 = lb - golden * (lb - la), x2 = la + golden * (lb - la);
    double f1 = g(std::exp(x1)), f2 = g(std::exp(x2));
    for (int it = 0; it < 90 && lb - la > 1e-12; ++it) {
      if (f1 < f2) {
        la = x1;
        x1 = x2;
        f1 = f2;
        x2 = la + golden * (lb - la);
        f2 = g(std::exp(x2));
      } else {
        lb = x2;
        x2 = x1;
        f2 = f1;
        x1 = lb - golden * (lb - la);
        f1 = g(std::exp(x1));
      }
    }
    c.r_peak = std::exp(0.5 * (la + lb));
    c.g_peak = g(c.r_peak);
    if (best_g > c.g_peak) {
      c.r_peak = best_r;
      c.g_peak = best_g;
    }
  }
  c.t_peak = c.r_peak * c.r_peak;

  // multiplicative marches outward until the log density drops by kDropAll;
  // the left march may stop early on the polynomial mass bound (r/r_peak)^(2k+2)
  double hint_lo_r = c.r_peak, hint_hi_r = c.r_peak;
  double r = c.r_peak;
  int guard = 0;
  while (true) {
    r *= 1.3;
    const double drop = c.g_peak - g(r);
    if (drop < kDropHint) hint_hi_r = r;
    if (drop >= kDropAll) break;
    if (++guard > 4000) throw NormalizationFailure("law support expansion stalled (right)");
  }
  c.r_hi = r;
  r = c.r_peak;
  guard = 0;
  while (true) {
    r /= 1.3;
    const double drop = c.g_peak - g(r);
    if (drop < kDropHint) hint_lo_r = r;
    if (drop >= kDropAll || r < c.r_peak * 1e-13) break;
    if (++guard > 4000) throw NormalizationFailure("law support expansion stalled (left)");
  }
  c.r_lo = r;
  c.t_lo = c.r_lo * c.r_lo;
  c.t_hi = c.r_hi * c.r_hi;
  c.hint_lo = hint_lo_r * hint_lo_r;
  c.hint_hi = hint_hi_r * hint_hi_r;

  const double bps[] = {0.5 * c.r_peak, c.r_peak, 2.0 * c.r_peak, hint_lo_r, hint_hi_r};
  quad::QuadOptions opt;
  opt.rel_tol = 1e-11;
  opt.max_panels = 40000;
  const auto res = quad::integrate(
      [&](double rr) { return std::exp(g(rr) - c.g_peak); }, c.r_lo, c.r_hi, opt, bps);
  if (!res.converged || !(res.value > 0.0) ||
      res.error_est > 1e-9 * res.value)
    throw NormalizationFailure("law normalizer quadrature failed for k=" + std::to_string(k));
  c.z_shifted = res.value;
  // Z in the t convention: int t^k varphi(sqrt t) dt = 2 int r^(2k+1) varphi(r) dr
  c.log_Z = std::log(2.0) + c.g_peak + std::log(res.value);
  return c;
}

const LawCore& LawFamily::core(int k) const {
  if (k < 0) throw InvalidParameter("core: k must be >= 0");
  if (const LawCore* hit = cores_.get(k)) return *hit;
  auto fresh = std::make_unique<LawCore>(build_core(k));
  return *cores_.put(k, std::move(fresh));
}

ModulusLaw LawFamily::build_law(int k) const {
  if (!cache_dir_.empty()) {
    ModulusLaw cached;
    if (load_cached_law(k, cached)) return cached;
  }
  const LawCore& c = core(k);
  auto g = [&](double r) { return std::exp(log_density_r(k, r) - c.g_peak); };
  const double bps[] = {0.5 * c.r_peak, c.r_peak, 2.0 * c.r_peak};
  quad::QuadOptions opt;
  opt.rel_tol = 1e-10;
  opt.max_panels = 40000;
  auto panels = quad::integrate_panels(g, c.r_lo, c.r_hi, opt, 1e-3, bps);

  ModulusLaw law;
  law.k = k;
  law.log_Z = c.log_Z;
  law.support_hint = {c.hint_lo, c.hint_hi};
  double total = 0.0;
  for (const auto& p : panels) total += p.mass;
  if (!(total > 0.0)) throw NormalizationFailure("law CDF tabulation degenerate");

  // breakpoints recorded in the t = r^2 convention; masses are unchanged.
  // Cells whose cumulative value would not strictly increase after rounding
  // are merged into their successor, so F is strictly increasing from
  // exactly 0 to exactly 1.
  law.cdf_t.push_back(panels.front().a * panels.front().a);
  law.cdf_F.push_back(0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < panels.size(); ++i) {
    acc += panels[i].mass;
    const double F = acc / total;
    if (F > law.cdf_F.back() && F < 1.0) {
      law.cdf_t.push_back(panels[i].b * panels[i].b);
      law.cdf_F.push_back(F);
    }
  }
  law.cdf_t.push_back(panels.back().b * panels.back().b);
  law.cdf_F.push_back(1.0);
  law.interp_ = MonotoneCubic(law.cdf_t, law.cdf_F);
  if (!cache_dir_.empty()) store_cached_law(law);
  return law;
}

const ModulusLaw& LawFamily::law(int k) const {
  if (k < 0) throw InvalidParameter("law: k must be >= 0");
  if (const ModulusLaw* hit = laws_.get(k)) return *hit;
  auto fresh = std::make_unique<ModulusLaw>(build_law(k));
  return *laws_.put(k, std::move(fresh));
}

double LawFamily::log_p_interval_t(int k, double a, double b) const {
  const LawCore& c = core(k);
  const double A = std::max(std::sqrt(std::max(a, 0.0)), c.r_lo);
  const double B = std::min(std::sqrt(std::max(b, 0.0)), c.r_hi);
  if (!(B > A)) return kNegInf;
  auto g = [&](double r) { return std::exp(log_density_r(k, r) - c.g_peak); };
  std::vector<double> bps;
  if (c.r_peak > A && c.r_peak < B) bps = {c.r_peak};
  quad::QuadOptions opt;
  opt.rel_tol = 1e-10;
  opt.abs_tol = c.z_shifted * 1e-14;
  opt.max_panels = 20000;
  const auto res = quad::integrate(g, A, B, opt, bps);
  if (!res.converged) throw QuadratureFailure("p_interval quadrature failed");
  if (!(res.value > 0.0)) return kNegInf;
  return std::min(std::log(res.value) - std::log(c.z_shifted), 0.0);
}

double LawFamily::p_interval_t(int k, double a, double b) const {
  const double lp = log_p_interval_t(k, a, b);
  if (lp == kNegInf) return 0.0;
  return std::clamp(std::exp(lp), 0.0, 1.0);
}

void LawFamily::prebuild_cores(int k_max) const {
  par::for_index(k_max + 1, [this](std::int64_t k) { core(static_cast<int>(k)); });
}

void LawFamily::prebuild_laws(int k_max) const {
  par::for_index(k_max + 1, [this](std::int64_t k) { law(static_cast<int>(k)); });
}

LawFamily::IntervalScan LawFamily::scan_interval(double r_lo, double r_hi, bool keep_probs,
                                                 long long k_cap) const {
  if (!(r_hi > r_lo) || r_lo < 0.0)
    throw InvalidParameter("scan_interval: need 0 <= r_lo < r_hi");
  IntervalScan s;
  const double a = r_lo * r_lo, b = r_hi * r_hi;
  const double pass_k = w_.cumulative_mass(r_hi) + 2.0;

  double sum = 0.0, comp = 0.0;
  int consecutive = 0;
  std::vector<std::pair<int, double>> decay;  // recent (k, log p), p > 0
  double tail = 0.0;

  auto majorant = [&]() {
    if (decay.size() < 2) return 0.0;
    const auto [k0, l0] = decay.front();
    const auto [k1, l1] = decay.back();
    if (k1 == k0) return std::exp(l1);
    double ratio = std::exp((l1 - l0) / static_cast<double>(k1 - k0));
    ratio = std::clamp(ratio, 1e-9, 0.999);
    return std::exp(l1) * ratio / (1.0 - ratio);
  };

  int k = 0;
  while (true) {
    if (k > k_cap)
      throw TruncationFailure("scan_interval: k truncation cap exceeded");
    const double lp = log_p_interval_t(k, a, b);
    const double p = lp == kNegInf ? 0.0 : std::exp(lp);
    if (keep_probs) s.probs.push_back(p);
    {
      const double y = p - comp;
      const double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
    }
    if (p > s.sup_p) {
      s.sup_p = p;
      s.argmax_k = k;
    }
    if (std::isfinite(lp)) {
      decay.emplace_back(k, lp);
      if (decay.size() > 9) decay.erase(decay.begin());
    }
    const bool passed = static_cast<double>(k) > pass_k;
    if (passed && p < 1e-12)
      ++consecutive;
    else
      consecutive = 0;
    if (passed && consecutive >= 16) {
      tail = majorant();
      if (tail <= 1e-9 * std::max(1.0, sum)) break;
      // guard: majorant still too large, keep extending the scan
      consecutive = 0;
    }
    ++k;
  }
  s.mu = sum;
  s.k_cut = k;
  s.tail_bound = tail;
  if (keep_probs) s.probs.resize(static_cast<std::size_t>(k) + 1, 0.0);
  return s;
}

bool LawFamily::load_cached_law(int k, ModulusLaw& out) const {
  namespace fs = std::filesystem;
  char name[64];
  std::snprintf(name, sizeof name, "law_%016llx_%d.json",
                static_cast<unsigned long long>(w_.hash()), k);
  const fs::path path = fs::path(cache_dir_) / name;
  std::ifstream in(path);
  if (!in) return false;
  try {
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.at("v").get<int>() != 1 || j.at("k").get<int>() != k) return false;
    out.k = k;
    out.log_Z = j.at("log_Z").get<double>();
    out.cdf_t = j.at("t").get<std::vector<double>>();
    out.cdf_F = j.at("F").get<std::vector<double>>();
    out.support_hint = {j.at("hint")[0].get<double>(), j.at("hint")[1].get<double>()};
    out.interp_ = MonotoneCubic(out.cdf_t, out.cdf_F);
    return true;
  } catch (...) {
    return false;
  }
}

void LawFamily::store_cached_law(const ModulusLaw& law) const {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cache_dir_, ec);
  char name[64];
  std::snprintf(name, sizeof name, "law_%016llx_%d.json",
                static_cast<unsigned long long>(w_.hash()), law.k);
  nlohmann::json j;
  j["v"] = 1;
  j["k"] = law.k;
  j["log_Z"] = law.log_Z;
  j["t"] = law.cdf_t;
  j["F"] = law.cdf_F;
  j["hint"] = {law.support_hint.first, law.support_hint.second};
  std::ofstream outf(fs::path(cache_dir_) / name);
  if (outf) outf << j.dump();
}

std::shared_ptr<LawFamily> shared_family(const RadialWeight& w, const RhoSolverConfig& cfg) {
  struct Key {
    std::uint64_t hash;
    double rel_tol, quad_rel_tol;
    bool operator<(const Key& o) const {
      return std::tie(hash, rel_tol, quad_rel_tol) <
             std::tie(o.hash, o.rel_tol, o.quad_rel_tol);
    }
  };
  static std::mutex mutex;
  static std::map<Key, std::shared_ptr<LawFamily>> cache;
  const Key key{w.hash(), cfg.rel_tol, cfg.quad_rel_tol};
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto fam = std::make_shared<LawFamily>(w, cfg);
  cache.emplace(key, fam);
  return fam;
}

double log_fk_unnormalized(const RadialWeight& w, int k, double t,
                           const RhoSolverConfig& cfg) {
  if (!(t > 0.0)) throw InvalidParameter("log_fk_unnormalized: t must be > 0");
  if (k < 0) throw InvalidParameter("log_fk_unnormalized: k must be >= 0");
  return shared_family(w, cfg)->log_density_unnormalized(k, t);
}

ModulusLaw modulus_law_build(const RadialWeight& w, int k, const RhoSolverConfig& cfg) {
  if (k < 0) throw InvalidParameter("modulus_law_build: k must be >= 0");
  return shared_family(w, cfg)->law(k);
}

double sample_modulus(const ModulusLaw& law, double u) {
  u = std::clamp(u, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
  return std::sqrt(law.inverse_cdf(u));
}

double p_kn(const RadialWeight& w, int k, int n, const RhoSolverConfig& cfg) {
  if (k < 0 || n < 1) throw InvalidParameter("p_kn: need k >= 0, n >= 1");
  const double a = static_cast<double>(n - 1) * static_cast<double>(n - 1);
  const double b = static_cast<double>(n) * static_cast<double>(n);
  return shared_family(w, cfg)->p_interval_t(k, a, b);
}

MuResult mu_n_exact(const RadialWeight& w, int n, const RhoSolverConfig& cfg) {
  if (n < 1) throw InvalidParameter("mu_n_exact: n must be >= 1");
  const auto scan = shared_family(w, cfg)->scan_interval(static_cast<double>(n - 1),
                                                         static_cast<double>(n), false);
  return {scan.mu, scan.k_cut, scan.tail_bound};
}

}  // namespace focksep
