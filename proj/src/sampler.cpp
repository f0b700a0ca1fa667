#include "focksep/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "focksep/pchip.hpp"
#include "focksep/quad.hpp"
#include "focksep/report_io.hpp"
#include "focksep/rng.hpp"

namespace focksep {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// Exact Poisson draw from a unit-uniform stream: product inversion for small
// means, Hormann's PTRS transformed rejection for large ones. Deterministic
// in the stream state.
long long poisson_draw(double lam, rng::Stream& s) {
  if (lam <= 0.0) return 0;
  if (lam < 10.0) {
    const double limit = std::exp(-lam);
    long long k = 0;
    double prod = s.next_unit();
    while (prod > limit) {
      prod *= s.next_unit();
      ++k;
    }
    return k;
  }
  const double b = 0.931 + 2.53 * std::sqrt(lam);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_lam = std::log(lam);
  while (true) {
    const double U = s.next_unit() - 0.5;
    const double V = s.next_unit();
    const double us = 0.5 - std::abs(U);
    const double kf = std::floor((2.0 * a / us + b) * U + lam + 0.43);
    if (us >= 0.07 && V <= v_r) return static_cast<long long>(kf);
    if (kf < 0.0 || (us < 0.013 && V > us)) continue;
    const double k = kf;
    if (std::log(V * inv_alpha / (a / (us * us) + b)) <=
        k * log_lam - lam - std::lgamma(k + 1.0))
      return static_cast<long long>(kf);
  }
}

// Cumulative radial law of the Poisson comparison process on [0, R]:
// G(r) proportional to int_0^r u/rho^2(u) du.
struct RadialCdf {
  MonotoneCubic interp;  // r as function of G in [0,1] is interp.inverse
  double total = 0.0;
};

const RadialCdf& poisson_radial_cdf(const RadialWeight& w, double R,
                                    const RhoSolverConfig& cfg) {
  struct Key {
    std::uint64_t hash;
    double R, rel;
    bool operator<(const Key& o) const {
      return std::tie(hash, R, rel) < std::tie(o.hash, o.R, o.rel);
    }
  };
  static std::mutex mutex;
  static std::map<Key, std::unique_ptr<RadialCdf>> cache;
  const Key key{w.hash(), R, cfg.rel_tol};
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
  }
  auto profile = shared_profile(w, cfg);
  auto f = [&](double r) {
    const double rho = profile->rho(r);
    return r / (rho * rho);
  };
  quad::QuadOptions opt;
  opt.rel_tol = 1e-10;
  opt.max_panels = 20000;
  auto panels = quad::integrate_panels(f, 0.0, R, opt, 1e-3);
  auto cdf = std::make_unique<RadialCdf>();
  std::vector<double> rs{panels.front().a}, gs{0.0};
  double acc = 0.0, total = 0.0;
  for (const auto& p : panels) total += p.mass;
  for (std::size_t i = 0; i < panels.size(); ++i) {
    acc += panels[i].mass;
    const bool last = i + 1 == panels.size();
    double v = last ? 1.0 : acc / total;
    if (v <= gs.back()) v = std::nextafter(gs.back(), 2.0);
    rs.push_back(panels[i].b);
    gs.push_back(std::min(v, 1.0));
  }
  gs.back() = 1.0;
  cdf->interp = MonotoneCubic(std::move(rs), std::move(gs));
  cdf->total = total;
  std::lock_guard<std::mutex> lock(mutex);
  auto [it, inserted] = cache.emplace(key, std::move(cdf));
  return *it->second;
}

}  // namespace

int truncation_index(const RadialWeight& w, double R, double eps,
                     const RhoSolverConfig& cfg, long long k_cap) {
  if (!(R > 0.0)) throw InvalidParameter("truncation_index: R must be > 0");
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidParameter("truncation_index: eps in (0,1)");
  auto fam = shared_family(w, cfg);
  const double b = R * R;
  const double pass_k = w.cumulative_mass(R) + 2.0;

  double q_prev = 1.0;
  for (long long k = 0;; ++k) {
    if (k > k_cap) throw TruncationFailure("truncation_index: cap exceeded");
    const LawCore& c = fam->core(static_cast<int>(k));
    double q;
    if (c.t_hi <= b)
      q = 1.0;
    else if (c.t_lo >= b)
      q = 0.0;
    else
      q = fam->p_interval_t(static_cast<int>(k), 0.0, b);
    if (static_cast<double>(k) > pass_k && q < q_prev && q < 0.25) {
      const double ratio = std::clamp(q / std::max(q_prev, 1e-300), 1e-9, 0.999);
      const double majorant = q / (1.0 - ratio);
      if (majorant < eps) return static_cast<int>(k);
    }
    q_prev = std::max(q, 1e-300);
  }
}

std::vector<double> retention_probs(const RadialWeight& w, double R, int K,
                                    const RhoSolverConfig& cfg) {
  auto fam = shared_family(w, cfg);
  const double b = R * R;
  std::vector<double> q(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const LawCore& c = fam->core(k);
    if (c.t_hi <= b)
      q[k] = 1.0;
    else if (c.t_lo >= b)
      q[k] = 0.0;
    else
      q[k] = fam->p_interval_t(k, 0.0, b);
  }
  return q;
}

PointSample sample_hybrid(const RadialWeight& w, double R, std::uint64_t seed,
                          double eps, const RhoSolverConfig& cfg) {
  if (!(R > 0.0)) throw InvalidParameter("sample_hybrid: R must be > 0");
  const int K = truncation_index(w, R, eps, cfg);
  auto fam = shared_family(w, cfg);

  PointSample out;
  out.window_R = R;
  out.seed = seed;
  out.kind = ProcessKind::Hybrid;
  out.truncation_K = K;
  out.points.reserve(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    rng::Stream stream = rng::substream(seed, rng::kTagHybridPoint, static_cast<std::uint64_t>(k));
    const double u = stream.next_unit();
    const double t = fam->law(k).inverse_cdf(u);
    const double r = std::sqrt(t);
    if (r <= R) {
      const double theta = kTwoPi * stream.next_unit();
      out.points.push_back({r, theta >= kTwoPi ? 0.0 : theta, k});
    }
  }
  return out;
}

double poisson_window_mean(const RadialWeight& w, double R, const RhoSolverConfig& cfg) {
  if (!(R > 0.0)) throw InvalidParameter("poisson_window_mean: R must be > 0");
  auto profile = shared_profile(w, cfg);
  return kTwoPi * quad::integrate_or_throw(
                      [&](double r) {
                        const double rho = profile->rho(r);
                        return r / (rho * rho);
                      },
                      0.0, R, {.rel_tol = 1e-10, .abs_tol = 0.0, .max_panels = 20000});
}

PointSample sample_poisson(const RadialWeight& w, double R, std::uint64_t seed,
                           double intensity_scale, const RhoSolverConfig& cfg) {
  if (!(R > 0.0)) throw InvalidParameter("sample_poisson: R must be > 0");
  if (!(intensity_scale >= 0.0))
    throw InvalidParameter("sample_poisson: intensity_scale must be >= 0");
  PointSample out;
  out.window_R = R;
  out.seed = seed;
  out.kind = ProcessKind::Poisson;
  out.truncation_K = 0;
  if (intensity_scale == 0.0) return out;

  const double lam = intensity_scale * poisson_window_mean(w, R, cfg);
  rng::Stream count_stream = rng::substream(seed, rng::kTagPoissonCount);
  const long long n = poisson_draw(lam, count_stream);
  const RadialCdf& cdf = poisson_radial_cdf(w, R, cfg);
  out.points.reserve(static_cast<std::size_t>(n));
  for (long long i = 0; i < n; ++i) {
    rng::Stream s = rng::substream(seed, rng::kTagPoissonPoint, static_cast<std::uint64_t>(i));
    const double r = cdf.interp.inverse(s.next_unit());
    const double theta = kTwoPi * s.next_unit();
    out.points.push_back({r, theta >= kTwoPi ? 0.0 : theta, -1});
  }
  return out;
}

std::string to_jsonl(const PointSample& s) {
  std::string out;
  for (const auto& p : s.points) {
    out += "{\"modulus\":" + io::fmt17(p.modulus) + ",\"angle\":" + io::fmt17(p.angle) +
           ",\"k\":" + std::to_string(p.source_k) + "}\n";
  }
  return out;
}

std::string to_csv(const PointSample& s) {
  std::string out = "modulus,angle,k\n";
  for (const auto& p : s.points)
    out += io::fmt17(p.modulus) + "," + io::fmt17(p.angle) + "," +
           std::to_string(p.source_k) + "\n";
  return out;
}

std::string to_svg(const PointSample& s) {
  const double size = 640.0, margin = 20.0;
  const double scale = (size / 2.0 - margin) / s.window_R;
  char buf[160];
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"640\" "
         "viewBox=\"0 0 640 640\">\n";
  std::snprintf(buf, sizeof buf,
                "<circle cx=\"320\" cy=\"320\" r=\"%.3f\" fill=\"none\" "
                "stroke=\"#444\" stroke-width=\"1\"/>\n",
                s.window_R * scale);
  out += buf;
  for (const auto& p : s.points) {
    const double x = size / 2.0 + scale * p.modulus * std::cos(p.angle);
    const double y = size / 2.0 - scale * p.modulus * std::sin(p.angle);
    std::snprintf(buf, sizeof buf,
                  "<circle cx=\"%.3f\" cy=\"%.3f\" r=\"1.6\" fill=\"#1060c0\"/>\n", x, y);
    out += buf;
  }
  out += "</svg>\n";
  return out;
}

}  // namespace focksep
