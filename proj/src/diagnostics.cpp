#include "focksep/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "focksep/parallel.hpp"
#include "focksep/prob.hpp"
#include "focksep/radial_law.hpp"
#include "focksep/rng.hpp"

namespace focksep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double median_of(std::vector<double> v) {
  if (v.empty()) return kInf;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void wilson_interval(long long hits, long long trials, double& lo, double& hi) {
  const double z = 1.959963984540054;  // 95%
  const double nn = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  lo = std::max(0.0, center - half);
  hi = std::min(1.0, center + half);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (trials < 1) throw InvalidParameter("ExperimentConfig: trials must be >= 1");
  if (R_list.empty()) throw InvalidParameter("ExperimentConfig: R_list must be nonempty");
  for (std::size_t i = 0; i < R_list.size(); ++i) {
    if (!(R_list[i] > 0.0)) throw InvalidParameter("ExperimentConfig: radii must be > 0");
    if (i > 0 && !(R_list[i] > R_list[i - 1]))
      throw InvalidParameter("ExperimentConfig: R_list must be increasing");
  }
  if (scales.empty()) throw InvalidParameter("ExperimentConfig: scales must be nonempty");
  for (int l : scales)
    if (l < 1) throw InvalidParameter("ExperimentConfig: scales must be >= 1");
  if (!(eps_truncation > 0.0 && eps_truncation < 1.0))
    throw InvalidParameter("ExperimentConfig: eps_truncation must be in (0,1)");
  solver.validate();
}

double min_separation_brute(const PointSample& s) {
  const std::size_t n = s.points.size();
  if (n < 2) throw TooFewPoints("min_separation: need at least two points");
  double best2 = kInf;
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = s.points[i].modulus * std::cos(s.points[i].angle);
    ys[i] = s.points[i].modulus * std::sin(s.points[i].angle);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = xs[i] - xs[j], dy = ys[i] - ys[j];
      best2 = std::min(best2, dx * dx + dy * dy);
    }
  return std::sqrt(best2);
}

double min_separation(const PointSample& s) {
  const std::size_t n = s.points.size();
  if (n < 2) throw TooFewPoints("min_separation: need at least two points");
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = s.points[i].modulus * std::cos(s.points[i].angle);
    ys[i] = s.points[i].modulus * std::sin(s.points[i].angle);
  }
  const double R = std::max(s.window_R, 1e-12);

  double h = std::max(2.0 * R / std::sqrt(static_cast<double>(n)), 1e-12);
  for (int round = 0; round < 64; ++round) {
    // bin points into cells of size h; sorted (cell, index) pairs give a
    // deterministic, allocation-light neighbor lookup
    const long long W = static_cast<long long>(std::floor(2.0 * R / h)) + 3;
    std::vector<std::pair<long long, int>> bins(n);
    for (std::size_t i = 0; i < n; ++i) {
      const long long ix = static_cast<long long>(std::floor((xs[i] + R) / h)) + 1;
      const long long iy = static_cast<long long>(std::floor((ys[i] + R) / h)) + 1;
      bins[i] = {ix * W + iy, static_cast<int>(i)};
    }
    std::sort(bins.begin(), bins.end());

    double best2 = kInf;
#pragma omp parallel for schedule(static) reduction(min : best2) \
    num_threads(par::workers())
    for (std::int64_t bi = 0; bi < static_cast<std::int64_t>(n); ++bi) {
      const int i = bins[bi].second;
      const long long cell = bins[bi].first;
      for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy) {
          const long long key = cell + dx * W + dy;
          auto it = std::lower_bound(bins.begin(), bins.end(),
                                     std::pair<long long, int>{key, -1});
          for (; it != bins.end() && it->first == key; ++it) {
            const int j = it->second;
            if (j <= i) continue;
            const double ddx = xs[i] - xs[j], ddy = ys[i] - ys[j];
            best2 = std::min(best2, ddx * ddx + ddy * ddy);
          }
        }
    }
    const double best = std::sqrt(best2);
    if (best < h) return best;                 // exact: closer pairs share neighbor cells
    if (best2 == kInf) {
      h *= 2.0;                                // no neighbor pairs at all, widen
    } else {
      h = best * (1.0 + 1e-9);                 // rescan with a certified radius
    }
    if (h > 4.0 * R) return best2 == kInf ? min_separation_brute(s) : best;
  }
  return min_separation_brute(s);
}

CollisionReport collision_frequencies(const ExperimentConfig& cfg) {
  cfg.validate();
  const double R = cfg.R_list.back();
  const RadialWeight& w = cfg.weight;

  // warm the law tables before the trial loop so trials are pure lookups
  const int K = truncation_index(w, R, cfg.eps_truncation, cfg.solver);
  auto fam = shared_family(w, cfg.solver);
  fam->prebuild_laws(K > 0 ? K - 1 : 0);

  struct RowKey {
    int scale_l;
    bool shifted;
    int n;
  };
  std::vector<AnnularGrid> grids;
  for (int l : cfg.scales) {
    grids.push_back({l, false, R + 1.0});
    if (cfg.shifted) grids.push_back({l, true, R + 1.0});
  }
  std::vector<RowKey> keys;
  std::vector<std::pair<double, double>> intervals;  // [r_lo, r_hi) per row
  for (const auto& g : grids) {
    if (g.shifted) {
      keys.push_back({g.scale_l, true, 0});
      intervals.emplace_back(0.0, 0.5 / g.scale_l);
      const int n_hi = static_cast<int>(std::floor(R * g.scale_l - 0.5));
      for (int n = 1; n <= n_hi; ++n) {
        keys.push_back({g.scale_l, true, n});
        intervals.emplace_back((n - 0.5) / g.scale_l, (n + 0.5) / g.scale_l);
      }
    } else {
      const int n_hi = static_cast<int>(std::floor(R * g.scale_l));
      for (int n = 1; n <= n_hi; ++n) {
        keys.push_back({g.scale_l, false, n});
        intervals.emplace_back(static_cast<double>(n - 1) / g.scale_l,
                               static_cast<double>(n) / g.scale_l);
      }
    }
  }

  const std::size_t n_rows = keys.size();
  std::vector<std::vector<std::uint8_t>> trial_hits(cfg.trials);
  std::vector<double> trial_minsep(cfg.trials, kInf);

  par::for_index(cfg.trials, [&](std::int64_t t) {
    const std::uint64_t seed = rng::derive_key(cfg.base_seed, rng::kTagTrial,
                                               static_cast<std::uint64_t>(t));
    const PointSample sample = sample_hybrid(w, R, seed, cfg.eps_truncation, cfg.solver);
    std::vector<std::uint8_t> hits(n_rows, 0);
    std::size_t row = 0;
    for (const auto& g : grids) {
      const CellCounts counts = count_cells(sample, g);
      const int n_lo = g.shifted ? 0 : 1;
      const int n_hi = g.shifted ? static_cast<int>(std::floor(R * g.scale_l - 0.5))
                                 : static_cast<int>(std::floor(R * g.scale_l));
      for (int nn = n_lo; nn <= n_hi; ++nn)
        hits[row++] = counts.collision_in_annulus(nn) ? 1 : 0;
    }
    trial_hits[t] = std::move(hits);
    if (sample.points.size() >= 2) trial_minsep[t] = min_separation(sample);
  });

  CollisionReport rep;
  rep.window_R = R;
  rep.trials = cfg.trials;
  rep.min_separations = trial_minsep;
  {
    std::vector<double> finite;
    for (double v : trial_minsep)
      if (std::isfinite(v)) finite.push_back(v);
    rep.min_sep_median = median_of(finite);
  }

  rep.rows.resize(n_rows);
  for (std::size_t rix = 0; rix < n_rows; ++rix) {
    CollisionRow& row = rep.rows[rix];
    row.scale_l = keys[rix].scale_l;
    row.shifted = keys[rix].shifted;
    row.n = keys[rix].n;
    row.cells = (keys[rix].shifted && keys[rix].n == 0) ? 1 : keys[rix].scale_l * keys[rix].n;
    row.trials = cfg.trials;
    long long hits = 0;
    for (int t = 0; t < cfg.trials; ++t) hits += trial_hits[t][rix];
    row.hits = hits;
    row.freq = static_cast<double>(hits) / cfg.trials;
    wilson_interval(hits, cfg.trials, row.ci_lo, row.ci_hi);

    const auto scan = fam->scan_interval(intervals[rix].first, intervals[rix].second,
                                         /*keep_probs=*/true);
    row.mu = scan.mu;
    row.proxy = std::min(1.0, scan.mu * scan.mu / row.cells);
    const PMF pmf = poisson_binomial_pmf(scan.probs);
    double predicted = 0.0;
    for (std::size_t m = 0; m < pmf.probs.size(); ++m)
      predicted += pmf.probs[m] *
                   (1.0 - all_distinct_prob(static_cast<long long>(m), row.cells));
    row.pb_predicted = predicted;
  }

  // partial sums of the collision frequencies over the covered annuli, per grid
  for (const auto& g : grids) {
    GridSummary summary;
    summary.scale_l = g.scale_l;
    summary.shifted = g.shifted;
    for (const auto& row : rep.rows) {
      if (row.scale_l != g.scale_l || row.shifted != g.shifted) continue;
      summary.freq_partial_sum += row.freq;
      summary.proxy_partial_sum += row.proxy;
    }
    rep.grids.push_back(summary);
  }
  return rep;
}

ZeroOneReport zero_one_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.R_list.size() < 2)
    throw InvalidParameter("zero_one_experiment: need at least two radii");
  const RadialWeight& w = cfg.weight;

  ZeroOneReport rep;
  rep.R_list = cfg.R_list;
  const int n_max = std::max(50, static_cast<int>(std::ceil(cfg.R_list.back())) + 10);
  rep.analytic = classify_critical_sum(w, n_max, cfg.solver);

  const int K = truncation_index(w, cfg.R_list.back(), cfg.eps_truncation, cfg.solver);
  auto fam = shared_family(w, cfg.solver);
  fam->prebuild_laws(K > 0 ? K - 1 : 0);

  for (double R : cfg.R_list) {
    std::vector<double> seps(cfg.trials, kInf);
    par::for_index(cfg.trials, [&](std::int64_t t) {
      const std::uint64_t seed = rng::derive_key(cfg.base_seed, rng::kTagTrial,
                                                 static_cast<std::uint64_t>(t));
      const PointSample sample = sample_hybrid(w, R, seed, cfg.eps_truncation, cfg.solver);
      if (sample.points.size() >= 2) seps[t] = min_separation(sample);
    });
    rep.min_seps.push_back(seps);
    std::vector<double> finite;
    for (double v : seps)
      if (std::isfinite(v)) finite.push_back(v);
    rep.medians.push_back(median_of(finite));
  }

  const double first = rep.medians.front(), last = rep.medians.back();
  double lo = kInf, hi = 0.0;
  for (double m : rep.medians) {
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  if (last <= cfg.shrink_factor * first)
    rep.trend = Trend::Shrinking;
  else if (hi <= cfg.stable_band * lo)
    rep.trend = Trend::Stable;
  else
    rep.trend = Trend::Inconclusive;
  return rep;
}

const char* trend_name(Trend t) {
  switch (t) {
    case Trend::Shrinking: return "Shrinking";
    case Trend::Stable: return "Stable";
    default: return "Inconclusive";
  }
}

const char* verdict_name(SumVerdict v) {
  switch (v) {
    case SumVerdict::Convergent: return "Convergent";
    case SumVerdict::Divergent: return "Divergent";
    default: return "Undecided";
  }
}

}  // namespace focksep
