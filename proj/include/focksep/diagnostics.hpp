#pragma once

#include <cstdint>
#include <vector>

#include "focksep/grid.hpp"
#include "focksep/sampler.hpp"
#include "focksep/weight.hpp"

namespace focksep {

struct ExperimentConfig {
  RadialWeight weight;
  std::vector<double> R_list{20.0, 40.0};  // increasing window radii
  int trials = 100;
  std::vector<int> scales{1};
  bool shifted = false;
  std::uint64_t base_seed = 1;
  double eps_truncation = 1e-9;
  RhoSolverConfig solver;

  // pre-registered finite-sample trend thresholds
  double shrink_factor = 0.5;
  double stable_band = 1.5;

  void validate() const;
};

// Exact minimum pairwise distance via cell-list spatial hashing; equals the
// quadratic scan. TooFewPoints below two points.
double min_separation(const PointSample& s);

// O(N^2) reference implementation, kept for tests and the benchmark.
double min_separation_brute(const PointSample& s);

struct CollisionRow {
  int scale_l = 1;
  bool shifted = false;
  int n = 0;           // annulus index at this scale
  int cells = 0;       // angular cells in the annulus
  double mu = 0.0;     // exact expected count in the annulus
  long long hits = 0;  // trials with some cell holding >= 2 points
  int trials = 0;
  double freq = 0.0;
  double ci_lo = 0.0, ci_hi = 0.0;  // Wilson 95%
  double proxy = 0.0;               // min(1, mu^2 / cells)
  double pb_predicted = 0.0;        // sum_m P(N=m) (1 - birthday factor)
};

struct GridSummary {
  int scale_l = 1;
  bool shifted = false;
  double freq_partial_sum = 0.0;  // sum over covered annuli of the collision frequency
  double proxy_partial_sum = 0.0;
};

struct CollisionReport {
  std::vector<CollisionRow> rows;
  std::vector<GridSummary> grids;       // partial collision sums per grid
  std::vector<double> min_separations;  // per trial, trial order
  double min_sep_median = 0.0;
  double window_R = 0.0;
  int trials = 0;
};

// Monte Carlo collision frequencies per (scale, annulus), with the exact
// Poisson-binomial cross-check. One sample per trial is reused across every
// requested grid.
CollisionReport collision_frequencies(const ExperimentConfig& cfg);

enum class Trend { Shrinking, Stable, Inconclusive };

struct ZeroOneReport {
  ClassificationReport analytic;
  Trend trend = Trend::Inconclusive;
  std::vector<double> R_list;
  std::vector<double> medians;                 // median min-separation per R
  std::vector<std::vector<double>> min_seps;   // per R, per trial
};

// Finite-sample surrogate of the separation 0-1 law: analytic classification
// plus the empirical trend of min-separation medians across growing windows.
// Never claims the almost-sure statement, only the pre-registered trend.
ZeroOneReport zero_one_experiment(const ExperimentConfig& cfg);

const char* trend_name(Trend t);
const char* verdict_name(SumVerdict v);

}  // namespace focksep
