#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <vector>

#include <json.hpp>

#include "focksep/errors.hpp"

namespace focksep {

struct RhoSolverConfig {
  double rel_tol = 1e-9;       // root solve: |mass(rho) - 1| <= rel_tol
  double quad_rel_tol = 1e-8;  // disk-mass quadrature relative tolerance
  int max_iter = 200;
  double radius_cap = 1e9;        // bracket expansion limit
  double doubling_bound = 64.0;   // construction-time probe for tabulated weights

  void validate() const;
  bool operator==(const RhoSolverConfig&) const = default;
};

enum class WeightKind { Power, Tabulated };

// Radial subharmonic weight with doubling Laplacian. Power weights |z|^alpha
// are closed-form throughout; tabulated weights carry log(laplacian) knots,
// interpolated log-log-linearly (piecewise power law), with the cumulative
// mass M(r) = int_0^r u*lap(u) du accumulated segment by segment in closed
// form. phi itself is reconstructed from M via the radial Poisson equation.
class RadialWeight {
 public:
  RadialWeight();  // power weight with alpha = 2
  static RadialWeight power(double alpha);
  static RadialWeight tabulated(std::vector<double> radii, std::vector<double> log_laplacian);
  static RadialWeight from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  WeightKind kind() const { return kind_; }
  double alpha() const;  // Power only

  double value(double r) const;             // phi(r), phi(0) = 0
  double laplacian(double r) const;         // density of the Laplacian measure
  double log_laplacian(double r) const;     // log of the above, r > 0
  double cumulative_mass(double r) const;   // M(r) = int_0^r u lap(u) du
  bool singular_at_origin() const;

  std::uint64_t hash() const { return hash_; }
  bool operator==(const RadialWeight& o) const { return hash_ == o.hash_; }

 private:
  struct Raw {};
  explicit RadialWeight(Raw) {}
  void finalize_tabulated();
  double tab_phi(double r) const;

  WeightKind kind_ = WeightKind::Power;
  double alpha_ = 2.0;

  // tabulated representation
  std::vector<double> radii_, log_lap_;
  std::vector<double> slope_;        // per-segment power-law exponent
  std::vector<double> mass_prefix_;  // M at each knot
  double head_slope_ = 0.0, tail_slope_ = 0.0;

  std::uint64_t hash_ = 0;
};

// Delta phi evaluated at radius r. DomainError when r = 0 and the density is
// singular there.
double laplacian_density(const RadialWeight& w, double r);

// Laplacian measure of the disk D(x, r); for radial weights the mass depends
// only on |center|. Chord-angle reduction to a 1-D radial integral about the
// global origin; relative error <= cfg.quad_rel_tol.
double disk_mass(const RadialWeight& w, double center, double radius,
                 const RhoSolverConfig& cfg = {});

// The radius rho(x) with disk_mass(w, x, rho) = 1.
double rho_at(const RadialWeight& w, double center, const RhoSolverConfig& cfg = {});

// Numeric doubling probe: max over a coarse (center, radius) grid of
// mass(D(x,2r))/mass(D(x,r)).
double doubling_probe(const RadialWeight& w, const RhoSolverConfig& cfg = {});

enum class SumVerdict { Convergent, Divergent, Undecided };

struct ClassificationReport {
  SumVerdict verdict = SumVerdict::Undecided;
  bool degenerate = false;  // liminf rho bounded (Appendix-style regime)
  bool analytic = false;    // verdict known in closed form (power weights)
  double fitted_tail_exponent = 0.0;
  double undecided_band = 0.1;
  int n_max = 0;
  std::vector<double> rho_values;    // rho(n), n = 1..n_max
  std::vector<double> summands;      // n / rho^4(n)
  std::vector<double> partial_sums;  // prefix sums of the above
};

// Convergence classification of sum_n n/rho^4(n). Power weights get the
// analytic verdict (convergent iff alpha < 1); tabulated weights a log-log
// regression of the summand with an Undecided band around exponent -1.
ClassificationReport classify_critical_sum(const RadialWeight& w, int n_max,
                                           const RhoSolverConfig& cfg = {});

// Append-only tabulation of rho (and phi for tabulated weights) on a fixed
// radial grid: linear spacing to r=2 then 2% geometric. Values depend only on
// the grid index, never on growth history, so interpolated results are
// identical across worker counts and call orders. Thread-safe.
class RadialProfile {
 public:
  RadialProfile(const RadialWeight& w, const RhoSolverConfig& cfg);

  double rho(double r) const;
  double log_rho2(double r) const;
  double phi(double r) const;

  const RadialWeight& weight() const { return w_; }
  const RhoSolverConfig& config() const { return cfg_; }

  static double grid_radius(int i);

 private:
  void ensure(int idx) const;
  double interp(const std::vector<double>& vals, double r) const;

  RadialWeight w_;
  RhoSolverConfig cfg_;
  mutable std::vector<double> rho_vals_;
  mutable std::vector<double> phi_vals_;  // tabulated weights only
  mutable std::atomic<int> count_{0};
  mutable std::mutex grow_mutex_;
};

// Process-wide profile cache keyed by (weight hash, solver config).
std::shared_ptr<const RadialProfile> shared_profile(const RadialWeight& w,
                                                    const RhoSolverConfig& cfg = {});

}  // namespace focksep
