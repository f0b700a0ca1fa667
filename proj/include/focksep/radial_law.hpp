#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "focksep/pchip.hpp"
#include "focksep/weight.hpp"

namespace focksep {

// Law of the squared modulus |lambda_k|^2: density proportional to
// t^k exp(-2 phi(sqrt t)) / rho^2(sqrt t). All arithmetic stays in log space
// until the final normalized quantities.
struct ModulusLaw {
  int k = 0;
  double log_Z = 0.0;  // log int_0^inf t^k varphi(sqrt t) dt
  std::vector<double> cdf_t;
  std::vector<double> cdf_F;  // strictly increasing, F front = 0, back = 1
  std::pair<double, double> support_hint{0.0, 0.0};  // all but ~1e-12 of the mass

  double inverse_cdf(double u) const { return interp_.inverse(u); }
  double cdf(double t) const;

  MonotoneCubic interp_;  // F as a monotone cubic in t
};

// Per-index normalization and support summary (no CDF table). Quadrature is
// carried out in the radius domain; t-domain mirrors are kept for callers.
struct LawCore {
  int k = 0;
  double r_peak = 0.0;     // argmax of r^(2k+1) varphi(r)
  double g_peak = 0.0;     // log of the r-domain integrand at the peak
  double r_lo = 0.0, r_hi = 0.0;
  double t_peak = 0.0;
  double t_lo = 0.0, t_hi = 0.0;
  double hint_lo = 0.0, hint_hi = 0.0;  // t convention, ~1e-13 of mass outside
  double z_shifted = 0.0;  // int exp(g_r - g_peak) dr over [r_lo, r_hi]
  double log_Z = 0.0;      // t convention: log int t^k varphi(sqrt t) dt
};

namespace detail {

// Lock-free chunked slot table: readers never block, writers install
// immutable entries once. Duplicate concurrent builds produce identical
// values, so either winner leaves the same observable state.
template <typename T>
class SlotTable {
 public:
  static constexpr int kChunkBits = 10;
  static constexpr int kChunkSize = 1 << kChunkBits;
  static constexpr int kMaxChunks = 1024;

  SlotTable() { for (auto& c : chunks_) c.store(nullptr, std::memory_order_relaxed); }

  ~SlotTable() {
    for (auto& c : chunks_) {
      auto* chunk = c.load(std::memory_order_relaxed);
      if (!chunk) continue;
      for (auto& e : *chunk) delete e.load(std::memory_order_relaxed);
      delete chunk;
    }
  }

  const T* get(int i) const {
    auto* chunk = chunks_[i >> kChunkBits].load(std::memory_order_acquire);
    if (!chunk) return nullptr;
    return (*chunk)[i & (kChunkSize - 1)].load(std::memory_order_acquire);
  }

  const T* put(int i, std::unique_ptr<T> value) {
    auto& slot = chunk_for(i)[i & (kChunkSize - 1)];
    const T* expected = nullptr;
    T* raw = value.release();
    if (slot.compare_exchange_strong(expected, raw, std::memory_order_acq_rel)) return raw;
    delete raw;
    return expected;
  }

 private:
  using Chunk = std::array<std::atomic<const T*>, kChunkSize>;

  Chunk& chunk_for(int i) {
    auto& ref = chunks_[i >> kChunkBits];
    Chunk* chunk = const_cast<Chunk*>(ref.load(std::memory_order_acquire));
    if (chunk) return *chunk;
    auto* fresh = new Chunk();
    for (auto& e : *fresh) e.store(nullptr, std::memory_order_relaxed);
    Chunk* expected = nullptr;
    if (ref.compare_exchange_strong(expected, fresh, std::memory_order_acq_rel))
      return *fresh;
    delete fresh;
    return *expected;
  }

  std::array<std::atomic<Chunk*>, kMaxChunks> chunks_;
};

}  // namespace detail

// All per-weight law machinery: cores, CDF tables, interval probabilities.
// Immutable values; thread-safe lazy construction.
class LawFamily {
 public:
  LawFamily(const RadialWeight& w, const RhoSolverConfig& cfg);

  const RadialWeight& weight() const { return w_; }
  const RadialProfile& profile() const { return *profile_; }

  double log_density_unnormalized(int k, double t) const;  // g_k(t)
  double log_density_r(int k, double r) const;  // log r^(2k+1) varphi(r)
  double mode_scale(int k) const;  // t at the r-integrand peak; increasing in k

  const LawCore& core(int k) const;
  const ModulusLaw& law(int k) const;

  // P(|lambda_k|^2 in [a, b)), shared peak shift between numerator and
  // normalizer; clamped into [0,1].
  double p_interval_t(int k, double a, double b) const;
  double log_p_interval_t(int k, double a, double b) const;  // -inf when empty

  void prebuild_cores(int k_max) const;
  void prebuild_laws(int k_max) const;

  void set_disk_cache(std::string dir) { cache_dir_ = std::move(dir); }

  struct IntervalScan {
    double mu = 0.0;
    int k_cut = 0;
    double tail_bound = 0.0;
    double sup_p = 0.0;
    int argmax_k = 0;
    std::vector<double> probs;  // populated when keep_probs
  };

  // Exact scan of the radial interval [r_lo, r_hi): mu = sum_k p_k, with the
  // truncation rule "16 consecutive summands below 1e-12 past the peak" and a
  // geometric tail majorant; recomputed with a doubled horizon while the
  // majorant exceeds 1e-9.
  IntervalScan scan_interval(double r_lo, double r_hi, bool keep_probs,
                             long long k_cap = 1000000) const;

 private:
  LawCore build_core(int k) const;
  ModulusLaw build_law(int k) const;
  bool load_cached_law(int k, ModulusLaw& out) const;
  void store_cached_law(const ModulusLaw& law) const;

  RadialWeight w_;
  RhoSolverConfig cfg_;
  std::shared_ptr<const RadialProfile> profile_;
  mutable detail::SlotTable<LawCore> cores_;
  mutable detail::SlotTable<ModulusLaw> laws_;
  std::string cache_dir_;
};

std::shared_ptr<LawFamily> shared_family(const RadialWeight& w,
                                         const RhoSolverConfig& cfg = {});

// Optional on-disk JSON cache for CDF tables, keyed by (weight hash, k).
// Applies to families created after the call (the CLI wires FOCKSEP_CACHE_DIR
// here at startup). Cached tables round-trip bit exactly.
void set_law_cache_dir(const std::string& dir);

// --- spec-level operations -------------------------------------------------

double log_fk_unnormalized(const RadialWeight& w, int k, double t,
                           const RhoSolverConfig& cfg = {});

ModulusLaw modulus_law_build(const RadialWeight& w, int k, const RhoSolverConfig& cfg = {});

// Inverse-CDF draw of the modulus r = sqrt(t); deterministic in (law, u).
double sample_modulus(const ModulusLaw& law, double u);

// P(|lambda_k| in [n-1, n)).
double p_kn(const RadialWeight& w, int k, int n, const RhoSolverConfig& cfg = {});

struct MuResult {
  double value = 0.0;
  int k_cut = 0;
  double tail_bound = 0.0;
};

// mu_n = E[N_n] = sum_k p_k^(n), truncated with a reported tail majorant.
MuResult mu_n_exact(const RadialWeight& w, int n, const RhoSolverConfig& cfg = {});

}  // namespace focksep
