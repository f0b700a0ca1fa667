#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "focksep/radial_law.hpp"
#include "focksep/weight.hpp"

namespace focksep {

enum class ProcessKind { Hybrid, Poisson };

struct SamplePoint {
  double modulus = 0.0;
  double angle = 0.0;  // in [0, 2pi)
  int source_k = -1;   // law index for hybrid points, -1 for Poisson points
};

// Finite-window realization. Reproducible byte for byte from
// (weight, kind, R, seed): every variate comes from a counter-based stream
// keyed by (seed, purpose, index), independent of evaluation order.
struct PointSample {
  std::vector<SamplePoint> points;
  double window_R = 0.0;
  std::uint64_t seed = 0;
  ProcessKind kind = ProcessKind::Hybrid;
  int truncation_K = 0;
};

// Smallest K whose computed geometric majorant of sum_{k>=K} P(|lambda_k|<=R)
// falls below eps; indices k >= K are omitted from sampling.
int truncation_index(const RadialWeight& w, double R, double eps,
                     const RhoSolverConfig& cfg = {}, long long k_cap = 1000000);

// Hybrid process: modulus of index k drawn from its law, kept iff <= R,
// paired with an independent uniform angle.
PointSample sample_hybrid(const RadialWeight& w, double R, std::uint64_t seed,
                          double eps = 1e-9, const RhoSolverConfig& cfg = {});

// Poisson comparison process with intensity scale * dm/rho^2 on D(0,R).
PointSample sample_poisson(const RadialWeight& w, double R, std::uint64_t seed,
                           double intensity_scale = 1.0, const RhoSolverConfig& cfg = {});

// sigma(D(0,R)) = int dm/rho^2, the Poisson mean at scale 1.
double poisson_window_mean(const RadialWeight& w, double R, const RhoSolverConfig& cfg = {});

// Retention probabilities q_k = P(|lambda_k| <= R) for k < K.
std::vector<double> retention_probs(const RadialWeight& w, double R, int K,
                                    const RhoSolverConfig& cfg = {});

std::string to_jsonl(const PointSample& s);
std::string to_csv(const PointSample& s);
std::string to_svg(const PointSample& s);

}  // namespace focksep
