#pragma once

#include <memory>
#include <vector>

#include "focksep/radial_law.hpp"
#include "focksep/weight.hpp"

namespace focksep {

// Reproducing-kernel coefficients a_k^2 = (pi Z_k)^{-1} up to k_cap, enough
// for kernel evaluations with both radii <= the r_max the model was built for.
struct KernelModel {
  RadialWeight weight;
  std::vector<double> log_ak2;
  int k_cap = 0;
  double r_max = 0.0;
  std::shared_ptr<const RadialProfile> profile;
};

double log_ak2(const RadialWeight& w, int k, const RhoSolverConfig& cfg = {});

KernelModel build_kernel_model(const RadialWeight& w, double r_max,
                               const RhoSolverConfig& cfg = {});

struct KernelValue {
  double value = 0.0;       // |K(z,zeta)| e^{-phi(|z|)-phi(|zeta|)}
  double tail_bound = 0.0;  // bound on the truncated series remainder, same scale
};

// Weight-normalized kernel magnitude at |z| = r1, |zeta| = r2, angle gap
// dtheta. Term-wise in log space with peak shifting; TailBoundFailure when
// k_cap cannot certify the series tail at these radii.
KernelValue normalized_kernel(const KernelModel& m, double r1, double r2, double dtheta);

struct TraceIdentityReport {
  int n = 0;
  double sum_pk2 = 0.0;       // sum_k (p_k^(n))^2: restriction eigenvalues squared
  double double_integral = 0.0;
  double rel_err = 0.0;
  int k_cut = 0;
};

// Appendix-style trace identity on the annulus I_n: for radial weights the
// restriction operator's eigenfunctions are the monomials, so its eigenvalues
// are exactly the cell probabilities p_k^(n); their squared sum must equal
// the double kernel integral over I_n x I_n.
TraceIdentityReport trace_identity_check(const RadialWeight& w, int n,
                                         const RhoSolverConfig& cfg = {});

struct DecayFit {
  double epsilon = 0.0;  // fitted exponent in exp(-(gap/rho)^epsilon)
  int points = 0;
};

// Diagnostic fit of the off-diagonal decay at radius r; reported, not asserted.
DecayFit kernel_decay_fit(const KernelModel& m, double r);

}  // namespace focksep
