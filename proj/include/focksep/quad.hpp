#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "focksep/errors.hpp"

namespace focksep::quad {

// Gauss(7)/Kronrod(15) pair on [-1,1]; the Gauss nodes are a subset of the
// Kronrod nodes so one panel costs 15 evaluations. All nodes are interior,
// which lets integrable endpoint singularities pass through untouched.
inline constexpr double kKronrodNodes[15] = {
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0,
    0.207784955007898,  0.405845151377397,  0.586087235467691,
    0.741531185599394,  0.864864423359769,  0.949107912342759,
    0.991455371120813};

inline constexpr double kKronrodWeights[15] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728,
    0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979,
    0.022935322010529};

// Gauss-7 weights, aligned with Kronrod node indices 1,3,5,7,9,11,13.
inline constexpr double kGaussWeights[7] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469,
    0.381830050505119, 0.279705391489277, 0.129484966168870};

struct QuadOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;  // absolute floor on the total error budget
  int max_panels = 60000;
};

struct QuadResult {
  double value = 0.0;
  double error_est = 0.0;
  int panels = 0;
  bool converged = false;
};

namespace detail {

struct Panel {
  double a, b, value, error;
};

template <typename F>
inline Panel gk15(F&& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double kron = 0.0, gauss = 0.0;
  for (int i = 0; i < 15; ++i) {
    const double fx = f(c + h * kKronrodNodes[i]);
    kron += kKronrodWeights[i] * fx;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * fx;
  }
  kron *= h;
  gauss *= h;
  const double diff = std::abs(kron - gauss);
  // QUADPACK-style sharpened estimate; never below the raw difference^1.5 law.
  const double err = std::min(diff, 200.0 * diff * std::sqrt(std::max(diff, 1e-300)));
  return {a, b, kron, std::max(err, std::abs(kron) * 1e-16)};
}

inline double kahan_sum(std::vector<Panel>& panels) {
  std::sort(panels.begin(), panels.end(),
            [](const Panel& p, const Panel& q) { return p.a < q.a; });
  double s = 0.0, comp = 0.0;
  for (const Panel& p : panels) {
    const double y = p.value - comp;
    const double t = s + y;
    comp = (t - s) - y;
    s = t;
  }
  return s;
}

}  // namespace detail

// Globally adaptive integration of f over [a,b]. `breakpoints` seeds the
// initial subdivision (kinks, known peaks); panels are then bisected worst
// first until the summed error estimate meets max(rel_tol*|I|, abs_tol).
// Accepted panels are re-summed in interval order with compensation so the
// result does not depend on refinement history.
template <typename F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opt = {},
                     std::span<const double> breakpoints = {}) {
  QuadResult res;
  if (!(b > a)) {
    res.converged = true;
    return res;
  }
  std::vector<double> edges;
  edges.push_back(a);
  for (double x : breakpoints)
    if (x > a && x < b) edges.push_back(x);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());

  std::vector<detail::Panel> panels;
  panels.reserve(64);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    if (edges[i + 1] > edges[i]) panels.push_back(detail::gk15(f, edges[i], edges[i + 1]));

  auto total = [&panels]() {
    double v = 0.0, e = 0.0;
    for (const auto& p : panels) {
      v += p.value;
      e += p.error;
    }
    return std::pair{v, e};
  };

  while (true) {
    auto [v, e] = total();
    const double budget = std::max(opt.abs_tol, opt.rel_tol * std::abs(v));
    if (e <= budget || static_cast<int>(panels.size()) >= opt.max_panels) {
      res.value = detail::kahan_sum(panels);
      res.error_est = e;
      res.panels = static_cast<int>(panels.size());
      res.converged = e <= std::max(opt.abs_tol, opt.rel_tol * std::abs(res.value));
      return res;
    }
    std::size_t worst = 0;
    for (std::size_t i = 1; i < panels.size(); ++i)
      if (panels[i].error > panels[worst].error) worst = i;
    const detail::Panel p = panels[worst];
    const double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b)) {
      // Interval at floating-point resolution; accept as is.
      panels[worst].error = 0.0;
      continue;
    }
    panels[worst] = detail::gk15(f, p.a, mid);
    panels.push_back(detail::gk15(f, mid, p.b));
  }
}

template <typename F>
double integrate_or_throw(F&& f, double a, double b, const QuadOptions& opt = {},
                          std::span<const double> breakpoints = {},
                          const char* what = "quadrature did not converge") {
  const QuadResult r = integrate(std::forward<F>(f), a, b, opt, breakpoints);
  if (!r.converged) throw QuadratureFailure(what);
  return r.value;
}

struct PanelMass {
  double a, b, mass;
};

// Like integrate, but additionally subdivides until no accepted panel holds
// more than `max_panel_fraction` of the total, then returns the panel masses
// in interval order. Feeds CDF tabulation.
template <typename F>
std::vector<PanelMass> integrate_panels(F&& f, double a, double b,
                                        const QuadOptions& opt,
                                        double max_panel_fraction,
                                        std::span<const double> breakpoints = {}) {
  QuadResult r = integrate(f, a, b, opt, breakpoints);
  if (!r.converged) throw QuadratureFailure("integrate_panels: no convergence");
  // Re-run the refinement, keeping panels this time.
  std::vector<detail::Panel> panels;
  std::vector<double> edges;
  edges.push_back(a);
  for (double x : breakpoints)
    if (x > a && x < b) edges.push_back(x);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    if (edges[i + 1] > edges[i]) panels.push_back(detail::gk15(f, edges[i], edges[i + 1]));

  const double cap = std::abs(r.value) * max_panel_fraction;
  bool changed = true;
  while (changed && static_cast<int>(panels.size()) < opt.max_panels) {
    changed = false;
    std::vector<detail::Panel> next;
    next.reserve(panels.size() * 2);
    for (const auto& p : panels) {
      const double budget = std::max(opt.abs_tol, std::abs(r.value) * opt.rel_tol) *
                            (p.b - p.a) / (b - a);
      const double mid = 0.5 * (p.a + p.b);
      if ((p.error > budget || std::abs(p.value) > cap) && mid > p.a && mid < p.b) {
        next.push_back(detail::gk15(f, p.a, mid));
        next.push_back(detail::gk15(f, mid, p.b));
        changed = true;
      } else {
        next.push_back(p);
      }
    }
    panels.swap(next);
  }
  std::sort(panels.begin(), panels.end(),
            [](const detail::Panel& p, const detail::Panel& q) { return p.a < q.a; });
  std::vector<PanelMass> out;
  out.reserve(panels.size());
  for (const auto& p : panels) out.push_back({p.a, p.b, p.value});
  return out;
}

}  // namespace focksep::quad
