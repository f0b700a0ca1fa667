// Benchmark: OpenMP kernels against their serial reference implementations.
//   - min_separation (cell list, parallel scan) vs min_separation_brute (O(N^2))
//   - Monte Carlo trial loop via par::for_index vs the serial twin
//   - law-family construction, parallel vs serial
// Usage: focksep_bench [--quick]

#include <chrono>
#include <cstdio>
#include <cstring>

#include "focksep/diagnostics.hpp"
#include "focksep/parallel.hpp"
#include "focksep/radial_law.hpp"
#include "focksep/rng.hpp"
#include "focksep/sampler.hpp"
#include "focksep/weight.hpp"

using namespace focksep;

namespace {

double now() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

template <typename F>
double timed(F&& f) {
  const double t0 = now();
  f();
  return now() - t0;
}

}  // namespace

int main(int argc, char** argv) {
  bool quick = false;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--quick") == 0) quick = true;

  const RadialWeight w = RadialWeight::power(2.0);
  std::printf("%-34s %10s %10s %8s\n", "kernel", "serial[s]", "parallel", "speedup");

  {
    const int n = quick ? 4000 : 20000;
    std::vector<SamplePoint> pts;
    rng::Stream s = rng::substream(1, rng::kTagGeneric, 90);
    const double R = 50.0;
    for (int i = 0; i < n; ++i)
      pts.push_back({R * std::sqrt(s.next_unit()),
                     2.0 * 3.14159265358979323846 * s.next_unit(), i});
    PointSample sample;
    sample.points = pts;
    sample.window_R = R;

    double d_brute = 0.0, d_cell = 0.0;
    const double t_brute = timed([&] { d_brute = min_separation_brute(sample); });
    const double t_cell = timed([&] { d_cell = min_separation(sample); });
    char label[64];
    std::snprintf(label, sizeof label, "min_separation (%d points)", n);
    std::printf("%-34s %10.3f %10.3f %7.1fx\n", label, t_brute, t_cell,
                t_brute / t_cell);
    if (d_brute != d_cell) {
      std::printf("MISMATCH: %.17g vs %.17g\n", d_brute, d_cell);
      return 1;
    }
  }

  {
    const int trials = quick ? 100 : 400;
    const double R = 8.0;
    const int K = truncation_index(w, R, 1e-9);
    auto fam = shared_family(w, {});
    fam->prebuild_laws(K - 1);

    auto trial = [&](std::int64_t t) {
      const PointSample s =
          sample_hybrid(w, R, rng::derive_key(17, rng::kTagTrial, t));
      volatile double sink = min_separation(s);
      (void)sink;
    };
    par::set_workers(1);
    const double t_serial = timed([&] { par::for_index_serial(trials, trial); });
    par::set_workers(0);
    const double t_par = timed([&] { par::for_index(trials, trial); });
    std::printf("%-34s %10.3f %10.3f %7.1fx\n", "monte carlo trials (R=8)", t_serial,
                t_par, t_serial / t_par);
  }

  {
    const int k_max = quick ? 200 : 600;
    const RadialWeight w15 = RadialWeight::power(1.5);
    const double t_serial = timed([&] {
      LawFamily fam(w15, {});
      for (int k = 0; k <= k_max; ++k) fam.law(k);
    });
    const double t_par = timed([&] {
      LawFamily fam(w15, {});
      fam.prebuild_laws(k_max);
    });
    std::printf("%-34s %10.3f %10.3f %7.1fx\n", "law family build (alpha=1.5)", t_serial,
                t_par, t_serial / t_par);
  }
  return 0;
}
