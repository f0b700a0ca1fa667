#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "focksep/grid.hpp"
#include "focksep/rng.hpp"
#include "focksep/sampler.hpp"

using namespace focksep;

namespace {
constexpr double kPi = 3.14159265358979323846;

PointSample make_sample(std::vector<SamplePoint> pts, double R) {
  PointSample s;
  s.points = std::move(pts);
  s.window_R = R;
  return s;
}
}  // namespace

TEST_CASE("cell_of unshifted examples") {
  const AnnularGrid g{1, false, 100.0};
  CHECK(cell_of(1.5, kPi, g) == Cell{2, 2});
  CHECK(cell_of(0.0, 0.0, g) == Cell{1, 1});
  CHECK(cell_of(0.999999, 0.0, g) == Cell{1, 1});
  CHECK(cell_of(1.0, 0.0, g) == Cell{2, 1});  // half-open annuli
  CHECK_THROWS_AS(cell_of(100.0, 0.0, g), OutOfRange);
  CHECK_THROWS_AS(cell_of(-1.0, 0.0, g), InvalidParameter);
  CHECK_THROWS_AS(cell_of(1.0, 7.0, g), InvalidParameter);
  // angle of exactly 2 pi wraps to 0
  CHECK(cell_of(0.5, 2.0 * kPi, g) == Cell{1, 1});
}

TEST_CASE("cell_of shifted central disk") {
  const AnnularGrid g{1, true, 100.0};
  CHECK(cell_of(0.3, 1.0, g) == Cell{0, 1});
  CHECK(cell_of(0.49999, 5.0, g) == Cell{0, 1});
  // first shifted annulus [0.5, 1.5) has exactly one cell
  CHECK(cell_of(0.5, 0.1, g).n == 1);
  CHECK(cell_of(1.49, 0.1, g).n == 1);
  CHECK(cell_of(1.5, 0.1, g).n == 2);
  // shifted angular cells straddle the unshifted boundaries: the wrap cell
  // owns angles just below 2 pi and just above 0
  const Cell wrap_lo = cell_of(2.0, 0.01, g);
  const Cell wrap_hi = cell_of(2.0, 2.0 * kPi - 0.01, g);
  CHECK(wrap_lo == wrap_hi);
  CHECK(wrap_lo.k == g.cells_in_annulus(wrap_lo.n));
}

TEST_CASE("scale l grid has l*n cells per annulus") {
  const AnnularGrid g{3, false, 10.0};
  // annulus 2 at scale 3 covers [1/3, 2/3)
  CHECK(cell_of(0.4, 0.0, g).n == 2);
  int max_k = 0;
  for (int j = 0; j < 2000; ++j) {
    const double ang = 2.0 * kPi * j / 2000.0;
    max_k = std::max(max_k, cell_of(0.4, ang, g).k);
  }
  CHECK(max_k == 6);
}

TEST_CASE("count_cells matches a brute-force recount") {
  rng::Stream s = rng::substream(42, rng::kTagGeneric, 10);
  std::vector<SamplePoint> pts;
  const double R = 8.0;
  for (int i = 0; i < 10000; ++i)
    pts.push_back({R * std::sqrt(s.next_unit()), 2.0 * kPi * s.next_unit(), i});
  const PointSample sample = make_sample(pts, R);
  const AnnularGrid g{3, false, R + 0.5};
  const CellCounts counts = count_cells(sample, g);

  std::map<Cell, long long> brute;
  std::map<int, long long> brute_n;
  for (const auto& p : sample.points) {
    const Cell c = cell_of(p.modulus, p.angle, g);
    ++brute[c];
    ++brute_n[c.n];
  }
  CHECK(counts.occupied == brute);
  for (const auto& [n, total] : brute_n) CHECK(counts.N(n) == total);
  CHECK(counts.total == 10000);

  // partition: sum over cells equals annulus totals
  std::map<int, long long> via_cells;
  for (const auto& [cell, cnt] : counts.occupied) via_cells[cell.n] += cnt;
  for (const auto& [n, total] : via_cells) CHECK(counts.N(n) == total);
}

TEST_CASE("identical points land in one cell") {
  const PointSample s = make_sample({{1.2, 0.7, 0}, {1.2, 0.7, 1}, {2.5, 0.1, 2}}, 3.0);
  const AnnularGrid g{1, false, 4.0};
  const CellCounts counts = count_cells(s, g);
  const Cell c = cell_of(1.2, 0.7, g);
  CHECK(counts.X(c.n, c.k) == 2);
  CHECK(counts.max_in_annulus(c.n) == 2);
  CHECK(counts.collision_in_annulus(c.n));
  CHECK_FALSE(counts.collision_in_annulus(3));
}

TEST_CASE("cells within an annulus have equal area (monte carlo)") {
  const AnnularGrid g{2, false, 10.0};
  const int n = 5;  // annulus [2, 2.5), 10 cells
  const double r_lo = (n - 1) / 2.0, r_hi = n / 2.0;
  rng::Stream s = rng::substream(4242, rng::kTagGeneric, 11);
  const int trials = 400000;
  std::vector<long long> hits(g.cells_in_annulus(n), 0);
  for (int t = 0; t < trials; ++t) {
    const double r = std::sqrt(r_lo * r_lo + (r_hi * r_hi - r_lo * r_lo) * s.next_unit());
    const double ang = 2.0 * kPi * s.next_unit();
    const Cell c = cell_of(r, ang, g);
    REQUIRE(c.n == n);
    ++hits[c.k - 1];
  }
  const double expected = static_cast<double>(trials) / g.cells_in_annulus(n);
  // equal cell frequencies: chi-square goodness of fit at the 0.01 level
  double chi2 = 0.0;
  for (long long h : hits) chi2 += (h - expected) * (h - expected) / expected;
  CHECK(chi2 < 21.666);  // 0.99 quantile, 9 dof
  for (long long h : hits) CHECK(std::abs(h - expected) / expected < 0.02);
}

TEST_CASE("annulus counts are consistent across scales") {
  rng::Stream s = rng::substream(77, rng::kTagGeneric, 12);
  std::vector<SamplePoint> pts;
  const double R = 6.0;
  for (int i = 0; i < 5000; ++i)
    pts.push_back({R * std::sqrt(s.next_unit()), 2.0 * kPi * s.next_unit(), i});
  const PointSample sample = make_sample(pts, R);
  const CellCounts c1 = count_cells(sample, {1, false, R + 1.0});
  const CellCounts c2 = count_cells(sample, {2, false, R + 1.0});
  for (int n = 1; n <= 6; ++n)
    CHECK(c1.N(n) == c2.N(2 * n - 1) + c2.N(2 * n));
}

TEST_CASE("window larger than coverage is rejected") {
  const PointSample s = make_sample({{0.5, 0.0, 0}, {1.0, 0.0, 1}}, 5.0);
  CHECK_THROWS_AS(count_cells(s, {1, false, 4.0}), OutOfRange);
}

TEST_CASE("cell count exports") {
  const PointSample s =
      make_sample({{0.5, 0.1, 0}, {0.5, 0.1, 1}, {1.7, 3.0, 2}}, 2.0);
  const CellCounts counts = count_cells(s, {1, false, 3.0});
  const std::string csv = to_csv(counts);
  CHECK(csv.rfind("n,k,count\n", 0) == 0);
  CHECK(csv.find("1,1,2\n") != std::string::npos);
  const std::string summary = summary_json(counts);
  CHECK(summary.find("\"total\": 3") != std::string::npos);
  CHECK(summary.find("\"max_occupancy\"") != std::string::npos);
  // deterministic byte output
  CHECK(to_csv(counts) == csv);
  CHECK(summary_json(counts) == summary);
}
