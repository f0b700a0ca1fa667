#include "focksep/grid.hpp"

#include <cmath>

#include "focksep/sampler.hpp"

namespace focksep {

namespace {
constexpr double kTwoPi = 2.0 * 3.14159265358979323846;
}

Cell cell_of(double modulus, double angle, const AnnularGrid& g) {
  g.validate();
  if (!(modulus >= 0.0)) throw InvalidParameter("cell_of: modulus must be >= 0");
  if (angle == kTwoPi) angle = 0.0;
  if (!(angle >= 0.0 && angle < kTwoPi))
    throw InvalidParameter("cell_of: angle must lie in [0, 2pi)");
  if (modulus >= g.R_max) throw OutOfRange("cell_of: modulus outside grid coverage");

  const double l = static_cast<double>(g.scale_l);
  const double frac = angle / kTwoPi;  // in [0,1)

  if (!g.shifted) {
    const int n = static_cast<int>(std::floor(modulus * l)) + 1;
    const int cells = g.scale_l * n;
    int k = static_cast<int>(std::floor(frac * cells)) + 1;
    if (k > cells) k = cells;  // angle just below 2pi
    return {n, k};
  }

  // shifted: central disk of radius 1/(2l), annuli [n-1/2, n+1/2)/l
  const double u = modulus * l + 0.5;
  if (u < 1.0) return {0, 1};
  const int n = static_cast<int>(std::floor(u));
  const int cells = g.scale_l * n;
  long long j = static_cast<long long>(std::floor(frac * cells + 0.5)) % cells;
  int k = static_cast<int>(j);
  if (k == 0) k = cells;  // the wrap cell straddling angle 0
  return {n, k};
}

long long CellCounts::max_in_annulus(int n) const {
  long long best = 0;
  for (auto it = occupied.lower_bound({n, 0});
       it != occupied.end() && it->first.n == n; ++it)
    best = std::max(best, it->second);
  return best;
}

CellCounts count_cells(const PointSample& s, const AnnularGrid& g) {
  g.validate();
  if (s.window_R > g.R_max)
    throw OutOfRange("count_cells: sample window exceeds grid coverage");
  CellCounts counts;
  for (const auto& pt : s.points) {
    const Cell c = cell_of(pt.modulus, pt.angle, g);
    if (c.n >= static_cast<int>(counts.annulus_totals.size()))
      counts.annulus_totals.resize(c.n + 1, 0);
    ++counts.annulus_totals[c.n];
    ++counts.occupied[c];
    ++counts.total;
  }
  return counts;
}

std::string to_csv(const CellCounts& counts) {
  std::string out = "n,k,count\n";
  for (const auto& [cell, cnt] : counts.occupied)
    out += std::to_string(cell.n) + "," + std::to_string(cell.k) + "," +
           std::to_string(cnt) + "\n";
  return out;
}

std::string summary_json(const CellCounts& counts) {
  std::string out = "{\n  \"total\": " + std::to_string(counts.total) +
                    ",\n  \"annulus_totals\": [";
  for (std::size_t n = 0; n < counts.annulus_totals.size(); ++n) {
    out += std::to_string(counts.annulus_totals[n]);
    if (n + 1 < counts.annulus_totals.size()) out += ", ";
  }
  out += "],\n  \"max_occupancy\": [";
  for (std::size_t n = 0; n < counts.annulus_totals.size(); ++n) {
    out += std::to_string(counts.max_in_annulus(static_cast<int>(n)));
    if (n + 1 < counts.annulus_totals.size()) out += ", ";
  }
  out += "]\n}\n";
  return out;
}

}  // namespace focksep
