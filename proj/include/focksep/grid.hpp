#pragma once

#include <map>
#include <utility>
#include <vector>

#include "focksep/errors.hpp"

namespace focksep {

struct PointSample;  // sampler.hpp

// Annular/angular cell system at scale 1/l. Unshifted: annulus n >= 1 covers
// moduli [(n-1)/l, n/l) and splits into l*n equal angular cells k = 1..l*n.
// Shifted: a central disk of radius 1/(2l) (cell n=0, k=1), annuli
// [(n-1/2)/l, (n+1/2)/l) with cells centred on the unshifted cell corners.
struct AnnularGrid {
  int scale_l = 1;
  bool shifted = false;
  double R_max = 0.0;  // coverage; moduli >= R_max are out of range

  void validate() const {
    if (scale_l < 1) throw InvalidParameter("AnnularGrid: scale_l must be >= 1");
    if (!(R_max > 0.0)) throw InvalidParameter("AnnularGrid: R_max must be > 0");
  }

  int cells_in_annulus(int n) const {
    if (shifted && n == 0) return 1;
    return scale_l * n;
  }
};

struct Cell {
  int n = 0;
  int k = 0;
  bool operator==(const Cell&) const = default;
  bool operator<(const Cell& o) const { return n != o.n ? n < o.n : k < o.k; }
};

// Unique cell containing (modulus, angle). Angles of exactly 2*pi wrap to 0;
// boundaries follow the half-open convention of the annuli.
Cell cell_of(double modulus, double angle, const AnnularGrid& g);

struct CellCounts {
  std::vector<long long> annulus_totals;      // index n (slot 0 used by shifted grids)
  std::map<Cell, long long> occupied;         // sparse: occupied cells only
  long long total = 0;

  long long N(int n) const {
    return n >= 0 && n < static_cast<int>(annulus_totals.size()) ? annulus_totals[n] : 0;
  }
  long long X(int n, int k) const {
    auto it = occupied.find({n, k});
    return it == occupied.end() ? 0 : it->second;
  }
  // max occupancy within annulus n
  long long max_in_annulus(int n) const;
  bool collision_in_annulus(int n) const { return max_in_annulus(n) >= 2; }
};

// Exact per-cell counts; linear in the number of points.
CellCounts count_cells(const PointSample& s, const AnnularGrid& g);

// "n,k,count" rows for the occupied cells, in cell order.
std::string to_csv(const CellCounts& counts);

// Summary document: per-annulus totals and the maximum cell occupancy.
std::string summary_json(const CellCounts& counts);

}  // namespace focksep
