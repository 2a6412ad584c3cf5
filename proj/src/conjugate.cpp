#include <algorithm>
#include <cmath>

#include "lpjohn/numerics.hpp"

namespace lpjohn {

DiscreteConjugate::DiscreteConjugate(const Grid& g) : dim_(g.dim()) {
  const int n = g.points_per_axis();
  const int last = dim_ - 1;
  const std::size_t rows = g.size() / static_cast<std::size_t>(n);
  const auto vals = g.values();
  rows_.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t base = r * static_cast<std::size_t>(n);
    Row row{};
    const auto ijk = g.unflatten(base);
    for (int a = 0; a < last; ++a) row.prefix[a] = g.coordinate(ijk[a]);
    // Andrew's monotone chain, lower hull only.
    for (int j = 0; j < n; ++j) {
      const double gj = vals[base + j];
      if (!std::isfinite(gj)) continue;
      const double xj = g.coordinate(j);
      while (row.xs.size() >= 2) {
        const std::size_t k = row.xs.size();
        const double x1 = row.xs[k - 2], g1 = row.gs[k - 2];
        const double x2 = row.xs[k - 1], g2 = row.gs[k - 1];
        // drop the middle point if it lies on or above the chord
        if ((g2 - g1) * (xj - x1) >= (gj - g1) * (x2 - x1)) {
          row.xs.pop_back();
          row.gs.pop_back();
        } else {
          break;
        }
      }
      row.xs.push_back(xj);
      row.gs.push_back(gj);
    }
    if (!row.xs.empty()) rows_.push_back(std::move(row));
  }
  if (rows_.empty()) throw InputError("grid has no finite values to conjugate");
}

double DiscreteConjugate::row_max(const Row& row, double slope) const {
  // The maximizer of x*s - g over the hull is the first vertex whose right edge is
  // steeper than s.
  std::size_t lo = 0;
  std::size_t hi = row.xs.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    const double edge = (row.gs[mid + 1] - row.gs[mid]) / (row.xs[mid + 1] - row.xs[mid]);
    if (edge < slope) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return row.xs[lo] * slope - row.gs[lo];
}

double DiscreteConjugate::operator()(const double* y) const {
  const int last = dim_ - 1;
  double best = -kInfinity;
  for (const Row& row : rows_) {
    double lead = 0.0;
    for (int a = 0; a < last; ++a) lead += row.prefix[a] * y[a];
    best = std::max(best, lead + row_max(row, y[last]));
  }
  return best;
}

}  // namespace lpjohn
