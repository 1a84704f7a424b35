#include "frag/grid.hpp"

#include <algorithm>
#include <cmath>

#include "frag/errors.hpp"

namespace frag {

Grid build_grid(int cutoff, double x_max, std::size_t cells, GridScheme scheme,
                double ratio) {
  const double lo = cutoff;
  if (!(x_max > lo)) throw DomainError("grid requires x_max > N");
  if (cells == 0) throw DomainError("grid requires at least one cell");
  if (scheme == GridScheme::geometric && !(ratio > 1.0)) {
    throw DomainError("geometric grid requires ratio > 1");
  }

  Grid g;
  g.scheme_ = scheme;
  g.ratio_ = scheme == GridScheme::geometric ? ratio : 1.0;
  g.edges_.resize(cells + 1);
  const double length = x_max - lo;
  const auto m = static_cast<double>(cells);
  if (scheme == GridScheme::uniform) {
    for (std::size_t i = 0; i <= cells; ++i) {
      g.edges_[i] = lo + length * (static_cast<double>(i) / m);
    }
  } else {
    // Widths w_1 r^k summing to the domain length.
    const double first = length * (ratio - 1.0) / (std::pow(ratio, m) - 1.0);
    for (std::size_t i = 0; i <= cells; ++i) {
      g.edges_[i] = lo + first * (std::pow(ratio, static_cast<double>(i)) - 1.0) /
                             (ratio - 1.0);
    }
  }
  g.edges_.front() = lo;
  g.edges_.back() = x_max;

  g.centers_.resize(cells);
  g.widths_.resize(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    g.centers_[i] = 0.5 * (g.edges_[i] + g.edges_[i + 1]);
    g.widths_[i] = g.edges_[i + 1] - g.edges_[i];
    if (!(g.widths_[i] > 0.0)) throw DomainError("grid cells collapsed");
  }
  return g;
}

std::optional<std::size_t> cell_of(const Grid& grid, double x) {
  const auto& e = grid.edges();
  if (!(x > e.front()) || x > e.back()) return std::nullopt;
  // First edge >= x is the right edge of the containing cell.
  const auto it = std::lower_bound(e.begin() + 1, e.end(), x);
  return static_cast<std::size_t>(it - e.begin()) - 1;
}

}  // namespace frag
