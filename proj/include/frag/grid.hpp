#pragma once

#include <optional>
#include <vector>

namespace frag {

enum class GridScheme { uniform, geometric };

/// Sectional mesh on (N, x_max] with left-open, right-closed cells.
class Grid {
 public:
  const std::vector<double>& edges() const { return edges_; }
  const std::vector<double>& centers() const { return centers_; }
  const std::vector<double>& widths() const { return widths_; }
  std::size_t cells() const { return centers_.size(); }
  double lower() const { return edges_.front(); }
  double upper() const { return edges_.back(); }
  GridScheme scheme() const { return scheme_; }
  double ratio() const { return ratio_; }

 private:
  friend Grid build_grid(int, double, std::size_t, GridScheme, double);
  std::vector<double> edges_;
  std::vector<double> centers_;
  std::vector<double> widths_;
  GridScheme scheme_ = GridScheme::uniform;
  double ratio_ = 1.0;
};

/// Partitions (cutoff, x_max] into `cells` cells; geometric widths grow by
/// `ratio` from one cell to the next. Throws DomainError on x_max <= cutoff,
/// cells == 0, or a geometric ratio <= 1.
Grid build_grid(int cutoff, double x_max, std::size_t cells,
                GridScheme scheme = GridScheme::uniform, double ratio = 2.0);

/// Zero-based index of the cell with e_{i-1} < x <= e_i, if any.
std::optional<std::size_t> cell_of(const Grid& grid, double x);

}  // namespace frag
