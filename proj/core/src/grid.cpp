#include "inrsep/grid.hpp"

#include <unordered_set>

namespace inrsep {

namespace {

std::size_t checked_size(const std::vector<std::size_t>& shape, const std::vector<Axis>& axes) {
  if (shape.empty()) throw DataError("Grid: zero-dimensional grid");
  if (shape.size() != axes.size()) throw ShapeError("Grid: shape/axes rank mismatch");
  std::unordered_set<std::string> labels;
  for (const Axis& a : axes) {
    if (!labels.insert(a.label).second) throw DataError("Grid: duplicate axis label '" + a.label + "'");
    if (!(a.hi > a.lo)) throw DataError("Grid: degenerate axis range on '" + a.label + "'");
  }
  std::size_t n = 1;
  for (std::size_t e : shape) {
    if (e == 0) throw DataError("Grid: zero extent");
    n *= e;
  }
  return n;
}

}  // namespace

Grid::Grid(std::vector<std::size_t> shape, std::vector<Axis> axes)
    : shape_(std::move(shape)), axes_(std::move(axes)) {
  values_.assign(checked_size(shape_, axes_), 0.0);
}

Grid::Grid(std::vector<std::size_t> shape, std::vector<Axis> axes, std::vector<double> values)
    : shape_(std::move(shape)), axes_(std::move(axes)), values_(std::move(values)) {
  if (checked_size(shape_, axes_) != values_.size()) {
    throw ShapeError("Grid: value count does not match shape");
  }
}

double Grid::step(std::size_t axis) const {
  const std::size_t n = shape_[axis];
  if (n < 2) return 0.0;
  return (axes_[axis].hi - axes_[axis].lo) / static_cast<double>(n - 1);
}

double Grid::coord(std::size_t axis, std::size_t i) const {
  const std::size_t n = shape_[axis];
  if (n < 2) return 0.5 * (axes_[axis].lo + axes_[axis].hi);
  return axes_[axis].lo + static_cast<double>(i) * step(axis);
}

double Grid::normalized(std::size_t axis, double physical) const {
  const Axis& a = axes_[axis];
  return 2.0 * (physical - a.lo) / (a.hi - a.lo) - 1.0;
}

std::size_t Grid::flat_index(std::span<const std::size_t> idx) const {
  if (idx.size() != shape_.size()) throw ShapeError("Grid: index rank mismatch");
  std::size_t flat = 0;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    if (idx[a] >= shape_[a]) throw ShapeError("Grid: index out of bounds");
    flat = flat * shape_[a] + idx[a];
  }
  return flat;
}

std::vector<std::size_t> Grid::unflatten(std::size_t flat) const {
  std::vector<std::size_t> idx(shape_.size());
  for (std::size_t a = shape_.size(); a-- > 0;) {
    idx[a] = flat % shape_[a];
    flat /= shape_[a];
  }
  return idx;
}

std::vector<double> Grid::coords_at(std::size_t flat) const {
  const auto idx = unflatten(flat);
  std::vector<double> c(idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a) c[a] = coord(a, idx[a]);
  return c;
}

bool Grid::same_geometry(const Grid& other) const {
  if (shape_ != other.shape_) return false;
  for (std::size_t a = 0; a < axes_.size(); ++a) {
    if (axes_[a].label != other.axes_[a].label || axes_[a].lo != other.axes_[a].lo ||
        axes_[a].hi != other.axes_[a].hi) {
      return false;
    }
  }
  return true;
}

}  // namespace inrsep
