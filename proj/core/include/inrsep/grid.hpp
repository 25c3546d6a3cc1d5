#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "inrsep/errors.hpp"

namespace inrsep {

// Physical coordinate range of one grid axis. Grid nodes are placed at the
// range endpoints inclusive: coord(i) = lo + i * (hi - lo) / (n - 1).
struct Axis {
  std::string label;
  double lo = 0.0;
  double hi = 1.0;
};

// Self-describing N-dimensional dense array: per-axis extents, physical
// ranges, and row-major values. Carrier for observed data, components,
// masks and filter outputs.
class Grid {
 public:
  Grid() = default;
  Grid(std::vector<std::size_t> shape, std::vector<Axis> axes);
  Grid(std::vector<std::size_t> shape, std::vector<Axis> axes, std::vector<double> values);

  static Grid like(const Grid& other) { return Grid(other.shape_, other.axes_); }

  std::size_t ndim() const { return shape_.size(); }
  std::size_t size() const { return values_.size(); }
  const std::vector<std::size_t>& shape() const { return shape_; }
  const std::vector<Axis>& axes() const { return axes_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  double operator[](std::size_t flat) const { return values_[flat]; }
  double& operator[](std::size_t flat) { return values_[flat]; }

  // Node spacing along an axis (0 for single-node axes).
  double step(std::size_t axis) const;
  // Physical coordinate of node i along an axis; a single-node axis sits at
  // the midpoint of its range.
  double coord(std::size_t axis, std::size_t i) const;
  // Affine map of a physical coordinate onto [-1, 1] for this axis.
  double normalized(std::size_t axis, double physical) const;

  std::size_t flat_index(std::span<const std::size_t> idx) const;
  std::vector<std::size_t> unflatten(std::size_t flat) const;
  // Physical coordinates of a node given by flat index.
  std::vector<double> coords_at(std::size_t flat) const;

  bool same_geometry(const Grid& other) const;

 private:
  std::vector<std::size_t> shape_;
  std::vector<Axis> axes_;
  std::vector<double> values_;
};

}  // namespace inrsep
