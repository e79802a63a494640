#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <string>

#include "gorlicz/errors.hpp"

namespace gorlicz {

using Index = Eigen::Index;

/// Uniform isotropic node grid on a 1D interval or 2D rectangle.
///
/// Nodes are stored x-fastest: node (i, j) has linear index i + nx * j.
/// The domain covered by an extent of n nodes has n - 1 cells of width h.
class Grid {
 public:
  Grid() = default;

  explicit Grid(Index nx, double h = 1.0) : dims_(1), extents_{nx, 1}, h_(h) { validate(); }

  Grid(Index nx, Index ny, double h) : dims_(2), extents_{nx, ny}, h_(h) { validate(); }

  /// Grid on [0, length] with n nodes (spacing length / (n - 1)).
  static Grid interval(Index n, double length = 1.0) { return Grid(n, length / double(n - 1)); }

  int dims() const { return dims_; }
  Index extent(int axis) const { return extents_[axis]; }
  Index size() const { return extents_[0] * extents_[1]; }
  double spacing() const { return h_; }

  /// Volume element h^n attached to each node by the quadrature.
  double cell_volume() const { return dims_ == 1 ? h_ : h_ * h_; }

  /// h^n times the number of cells, i.e. |Omega|.
  double measure() const {
    double cells = double(extents_[0] - 1);
    if (dims_ == 2) cells *= double(extents_[1] - 1);
    return cell_volume() * cells;
  }

  /// h^n times the number of nodes: the total weight of the node quadrature.
  double quadrature_measure() const { return cell_volume() * double(size()); }

  Index stride(int axis) const { return axis == 0 ? 1 : extents_[0]; }

  /// Coordinate along an axis (0 at the first node).
  double coordinate(Index node, int axis) const {
    const Index i = axis == 0 ? node % extents_[0] : node / extents_[0];
    return h_ * double(i);
  }

  /// True when the node is the last one along the axis.
  bool is_last(Index node, int axis) const {
    return axis == 0 ? node % extents_[0] == extents_[0] - 1 : node / extents_[0] == extents_[1] - 1;
  }

  bool on_boundary(Index node) const {
    const Index i = node % extents_[0];
    if (i == 0 || i == extents_[0] - 1) return true;
    if (dims_ == 1) return false;
    const Index j = node / extents_[0];
    return j == 0 || j == extents_[1] - 1;
  }

  /// Squared-norm bound 4n/h^2 of the forward-difference gradient.
  double gradient_norm_sq_bound() const { return 4.0 * dims_ / (h_ * h_); }

  std::string describe() const {
    std::string s = std::to_string(extents_[0]);
    if (dims_ == 2) s += "x" + std::to_string(extents_[1]);
    return s;
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.dims_ == b.dims_ && a.extents_ == b.extents_ && a.h_ == b.h_;
  }

 private:
  void validate() const {
    if (extents_[0] < 2 || (dims_ == 2 && extents_[1] < 2))
      throw UsageError("grid extents must be >= 2 in every dimension");
    if (!(h_ > 0.0) || !std::isfinite(h_)) throw UsageError("grid spacing must be positive");
  }

  int dims_ = 1;
  std::array<Index, 2> extents_{2, 1};
  double h_ = 1.0;
};

}  // namespace gorlicz
