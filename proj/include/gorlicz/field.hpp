#pragma once

#include <Eigen/Core>

#include <cmath>
#include <utility>

#include "gorlicz/errors.hpp"
#include "gorlicz/grid.hpp"

namespace gorlicz {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Grid-sampled scalar function: one finite value per node.
template <typename Scalar>
class ScalarField {
 public:
  using Values = Vector<Scalar>;

  ScalarField() = default;
  explicit ScalarField(const Grid& grid, Scalar fill = Scalar(0))
      : grid_(grid), values_(Values::Constant(grid.size(), fill)) {}

  template <typename Derived>
  ScalarField(const Grid& grid, const Eigen::MatrixBase<Derived>& values) : grid_(grid), values_(values) {
    if (values_.size() != grid_.size()) throw UsageError("field value count does not match grid");
    if (!values_.allFinite()) throw DomainError("field values must be finite");
  }

  const Grid& grid() const { return grid_; }
  const Values& values() const { return values_; }
  Values& values() { return values_; }
  Index size() const { return values_.size(); }

  Scalar operator[](Index k) const { return values_[k]; }
  Scalar& operator[](Index k) { return values_[k]; }

  Scalar min() const { return values_.minCoeff(); }
  Scalar max() const { return values_.maxCoeff(); }

  template <typename F>
  static ScalarField generate(const Grid& grid, F&& f) {
    ScalarField out(grid);
    for (Index k = 0; k < grid.size(); ++k) out.values_[k] = f(k);
    return out;
  }

 private:
  Grid grid_;
  Values values_;
};

/// Grid-sampled n-vector function; row k holds the vector at node k.
template <typename Scalar>
class VectorField {
 public:
  using Values = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  VectorField() = default;
  explicit VectorField(const Grid& grid) : grid_(grid), values_(Values::Zero(grid.size(), grid.dims())) {}

  template <typename Derived>
  VectorField(const Grid& grid, const Eigen::MatrixBase<Derived>& values) : grid_(grid), values_(values) {
    if (values_.rows() != grid_.size() || values_.cols() != grid_.dims())
      throw UsageError("vector field shape does not match grid");
  }

  const Grid& grid() const { return grid_; }
  const Values& values() const { return values_; }
  Values& values() { return values_; }

  /// Euclidean magnitude per node.
  Vector<Scalar> magnitude() const { return values_.rowwise().norm(); }

 private:
  Grid grid_;
  Values values_;
};

using ScalarFieldd = ScalarField<double>;
using VectorFieldd = VectorField<double>;

inline void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw UsageError(std::string("grid mismatch: ") + what);
}

template <typename Scalar>
ScalarField<Scalar> operator+(const ScalarField<Scalar>& a, const ScalarField<Scalar>& b) {
  require_same_grid(a.grid(), b.grid(), "field addition");
  return ScalarField<Scalar>(a.grid(), (a.values() + b.values()).eval());
}

template <typename Scalar>
ScalarField<Scalar> operator-(const ScalarField<Scalar>& a, const ScalarField<Scalar>& b) {
  require_same_grid(a.grid(), b.grid(), "field subtraction");
  return ScalarField<Scalar>(a.grid(), (a.values() - b.values()).eval());
}

template <typename Scalar>
ScalarField<Scalar> operator*(Scalar c, const ScalarField<Scalar>& a) {
  return ScalarField<Scalar>(a.grid(), (c * a.values()).eval());
}

template <typename Scalar>
VectorField<Scalar> operator*(Scalar c, const VectorField<Scalar>& a) {
  return VectorField<Scalar>(a.grid(), (c * a.values()).eval());
}

/// h^n-weighted inner products.
template <typename Scalar>
Scalar inner(const ScalarField<Scalar>& a, const ScalarField<Scalar>& b) {
  require_same_grid(a.grid(), b.grid(), "inner product");
  return Scalar(a.grid().cell_volume()) * a.values().dot(b.values());
}

template <typename Scalar>
Scalar inner(const VectorField<Scalar>& a, const VectorField<Scalar>& b) {
  require_same_grid(a.grid(), b.grid(), "inner product");
  return Scalar(a.grid().cell_volume()) * a.values().cwiseProduct(b.values()).sum();
}

template <typename Scalar>
Scalar l1_norm(const ScalarField<Scalar>& u) {
  return Scalar(u.grid().cell_volume()) * u.values().cwiseAbs().sum();
}

template <typename Scalar>
Scalar l2_norm(const ScalarField<Scalar>& u) {
  using std::sqrt;
  return sqrt(Scalar(u.grid().cell_volume()) * u.values().squaredNorm());
}

template <typename Scalar>
Scalar l1_distance(const ScalarField<Scalar>& u, const ScalarField<Scalar>& v) {
  return l1_norm(u - v);
}

template <typename Scalar>
Scalar l2_distance(const ScalarField<Scalar>& u, const ScalarField<Scalar>& v) {
  return l2_norm(u - v);
}

}  // namespace gorlicz
