#pragma once

#include "gorlicz/field.hpp"

namespace gorlicz {

// Forward-difference gradient and its negative adjoint. The gradient component
// along an axis vanishes at the last node of that axis (Neumann), or uses a
// ghost value copied from a donor field (Dirichlet).

namespace detail {

template <typename Scalar, typename Ghost>
VectorField<Scalar> forward_gradient(const ScalarField<Scalar>& u, Ghost&& ghost) {
  const Grid& g = u.grid();
  VectorField<Scalar> out(g);
  const Scalar inv_h = Scalar(1) / Scalar(g.spacing());
  const auto& v = u.values();
  for (int axis = 0; axis < g.dims(); ++axis) {
    const Index stride = g.stride(axis);
    for (Index k = 0; k < g.size(); ++k) {
      const Scalar next = g.is_last(k, axis) ? ghost(k) : v[k + stride];
      out.values()(k, axis) = (next - v[k]) * inv_h;
    }
  }
  return out;
}

}  // namespace detail

template <typename Scalar>
VectorField<Scalar> gradient(const ScalarField<Scalar>& u) {
  return detail::forward_gradient(u, [&](Index k) { return u[k]; });
}

/// Dirichlet gradient: the ghost node past the last node along each axis
/// carries the donor's value at that last node.
template <typename Scalar>
VectorField<Scalar> gradient(const ScalarField<Scalar>& u, const ScalarField<Scalar>& donor) {
  require_same_grid(u.grid(), donor.grid(), "Dirichlet donor");
  return detail::forward_gradient(u, [&](Index k) { return donor[k]; });
}

/// Backward-difference divergence with <grad u, v> = -<u, div v> (Neumann pair).
template <typename Scalar>
ScalarField<Scalar> divergence(const VectorField<Scalar>& v) {
  const Grid& g = v.grid();
  ScalarField<Scalar> out(g);
  const Scalar inv_h = Scalar(1) / Scalar(g.spacing());
  for (int axis = 0; axis < g.dims(); ++axis) {
    const Index stride = g.stride(axis);
    const Index n = g.extent(axis);
    for (Index k = 0; k < g.size(); ++k) {
      const Index i = axis == 0 ? k % n : k / g.extent(0);
      Scalar d;
      if (i == 0)
        d = v.values()(k, axis);
      else if (i == n - 1)
        d = -v.values()(k - stride, axis);
      else
        d = v.values()(k, axis) - v.values()(k - stride, axis);
      out[k] += d * inv_h;
    }
  }
  return out;
}

/// Isotropic discrete total variation h^n * sum |grad u|.
template <typename Scalar>
Scalar total_variation(const ScalarField<Scalar>& u) {
  return Scalar(u.grid().cell_volume()) * gradient(u).magnitude().sum();
}

}  // namespace gorlicz
