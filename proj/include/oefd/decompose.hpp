#pragma once

#include <algorithm>

#include "oefd/errors.hpp"
#include "oefd/types.hpp"

namespace oefd {

// Spherical split of a feature vector: the norm carries the radial (age)
// component, the unit direction carries the angular (identity) component.
template <typename Scalar>
struct Decomposed {
  Scalar norm = Scalar(0);
  VecX<Scalar> direction;
  bool degenerate = false;  // set when the source norm was <= eps
};

using DecomposedFeature = Decomposed<Real>;

template <typename Derived>
Decomposed<typename Derived::Scalar> decompose(const Eigen::MatrixBase<Derived>& x,
                                               typename Derived::Scalar eps) {
  using Scalar = typename Derived::Scalar;
  if (x.size() == 0) throw ShapeError("decompose: zero-dimension input");
  if (!(eps > Scalar(0))) throw DomainError("decompose: eps must be positive");
  Decomposed<Scalar> d;
  d.norm = x.norm();
  d.degenerate = !(d.norm > eps);
  d.direction = x / std::max(d.norm, eps);
  return d;
}

template <typename Scalar>
VecX<Scalar> recompose(const Decomposed<Scalar>& d) {
  return d.norm * d.direction;
}

}  // namespace oefd
