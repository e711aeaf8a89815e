#pragma once

#include <cmath>
#include <functional>

#include "oefd/errors.hpp"
#include "oefd/types.hpp"

namespace oefd {

// Shape-checked product. Eigen would assert in debug builds; the toolkit
// contract is a typed error naming both shapes.
template <typename DerivedA, typename DerivedB>
MatX<typename DerivedA::Scalar> matmul(const Eigen::MatrixBase<DerivedA>& a,
                                       const Eigen::MatrixBase<DerivedB>& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: incompatible shapes " + shape_str(a) + " and " + shape_str(b));
  }
  return a * b;
}

template <typename Derived>
VecX<typename Derived::Scalar> row_norms(const Eigen::MatrixBase<Derived>& m) {
  return m.rowwise().norm();
}

// Each row divided by max(norm, eps); zero rows stay zero.
template <typename Derived>
MatX<typename Derived::Scalar> normalize_rows(const Eigen::MatrixBase<Derived>& m,
                                              typename Derived::Scalar eps) {
  using Scalar = typename Derived::Scalar;
  if (!(eps > Scalar(0))) throw DomainError("normalize_rows: eps must be positive");
  MatX<Scalar> out = m;
  for (Index r = 0; r < out.rows(); ++r) {
    Scalar n = out.row(r).norm();
    out.row(r) /= std::max(n, eps);
  }
  return out;
}

// Central-difference gradient oracle: (f(x+h e_i) - f(x-h e_i)) / 2h.
// Kept independent of every analytic path it is used to check.
inline Vector finite_difference_gradient(const std::function<Real(const Vector&)>& f,
                                         const Vector& x, Real h = 1e-5) {
  if (!(h > 0.0)) throw DomainError("finite_difference_gradient: h must be positive");
  Vector grad(x.size());
  Vector probe = x;
  for (Index i = 0; i < x.size(); ++i) {
    const Real xi = x[i];
    probe[i] = xi + h;
    const Real fp = f(probe);
    probe[i] = xi - h;
    const Real fm = f(probe);
    probe[i] = xi;
    if (!std::isfinite(fp) || !std::isfinite(fm)) {
      throw NumericalError("finite_difference_gradient: non-finite evaluation at coordinate " +
                           std::to_string(i));
    }
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

// Relative disagreement between an analytic gradient and its oracle,
// ||a - b|| / max(||a|| + ||b||, floor). Zero when both vanish.
inline Real gradient_rel_error(const Vector& analytic, const Vector& numeric) {
  const Real denom = analytic.norm() + numeric.norm();
  if (denom < 1e-12) return 0.0;
  return (analytic - numeric).norm() / denom;
}

}  // namespace oefd
