#pragma once

#include "stablekit/dense/common.hpp"

#include <Eigen/SVD>

namespace stablekit {

template <typename Scalar>
struct SvdResult {
  Matrix<Scalar> u;
  Vector<Scalar> singular_values;  // nonincreasing
  Matrix<Scalar> v;
  Eigen::Index numeric_rank = 0;
};

/// Full SVD, M = U * diag(sigma) * V^T, with numeric rank #{sigma_i > tol * sigma_1}.
template <typename Derived>
SvdResult<typename Derived::Scalar> svd(const Eigen::MatrixBase<Derived>& m,
                                        typename Derived::Scalar tol = 1e-12) {
  using Scalar = typename Derived::Scalar;
  require_finite(m, "M");
  SvdResult<Scalar> out;
  const Matrix<Scalar> mm = m;
  if (mm.size() == 0) {
    out.u = Matrix<Scalar>::Identity(mm.rows(), mm.rows());
    out.v = Matrix<Scalar>::Identity(mm.cols(), mm.cols());
    out.singular_values.resize(0);
    return out;
  }
  Eigen::JacobiSVD<Matrix<Scalar>> solver(mm, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.u = solver.matrixU();
  out.v = solver.matrixV();
  out.singular_values = solver.singularValues();
  const Scalar top = out.singular_values.size() > 0 ? out.singular_values(0) : Scalar(0);
  for (Eigen::Index i = 0; i < out.singular_values.size(); ++i) {
    if (out.singular_values(i) > tol * top && out.singular_values(i) > Scalar(0)) ++out.numeric_rank;
  }
  return out;
}

}  // namespace stablekit
