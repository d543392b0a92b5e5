#pragma once

#include "stablekit/dense/common.hpp"
#include "stablekit/dense/quasi_triangular.hpp"
#include "stablekit/dense/schur.hpp"

#include <Eigen/LU>

#include <string>

namespace stablekit {

enum class GramianSide { Controllability, Observability };

template <typename Scalar>
struct LyapunovSolution {
  Matrix<Scalar> x;
  /// ||residual||_F / ||W||_F (absolute when W = 0)
  Scalar residual = 0;
};

namespace detail {

/// Solves T Y + Y T^T = G for quasi upper triangular T by column-block back substitution.
template <typename Scalar>
Matrix<Scalar> solve_quasi_triangular_lyapunov(const Matrix<Scalar>& t, const Matrix<Scalar>& g) {
  const Eigen::Index n = t.rows();
  const auto blocks = quasi_blocks(t);
  Matrix<Scalar> y = Matrix<Scalar>::Zero(n, n);
  for (auto bj = blocks.rbegin(); bj != blocks.rend(); ++bj) {
    const Eigen::Index j0 = bj->start, nj = bj->size;
    const Eigen::Index right = n - j0 - nj;
    Matrix<Scalar> rhs = g.middleCols(j0, nj);
    if (right > 0) rhs -= y.middleCols(j0 + nj, right) * t.block(j0, j0 + nj, nj, right).transpose();
    const Matrix<Scalar> tjj_t = t.block(j0, j0, nj, nj).transpose();
    // Rows from the bottom: T_II Y_I + Y_I T_JJ^T = rhs_I - sum_{K>I} T_IK Y_K
    for (auto bi = blocks.rbegin(); bi != blocks.rend(); ++bi) {
      const Eigen::Index i0 = bi->start, ni = bi->size;
      const Eigen::Index below = n - i0 - ni;
      Matrix<Scalar> local = rhs.middleRows(i0, ni);
      if (below > 0) local -= t.block(i0, i0 + ni, ni, below) * y.block(i0 + ni, j0, below, nj);
      Matrix<Scalar> yij;
      if (!solve_small_sylvester<Scalar>(t.block(i0, i0, ni, ni), tjj_t, local, yij)) {
        throw Error(ErrorCode::SpectrumViolation,
                    "Lyapunov operator is singular: eigenvalues lambda_i + lambda_j vanish");
      }
      y.block(i0, j0, ni, nj) = yij;
    }
  }
  return y;
}

}  // namespace detail

/// Solves the generalized Lyapunov equation
///   controllability:  A X E^T + E X A^T + W = 0
///   observability:    A^T X E + E^T X A + W = 0
/// for antistable (E, A) with E regular. The pencil is brought to standard form with E^{-1}
/// and the result comes from Bartels-Stewart substitution on the real Schur form.
template <typename Scalar>
LyapunovSolution<Scalar> solve_generalized_lyapunov(const Matrix<Scalar>& e, const Matrix<Scalar>& a,
                                                     const Matrix<Scalar>& w, GramianSide side,
                                                     Scalar axis_tol = Scalar(1e-10)) {
  require_square(e, "E");
  require_square(a, "A");
  require_square(w, "W");
  require_dims(e.rows() == a.rows() && w.rows() == a.rows(), "E, A and W must have equal size");
  require_finite(e, "E");
  require_finite(a, "A");
  require_finite(w, "W");
  const Eigen::Index n = a.rows();
  LyapunovSolution<Scalar> out;
  if (n == 0) {
    out.x = Matrix<Scalar>(0, 0);
    return out;
  }
  const Scalar wnorm = w.norm();
  if ((w - w.transpose()).norm() > Scalar(1e-12) * std::max(wnorm, Scalar(1e-300)) + Scalar(1e-300)) {
    throw Error(ErrorCode::NonSymmetricInput, "forcing term W is not symmetric");
  }

  Eigen::FullPivLU<Matrix<Scalar>> lu(e);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::SpectrumViolation, "E is singular, pencil has an infinite eigenvalue");
  }
  const Matrix<Scalar> e_inv = lu.inverse();
  const Matrix<Scalar> a_std = e_inv * a;

  // Both sides become  M Y + Y M^T + F = 0.
  Matrix<Scalar> m, f;
  if (side == GramianSide::Controllability) {
    m = a_std;
    f = e_inv * w * e_inv.transpose();
  } else {
    m = a_std.transpose();
    f = w;
  }
  f = (f + f.transpose()) / Scalar(2);

  Eigen::RealSchur<Matrix<Scalar>> rs(n);
  rs.setMaxIterations(400 * n);
  rs.compute(m, true);
  if (rs.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure, "real Schur iteration did not converge");
  }
  Matrix<Scalar> t = rs.matrixT();
  detail::clean_quasi_triangular(t);
  const Matrix<Scalar>& q = rs.matrixU();  // m = q t q^T

  for (const auto& lambda : quasi_triangular_eigenvalues(t)) {
    const Scalar band = axis_tol * (Scalar(1) + std::abs(lambda));
    if (lambda.real() <= band) {
      throw Error(ErrorCode::SpectrumViolation,
                  "pencil is not antistable: eigenvalue " + std::to_string(double(lambda.real())) +
                      (lambda.imag() >= 0 ? "+" : "") + std::to_string(double(lambda.imag())) + "i");
    }
  }

  const Matrix<Scalar> g = -(q.transpose() * f * q);
  const Matrix<Scalar> y = detail::solve_quasi_triangular_lyapunov(t, g);
  Matrix<Scalar> x = q * y * q.transpose();
  if (side == GramianSide::Observability) x = e_inv.transpose() * x * e_inv;
  out.x = (x + x.transpose()) / Scalar(2);

  Matrix<Scalar> res;
  if (side == GramianSide::Controllability) {
    res = a * out.x * e.transpose() + e * out.x * a.transpose() + w;
  } else {
    res = a.transpose() * out.x * e + e.transpose() * out.x * a + w;
  }
  out.residual = wnorm > 0 ? res.norm() / wnorm : res.norm();
  return out;
}

}  // namespace stablekit
