#pragma once

#include "stablekit/norms/balance.hpp"

#include <Eigen/QR>

#include <sstream>

namespace stablekit {

template <typename Scalar>
struct GloverApproximant {
  DescriptorSystem<Scalar> system;
  Matrix<Scalar> u;
  Scalar sigma1 = 0;
  Eigen::Index r = 0;
  /// ||C2^T U + B2|| / ||B2||
  Scalar least_squares_residual = 0;
  /// ||B2 B2^T - C2^T C2|| / ||B2 B2^T||
  Scalar balance_residual = 0;
};

/// Optimal stable approximation of a minimal antistable standard system through its balanced
/// realization. With Cont = diag(S1, -h I_r), Obs = diag(S2, -h I_r) and B2 = -C2^T U:
///   G  = S1 S2 - h^2 I
///   A~ = G^-1 (h^2 A11^T + S2 A11 S1 + h C1^T U B1^T)
///   B~ = G^-1 (S2 B1 - h C1^T U)
///   C~ = C1 S1 - h U B1^T
///   D~ = D + h U
template <typename Scalar>
GloverApproximant<Scalar> glover_oracle(const DescriptorSystem<Scalar>& s, Scalar tol = Scalar(1e-6)) {
  const auto bal = balanced_realization(s);
  const auto& sb = bal.system;
  const Eigen::Index n = sb.states(), r = bal.r, k = n - r;
  const Scalar h = bal.h;
  GloverApproximant<Scalar> out;
  out.sigma1 = h;
  out.r = r;
  if (n == 0) {
    out.system = s;
    out.u = Matrix<Scalar>::Zero(s.outputs(), s.inputs());
    return out;
  }

  const Matrix<Scalar> a11 = sb.a().topLeftCorner(k, k);
  const Matrix<Scalar> b1 = sb.b().topRows(k), b2 = sb.b().bottomRows(r);
  const Matrix<Scalar> c1 = sb.c().leftCols(k), c2 = sb.c().rightCols(r);

  const Matrix<Scalar> bb = b2 * b2.transpose();
  out.balance_residual = relative<Scalar>((bb - c2.transpose() * c2).norm(), bb.norm());

  const Matrix<Scalar> c2t = c2.transpose();
  out.u = -c2t.completeOrthogonalDecomposition().solve(b2);
  out.least_squares_residual = relative<Scalar>((c2t * out.u + b2).norm(), b2.norm());
  if (out.least_squares_residual > tol) {
    std::ostringstream msg;
    msg << "C2^T U = -B2 has no solution (relative residual " << out.least_squares_residual << ")";
    throw Error(ErrorCode::LeastSquaresInconsistent, msg.str());
  }

  const Matrix<Scalar>& s1 = bal.sigma_1;
  const Matrix<Scalar>& s2 = bal.sigma_2;
  const Matrix<Scalar> gam = s1 * s2 - h * h * Matrix<Scalar>::Identity(k, k);
  const Eigen::PartialPivLU<Matrix<Scalar>> lu(gam);
  const Matrix<Scalar> at =
      lu.solve(h * h * a11.transpose() + s2 * a11 * s1 + h * c1.transpose() * out.u * b1.transpose());
  const Matrix<Scalar> bt = lu.solve(s2 * b1 - h * c1.transpose() * out.u);
  const Matrix<Scalar> ct = c1 * s1 - h * out.u * b1.transpose();
  const Matrix<Scalar> dt = sb.d() + h * out.u;
  out.system = DescriptorSystem<Scalar>::standard(at, bt, ct, dt);
  return out;
}

}  // namespace stablekit
