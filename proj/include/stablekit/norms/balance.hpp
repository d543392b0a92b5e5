#pragma once

#include "stablekit/norms/gramians.hpp"
#include "stablekit/system/descriptor_system.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>

namespace stablekit {

/// Balanced realization of a minimal antistable standard system. The Gramians of `system` are
///   Cont = Obs = [sigma_rest 0; 0 -h I_r]
/// with sigma_rest = -diag(remaining Hankel singular values) and h = sigma1 of multiplicity r.
template <typename Scalar>
struct BalancedRealization {
  DescriptorSystem<Scalar> system;
  Matrix<Scalar> sigma_1;  // (n - r) x (n - r) block of Cont
  Matrix<Scalar> sigma_2;  // (n - r) x (n - r) block of Obs
  Eigen::Index r = 0;
  Scalar h = 0;
  Vector<Scalar> hankel_singular_values;  // descending
  Matrix<Scalar> t, t_inv;                // system = (I, T A T^-1, T B, C T^-1, D)
};

namespace detail {

/// Cholesky factor of -X for a negative definite X; throws NotMinimal otherwise.
template <typename Scalar>
Matrix<Scalar> negative_cholesky(const Matrix<Scalar>& x, const char* which) {
  Eigen::LLT<Matrix<Scalar>> llt(-x);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotMinimal, std::string(which) + " Gramian is not negative definite");
  }
  return llt.matrixL();
}

}  // namespace detail

/// Square-root balancing: -Xc = Lc Lc^T, -Xo = Lo Lo^T, Lo^T Lc = U S V^T,
/// T = S^{-1/2} U^T Lo^T, T^{-1} = Lc V S^{-1/2}.
template <typename Scalar>
BalancedRealization<Scalar> balanced_realization(const DescriptorSystem<Scalar>& s,
                                                 Scalar rank_tol = Scalar(1e-12),
                                                 Scalar multiplicity_tol = Scalar(1e-8)) {
  const Eigen::Index n = s.states();
  require_dims(s.is_standard(), "balanced realization needs E = I");
  BalancedRealization<Scalar> out;
  if (n == 0) {
    out.system = s;
    return out;
  }
  const auto gr = gramians(s);
  const Matrix<Scalar> lc = detail::negative_cholesky(gr.xc, "controllability");
  const Matrix<Scalar> lo = detail::negative_cholesky(gr.xo, "observability");
  Eigen::JacobiSVD<Matrix<Scalar>> svd(lo.transpose() * lc, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector<Scalar> hsv = svd.singularValues();
  if (!(hsv(n - 1) > rank_tol * hsv(0))) {
    throw Error(ErrorCode::NotMinimal, "Gramian product is numerically singular");
  }
  const Vector<Scalar> isq = hsv.cwiseSqrt().cwiseInverse();

  Eigen::Index r = 0;
  while (r < n && std::abs(hsv(r) - hsv(0)) <= multiplicity_tol * hsv(0)) ++r;

  // Order states as (rest, sigma1 block).
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(n);
  for (Eigen::Index i = 0; i < n; ++i) perm.indices()(i) = i < r ? n - r + i : i - r;
  Matrix<Scalar> t = perm * (isq.asDiagonal() * svd.matrixU().transpose() * lo.transpose());
  Matrix<Scalar> t_inv = (lc * svd.matrixV() * isq.asDiagonal()) * perm.transpose();

  Vector<Scalar> ordered(n);
  ordered << hsv.tail(n - r), hsv.head(r);

  out.system = DescriptorSystem<Scalar>::standard(t * s.a() * t_inv, t * s.b(), s.c() * t_inv, s.d());
  out.sigma_1 = -Matrix<Scalar>(ordered.head(n - r).asDiagonal());
  out.sigma_2 = out.sigma_1;
  out.r = r;
  out.h = hsv(0);
  out.hankel_singular_values = hsv;
  out.t = std::move(t);
  out.t_inv = std::move(t_inv);
  return out;
}

}  // namespace stablekit
