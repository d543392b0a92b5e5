#pragma once

#include "stablekit/dense/schur.hpp"
#include "stablekit/dense/svd.hpp"
#include "stablekit/norms/gramians.hpp"
#include "stablekit/system/descriptor_system.hpp"

#include <sstream>

namespace stablekit {

template <typename Scalar>
struct RegularityVerdict {
  bool regular = true;
  Eigen::Index numeric_rank = 0;
  /// smallest / largest singular value of a_g (1 for n = 0, 0 for a_g = 0).
  Scalar ratio = 1;
};

/// Balance-free approximant of an antistable system S = (E, A, B, C, 0) for gamma >= sigma1:
///   R   = Xo E Xc E^T - gamma^2 I
///   E_g = E^T R,  A_g = -A^T R - C^T C_g,  B_g = E^T Xo B,  C_g = C Xc E^T.
/// The feedthrough of the gamma system is zero.
template <typename Scalar>
struct GammaSystem {
  Matrix<Scalar> e_g, a_g, b_g, c_g;
  Scalar gamma = 0;
  Scalar sigma1 = 0;
  Matrix<Scalar> r_g;
  RegularityVerdict<Scalar> verdict;
  /// Source system had E = I.
  bool source_standard = false;

  bool regular() const { return verdict.regular; }
  Eigen::Index states() const { return a_g.rows(); }

  DescriptorSystem<Scalar> system() const {
    return DescriptorSystem<Scalar>::trusted(e_g, a_g, b_g, c_g, Matrix<Scalar>::Zero(c_g.rows(), b_g.cols()));
  }
};

/// Numeric rank of a_g: Regular iff the smallest singular value exceeds tol times the largest.
template <typename Scalar>
RegularityVerdict<Scalar> regularity_test(const Matrix<Scalar>& a_g, Scalar tol = Scalar(1e-10)) {
  RegularityVerdict<Scalar> v;
  const Eigen::Index n = a_g.rows();
  if (n == 0) return v;
  const auto sv = svd(a_g, tol);
  v.numeric_rank = sv.numeric_rank;
  v.regular = sv.numeric_rank == n;
  v.ratio = sv.singular_values(0) > 0 ? sv.singular_values(n - 1) / sv.singular_values(0) : Scalar(0);
  return v;
}

template <typename Scalar>
RegularityVerdict<Scalar> regularity_test(const GammaSystem<Scalar>& gs, Scalar tol = Scalar(1e-10)) {
  return regularity_test(gs.a_g, tol);
}

template <typename Scalar>
GammaSystem<Scalar> construct_gamma_system(const DescriptorSystem<Scalar>& s, const GramianPair<Scalar>& gr,
                                           Scalar sigma1, Scalar gamma, Scalar tol = Scalar(1e-10)) {
  if (gamma < sigma1 * (Scalar(1) - Scalar(1e-12))) {
    std::ostringstream msg;
    msg << "gamma = " << gamma << " is below sigma1 = " << sigma1;
    throw Error(ErrorCode::GammaTooSmall, msg.str());
  }
  const Eigen::Index n = s.states();
  const Matrix<Scalar> et = s.e().transpose();
  GammaSystem<Scalar> g;
  g.gamma = gamma;
  g.sigma1 = sigma1;
  g.source_standard = s.is_standard(Scalar(0));
  g.r_g = gr.xo * s.e() * gr.xc * et - gamma * gamma * Matrix<Scalar>::Identity(n, n);
  g.e_g = et * g.r_g;
  g.b_g = et * gr.xo * s.b();
  g.c_g = s.c() * gr.xc * et;
  g.a_g = -s.a().transpose() * g.r_g - s.c().transpose() * g.c_g;
  g.verdict = regularity_test(g.a_g, tol);
  // Above sigma1 the pencil is regular whatever the numeric rank says.
  if (gamma > sigma1 * (Scalar(1) + Scalar(1e-12))) g.verdict.regular = true;
  return g;
}

template <typename Scalar>
GammaSystem<Scalar> construct_gamma_system(const DescriptorSystem<Scalar>& s, const GramianPair<Scalar>& gr,
                                           Scalar gamma) {
  return construct_gamma_system(s, gr, hankel_sigma_max(s, gr).sigma1, gamma, Scalar(1e-10));
}

namespace detail {

template <typename Scalar>
DescriptorSystem<Scalar> take_leading(const GammaSystem<Scalar>& gs, const Matrix<Scalar>& u,
                                      const Matrix<Scalar>& v, Eigen::Index k, Scalar tol) {
  const Eigen::Index n = gs.states(), d = n - k;
  const Matrix<Scalar> ue = u * gs.e_g * v;
  const Matrix<Scalar> ua = u * gs.a_g * v;
  const Matrix<Scalar> ub = u * gs.b_g;
  const Matrix<Scalar> cv = gs.c_g * v;
  const Scalar scale = std::max({gs.e_g.norm(), gs.a_g.norm(), gs.b_g.norm(), std::numeric_limits<Scalar>::min()});
  const Scalar lower = std::max({ue.bottomRows(d).norm(), ua.bottomRows(d).norm(), ub.bottomRows(d).norm()});
  if (lower > tol * scale) {
    std::ostringstream msg;
    msg << "lower blocks of the transformed gamma system have norm " << lower << " (scale " << scale
        << "); sigma1 or the rank of A_g is misestimated";
    throw Error(ErrorCode::StructureViolation, msg.str());
  }
  const Matrix<Scalar> zero_d = Matrix<Scalar>::Zero(gs.c_g.rows(), gs.b_g.cols());
  if (k == 0) return DescriptorSystem<Scalar>::empty(zero_d);
  return DescriptorSystem<Scalar>(ue.topLeftCorner(k, k), ua.topLeftCorner(k, k), ub.topRows(k), cv.leftCols(k),
                                  zero_d);
}

inline void require_singular(bool regular) {
  if (regular) throw Error(ErrorCode::PreconditionViolated, "gamma system is regular; no reduction needed");
}

}  // namespace detail

/// Singular branch: orthogonal U, V from the SVD of A_g give U A_g V = [A11 0; 0 0] with A11
/// invertible; the lower blocks of U E_g V and U B_g vanish and (E11, A11, B1, C1, 0) is returned.
template <typename Scalar>
DescriptorSystem<Scalar> reduce_singular_svd(const GammaSystem<Scalar>& gs, Scalar tol = Scalar(1e-10),
                                             Scalar structure_tol = Scalar(1e-8)) {
  detail::require_singular(gs.regular());
  const auto sv = svd(gs.a_g, tol);
  return detail::take_leading<Scalar>(gs, sv.u.transpose(), sv.v, sv.numeric_rank, structure_tol);
}

/// E = I shortcut: ordered real Schur form of A_g with zero eigenvalues trailing, V = U^T.
template <typename Scalar>
DescriptorSystem<Scalar> reduce_singular_schur(const GammaSystem<Scalar>& gs, Scalar tol = Scalar(1e-10),
                                               Scalar structure_tol = Scalar(1e-8)) {
  detail::require_singular(gs.regular());
  if (!gs.source_standard) throw Error(ErrorCode::NotStandardForm, "Schur reduction needs E = I");
  const auto rs = real_schur<Scalar>(gs.a_g, tol);
  return detail::take_leading<Scalar>(gs, rs.q, rs.q.transpose(), rs.nonzero_count, structure_tol);
}

}  // namespace stablekit
