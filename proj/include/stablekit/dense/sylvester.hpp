#pragma once

#include "stablekit/dense/common.hpp"
#include "stablekit/dense/qz.hpp"
#include "stablekit/dense/quasi_triangular.hpp"

namespace stablekit {

template <typename Scalar>
struct CoupledSylvesterSolution {
  Matrix<Scalar> r;
  Matrix<Scalar> l;
  /// max of the two relative residuals, scaled by ||A2||_F + ||E2||_F + 1
  Scalar residual = 0;
};

namespace detail {

/// Substitution on quasi-triangular data:  S1 R - L S3 = F,  T1 R - L T3 = G.
template <typename Scalar>
void solve_coupled_sylvester_triangular(const Matrix<Scalar>& s1, const Matrix<Scalar>& t1,
                                        const Matrix<Scalar>& s3, const Matrix<Scalar>& t3,
                                        const Matrix<Scalar>& f, const Matrix<Scalar>& g,
                                        Matrix<Scalar>& r, Matrix<Scalar>& l) {
  const auto rows = quasi_blocks(s1);
  const auto cols = quasi_blocks(s3);
  r = Matrix<Scalar>::Zero(s1.rows(), s3.rows());
  l = Matrix<Scalar>::Zero(s1.rows(), s3.rows());
  for (auto bi = rows.rbegin(); bi != rows.rend(); ++bi) {
    const Eigen::Index i0 = bi->start, ni = bi->size;
    const Eigen::Index tail = s1.rows() - i0 - ni;
    for (const Block& bj : cols) {
      const Eigen::Index j0 = bj.start, nj = bj.size;
      Matrix<Scalar> rf = f.block(i0, j0, ni, nj);
      Matrix<Scalar> rg = g.block(i0, j0, ni, nj);
      if (tail > 0) {
        rf -= s1.block(i0, i0 + ni, ni, tail) * r.block(i0 + ni, j0, tail, nj);
        rg -= t1.block(i0, i0 + ni, ni, tail) * r.block(i0 + ni, j0, tail, nj);
      }
      if (j0 > 0) {
        rf += l.block(i0, 0, ni, j0) * s3.block(0, j0, j0, nj);
        rg += l.block(i0, 0, ni, j0) * t3.block(0, j0, j0, nj);
      }
      Matrix<Scalar> rij, lij;
      if (!solve_small_coupled_sylvester<Scalar>(s1.block(i0, i0, ni, ni), s3.block(j0, j0, nj, nj),
                                                 t1.block(i0, i0, ni, ni), t3.block(j0, j0, nj, nj), rf,
                                                 rg, rij, lij)) {
        throw Error(ErrorCode::NoUniqueSolution,
                    "coupled Sylvester equation is singular: pencil spectra are not disjoint");
      }
      r.block(i0, j0, ni, nj) = rij;
      l.block(i0, j0, ni, nj) = lij;
    }
  }
}

}  // namespace detail

/// Solves the coupled (generalized) Sylvester equation
///   A1 R - L A3 = -A2,   E1 R - L E3 = -E2
/// for R, L (n1 x n3). Both pencils are reduced to generalized Schur form; the remaining
/// block-triangular system is solved by substitution with vectorized 1x1/2x2 block solves.
template <typename Scalar>
CoupledSylvesterSolution<Scalar> solve_generalized_sylvester(const Matrix<Scalar>& a1, const Matrix<Scalar>& a3,
                                                             const Matrix<Scalar>& e1, const Matrix<Scalar>& e3,
                                                             const Matrix<Scalar>& a2, const Matrix<Scalar>& e2) {
  require_square(a1, "A1");
  require_square(a3, "A3");
  require_dims(e1.rows() == a1.rows() && e1.cols() == a1.cols(), "E1 must match A1");
  require_dims(e3.rows() == a3.rows() && e3.cols() == a3.cols(), "E3 must match A3");
  require_dims(a2.rows() == a1.rows() && a2.cols() == a3.rows(), "A2 must be n1 x n3");
  require_dims(e2.rows() == a1.rows() && e2.cols() == a3.rows(), "E2 must be n1 x n3");
  for (const auto* m : {&a1, &a3, &e1, &e3, &a2, &e2}) require_finite(*m, "Sylvester input");

  CoupledSylvesterSolution<Scalar> out;
  const Eigen::Index n1 = a1.rows(), n3 = a3.rows();
  if (n1 == 0 || n3 == 0) {
    out.r = Matrix<Scalar>::Zero(n1, n3);
    out.l = Matrix<Scalar>::Zero(n1, n3);
    return out;
  }
  const auto p1 = detail::unordered_qz(e1, a1);
  const auto p3 = detail::unordered_qz(e3, a3);
  // With U E V = T:  U1 (A1 R - L A3) V3 = S1 (V1^T R V3) - (U1 L U3^T) S3
  const Matrix<Scalar> f = -(p1.u * a2 * p3.v);
  const Matrix<Scalar> g = -(p1.u * e2 * p3.v);
  Matrix<Scalar> rt, lt;
  detail::solve_coupled_sylvester_triangular(p1.s, p1.t, p3.s, p3.t, f, g, rt, lt);
  out.r = p1.v * rt * p3.v.transpose();
  out.l = p1.u.transpose() * lt * p3.u;

  const Scalar scale = a2.norm() + e2.norm() + Scalar(1);
  const Scalar res_a = (a1 * out.r - out.l * a3 + a2).norm();
  const Scalar res_e = (e1 * out.r - out.l * e3 + e2).norm();
  out.residual = std::max(res_a, res_e) / scale;
  return out;
}

}  // namespace stablekit
