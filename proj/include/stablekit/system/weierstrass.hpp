#pragma once

#include "stablekit/dense/qz.hpp"
#include "stablekit/dense/sylvester.hpp"
#include "stablekit/system/descriptor_system.hpp"

#include <complex>

namespace stablekit {

/// Weierstrass-like split of a regular system into a finite part (I, J, B_J, C_J) and a
/// nilpotent part (N, I, B_N, C_N):
///   F(s) = C_J (sI - J)^{-1} B_J + D - sum_{i < nu} s^i C_N N^i B_N.
template <typename Scalar>
struct WeierstrassSplit {
  Matrix<Scalar> j, b_j, c_j;
  Matrix<Scalar> n, b_n, c_n;
  Matrix<Scalar> d;
  Eigen::Index nu = 1;
  /// r.s.e. transforms with P E Q = diag(I, N) and P A Q = diag(J, I).
  Matrix<Scalar> p, q;

  Eigen::Index finite_order() const { return j.rows(); }
  Eigen::Index infinite_order() const { return n.rows(); }
};

namespace detail {

/// Decoupling transforms for an ordered generalized Schur form with leading block of size k:
/// P = [I -L; 0 I] U and Q = V [I R; 0 I] make (E, A) block diagonal.
template <typename Scalar>
void block_diagonalize(const OrderedQz<Scalar>& qz, Matrix<Scalar>& p, Matrix<Scalar>& q) {
  const Eigen::Index n = qz.at.rows(), k = qz.split, r = n - k;
  p = qz.u;
  q = qz.v;
  if (k == 0 || r == 0) return;
  const auto sol = solve_generalized_sylvester<Scalar>(
      qz.at.topLeftCorner(k, k), qz.at.bottomRightCorner(r, r), qz.et.topLeftCorner(k, k),
      qz.et.bottomRightCorner(r, r), qz.at.topRightCorner(k, r), qz.et.topRightCorner(k, r));
  p.topRows(k) -= sol.l * qz.u.bottomRows(r);
  q.rightCols(r) += qz.v.leftCols(k) * sol.r;
}

}  // namespace detail

template <typename Scalar>
WeierstrassSplit<Scalar> weierstrass_split(const DescriptorSystem<Scalar>& s) {
  const Eigen::Index n = s.states();
  const auto qz = qz_ordered<Scalar>(s.e(), s.a(), select_finite<Scalar>());
  const Eigen::Index k = qz.split, r = n - k;

  Matrix<Scalar> p, q;
  detail::block_diagonalize(qz, p, q);

  // The infinite block is upper triangular with negligible diagonal in E; dropping that
  // diagonal makes N exactly strictly upper triangular.
  Matrix<Scalar> e3 = qz.et.bottomRightCorner(r, r).template triangularView<Eigen::StrictlyUpper>();
  const Matrix<Scalar> a3 = qz.at.bottomRightCorner(r, r).template triangularView<Eigen::Upper>();
  const Matrix<Scalar> e1 = qz.et.topLeftCorner(k, k).template triangularView<Eigen::Upper>();
  const Matrix<Scalar> a1 = qz.at.topLeftCorner(k, k);

  const Matrix<Scalar> pb = p * s.b();
  const Matrix<Scalar> cq = s.c() * q;

  WeierstrassSplit<Scalar> out;
  out.d = s.d();
  const auto e1_inv = e1.template triangularView<Eigen::Upper>();
  out.j = e1_inv.solve(a1);
  out.b_j = e1_inv.solve(pb.topRows(k));
  out.c_j = cq.leftCols(k);

  const Matrix<Scalar> a3_inv = a3.template triangularView<Eigen::Upper>().solve(Matrix<Scalar>::Identity(r, r));
  out.n = (e3 * a3_inv).template triangularView<Eigen::StrictlyUpper>();
  out.b_n = pb.bottomRows(r);
  out.c_n = cq.rightCols(r) * a3_inv;

  out.p = p;
  out.p.topRows(k) = e1_inv.solve(p.topRows(k));
  out.q = q;
  out.q.rightCols(r) = q.rightCols(r) * a3_inv;

  out.nu = 1;
  Matrix<Scalar> power = out.n;
  const Scalar scale = std::max(Scalar(1), out.n.norm());
  while (out.nu < r && power.norm() > Scalar(64) * machine_epsilon<Scalar>() * std::pow(scale, Scalar(out.nu))) {
    power = power * out.n;
    ++out.nu;
  }
  return out;
}

/// Evaluates the right-hand side of the Weierstrass transfer representation at s.
template <typename Scalar>
ComplexMatrix<Scalar> weierstrass_transfer(const WeierstrassSplit<Scalar>& w, std::complex<Scalar> s) {
  using Complex = std::complex<Scalar>;
  ComplexMatrix<Scalar> g = w.d.template cast<Complex>();
  const Eigen::Index k = w.j.rows();
  if (k > 0) {
    const ComplexMatrix<Scalar> pencil =
        s * ComplexMatrix<Scalar>::Identity(k, k) - w.j.template cast<Complex>();
    g += w.c_j.template cast<Complex>() * pencil.partialPivLu().solve(w.b_j.template cast<Complex>());
  }
  if (w.n.rows() > 0) {
    ComplexMatrix<Scalar> term = w.b_n.template cast<Complex>();
    Complex si(1);
    for (Eigen::Index i = 0; i < w.nu; ++i) {
      g -= si * (w.c_n.template cast<Complex>() * term);
      term = w.n.template cast<Complex>() * term;
      si *= s;
    }
  }
  return g;
}

}  // namespace stablekit
