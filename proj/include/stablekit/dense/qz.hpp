#pragma once

#include "stablekit/dense/common.hpp"
#include "stablekit/dense/quasi_triangular.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <cmath>
#include <functional>
#include <vector>

namespace stablekit {

/// A generalized eigenvalue of a pencil (E, A): root of det(lambda E - A), or infinity.
template <typename Scalar>
struct GeneralizedEigenvalue {
  std::complex<Scalar> value{};
  bool infinite = false;
};

template <typename Scalar>
using EigenvalueSelector = std::function<bool(const GeneralizedEigenvalue<Scalar>&)>;

/// Selects eigenvalues with Re < 0 together with infinite ones.
template <typename Scalar>
EigenvalueSelector<Scalar> select_stable_or_infinite() {
  return [](const GeneralizedEigenvalue<Scalar>& ev) { return ev.infinite || ev.value.real() < 0; };
}

/// Selects the finite eigenvalues, pushing infinite ones to the trailing block.
template <typename Scalar>
EigenvalueSelector<Scalar> select_finite() {
  return [](const GeneralizedEigenvalue<Scalar>& ev) { return !ev.infinite; };
}

template <typename Scalar>
Scalar default_pencil_tol(Eigen::Index n) {
  return Scalar(32) * Scalar(std::max<Eigen::Index>(n, 1)) * machine_epsilon<Scalar>();
}

/// U * E * V = et, U * A * V = at, with the leading split x split pencil holding exactly
/// the selected eigenvalues.
template <typename Scalar>
struct OrderedQz {
  Matrix<Scalar> u;
  Matrix<Scalar> v;
  Matrix<Scalar> et;
  Matrix<Scalar> at;
  Eigen::Index split = 0;
  /// Eigenvalues in diagonal order (a 2x2 block contributes its conjugate pair).
  std::vector<GeneralizedEigenvalue<Scalar>> eigenvalues;
};

namespace detail {

template <typename Scalar>
struct PencilState {
  Matrix<Scalar> s;  // A part, quasi upper triangular
  Matrix<Scalar> t;  // E part, upper triangular (2x2 blocks may be full after swaps)
  Matrix<Scalar> u;  // accumulated left transform
  Matrix<Scalar> v;  // accumulated right transform
  Scalar norm_e = 0;
  Scalar norm_a = 0;
};

template <typename Scalar>
std::vector<GeneralizedEigenvalue<Scalar>> block_eigenvalues(const Matrix<Scalar>& s,
                                                             const Matrix<Scalar>& t,
                                                             const Block& b, Scalar inf_tol) {
  std::vector<GeneralizedEigenvalue<Scalar>> out;
  if (b.size == 1) {
    const Scalar a = s(b.start, b.start);
    const Scalar e = t(b.start, b.start);
    GeneralizedEigenvalue<Scalar> ev;
    if (std::abs(e) <= inf_tol) {
      ev.infinite = true;
    } else {
      ev.value = std::complex<Scalar>(a / e, 0);
    }
    out.push_back(ev);
    return out;
  }
  const Matrix<Scalar> sb = s.block(b.start, b.start, 2, 2);
  const Matrix<Scalar> tb = t.block(b.start, b.start, 2, 2);
  // det(l T - S) = l^2 det T - l (t00 s11 + t11 s00 - t01 s10 - t10 s01) + det S
  const Scalar qa = tb.determinant();
  const Scalar qb = -(tb(0, 0) * sb(1, 1) + tb(1, 1) * sb(0, 0) - tb(0, 1) * sb(1, 0) - tb(1, 0) * sb(0, 1));
  const Scalar qc = sb.determinant();
  if (std::abs(qa) <= inf_tol * (std::abs(tb(0, 0)) + std::abs(tb(1, 1)) + inf_tol)) {
    // Degenerate 2x2 block: fall back to two infinite/finite readouts.
    GeneralizedEigenvalue<Scalar> inf;
    inf.infinite = true;
    out.push_back(inf);
    GeneralizedEigenvalue<Scalar> fin;
    if (std::abs(qb) > 0) fin.value = std::complex<Scalar>(-qc / qb, 0); else fin.infinite = true;
    out.push_back(fin);
    return out;
  }
  const std::complex<Scalar> disc = std::sqrt(std::complex<Scalar>(qb * qb - Scalar(4) * qa * qc, 0));
  GeneralizedEigenvalue<Scalar> e1, e2;
  e1.value = (-qb + disc) / (Scalar(2) * qa);
  e2.value = (-qb - disc) / (Scalar(2) * qa);
  if (e1.value.imag() < 0) std::swap(e1, e2);
  out.push_back(e1);
  out.push_back(e2);
  return out;
}

/// Restores the standard form of a 2x2 diagonal block pair (T block upper triangular).
template <typename Scalar>
void standardize_2x2(PencilState<Scalar>& st, Eigen::Index p) {
  const Eigen::Index n = st.s.rows();
  const Matrix<Scalar> sb = st.s.block(p, p, 2, 2);
  const Matrix<Scalar> tb = st.t.block(p, p, 2, 2);
  Eigen::RealQZ<Matrix<Scalar>> qz(2);
  qz.compute(sb, tb, true);
  if (qz.info() != Eigen::Success) return;
  const Matrix<Scalar> qt = qz.matrixQ().transpose();
  const Matrix<Scalar> zt = qz.matrixZ().transpose();
  st.s.block(p, p, 2, n - p) = qt * st.s.block(p, p, 2, n - p);
  st.t.block(p, p, 2, n - p) = qt * st.t.block(p, p, 2, n - p);
  st.s.block(0, p, p + 2, 2) = st.s.block(0, p, p + 2, 2) * zt;
  st.t.block(0, p, p + 2, 2) = st.t.block(0, p, p + 2, 2) * zt;
  st.u.middleRows(p, 2) = qt * st.u.middleRows(p, 2);
  st.v.middleCols(p, 2) = st.v.middleCols(p, 2) * zt;
  st.t(p + 1, p) = 0;
  const Scalar local = std::abs(st.s(p, p)) + std::abs(st.s(p + 1, p + 1));
  if (std::abs(st.s(p + 1, p)) <= machine_epsilon<Scalar>() * local) st.s(p + 1, p) = 0;
}

/// Swaps the adjacent diagonal blocks of sizes n1 (at p) and n2 (at p + n1).
template <typename Scalar>
void swap_blocks(PencilState<Scalar>& st, Eigen::Index p, Eigen::Index n1, Eigen::Index n2) {
  const Eigen::Index n = st.s.rows();
  const Eigen::Index m = n1 + n2;
  const Matrix<Scalar> a11 = st.s.block(p, p, n1, n1);
  const Matrix<Scalar> a12 = st.s.block(p, p + n1, n1, n2);
  const Matrix<Scalar> a22 = st.s.block(p + n1, p + n1, n2, n2);
  const Matrix<Scalar> e11 = st.t.block(p, p, n1, n1);
  const Matrix<Scalar> e12 = st.t.block(p, p + n1, n1, n2);
  const Matrix<Scalar> e22 = st.t.block(p + n1, p + n1, n2, n2);

  Matrix<Scalar> r, l;
  if (!solve_small_coupled_sylvester<Scalar>(a11, a22, e11, e22, -a12, -e12, r, l)) {
    throw Error(ErrorCode::ConvergenceFailure, "block swap: adjacent blocks share eigenvalues");
  }
  // Deflating bases of the second block: A [R; I] = [L; I] A22, E [R; I] = [L; I] E22.
  Matrix<Scalar> right(m, n2), left(m, n2);
  right << r, Matrix<Scalar>::Identity(n2, n2);
  left << l, Matrix<Scalar>::Identity(n2, n2);
  const Matrix<Scalar> zs = Eigen::HouseholderQR<Matrix<Scalar>>(right).householderQ() * Matrix<Scalar>::Identity(m, m);
  const Matrix<Scalar> qs = Eigen::HouseholderQR<Matrix<Scalar>>(left).householderQ() * Matrix<Scalar>::Identity(m, m);
  const Matrix<Scalar> qst = qs.transpose();

  st.s.block(p, p, m, n - p) = qst * st.s.block(p, p, m, n - p);
  st.t.block(p, p, m, n - p) = qst * st.t.block(p, p, m, n - p);
  st.s.block(0, p, p + m, m) = st.s.block(0, p, p + m, m) * zs;
  st.t.block(0, p, p + m, m) = st.t.block(0, p, p + m, m) * zs;
  st.u.middleRows(p, m) = qst * st.u.middleRows(p, m);
  st.v.middleCols(p, m) = st.v.middleCols(p, m) * zs;

  const Scalar local = st.s.block(p, p, m, m).norm() + st.t.block(p, p, m, m).norm();
  const Scalar leak = st.s.block(p + n2, p, n1, n2).norm() + st.t.block(p + n2, p, n1, n2).norm();
  if (leak > Scalar(1e3) * machine_epsilon<Scalar>() * std::max(local, Scalar(1))) {
    throw Error(ErrorCode::ConvergenceFailure, "block swap rejected: ill-conditioned reordering");
  }
  st.s.block(p + n2, p, n1, n2).setZero();
  st.t.block(p + n2, p, n1, n2).setZero();

  // New block at p has size n2, the one at p + n2 has size n1.
  if (n2 == 2) standardize_2x2(st, p);
  if (n1 == 2) standardize_2x2(st, p + n2);
}

/// Generalized real Schur form with infinite eigenvalues deflated first. Rank-revealing
/// steps on E split off the infinite part exactly: its diagonal entries in T are zero and
/// it trails the finite part. Plain QZ perturbs Jordan chains at infinity by O(sqrt(eps))
/// and can report them as huge finite eigenvalues.
template <typename Scalar>
PencilState<Scalar> unordered_qz(const Matrix<Scalar>& e, const Matrix<Scalar>& a, Scalar tol = Scalar(-1)) {
  const Eigen::Index n = a.rows();
  if (tol < 0) tol = default_pencil_tol<Scalar>(n);
  PencilState<Scalar> st;
  st.norm_e = e.norm();
  st.norm_a = a.norm();
  st.s = a;
  st.t = e;
  st.u = Matrix<Scalar>::Identity(n, n);
  st.v = Matrix<Scalar>::Identity(n, n);
  if (n == 0) return st;

  Eigen::Index f = n;
  while (f > 0) {
    Eigen::JacobiSVD<Matrix<Scalar>> svd_e(st.t.topLeftCorner(f, f), Eigen::ComputeFullU);
    const auto& sv = svd_e.singularValues();
    Eigen::Index r = 0;
    while (r < f && sv(r) > tol * st.norm_e) ++r;
    if (r == f) break;
    const Eigen::Index z = f - r;

    const Matrix<Scalar> ut = svd_e.matrixU().transpose();
    st.t.topRows(f) = ut * st.t.topRows(f);
    st.s.topRows(f) = ut * st.s.topRows(f);
    st.u.topRows(f) = ut * st.u.topRows(f);
    st.t.block(r, 0, z, f).setZero();

    // Rows of A facing the zero rows of E must have full rank, else the pencil is singular.
    Eigen::JacobiSVD<Matrix<Scalar>> svd_a(st.s.block(r, 0, z, f), Eigen::ComputeFullV);
    if (!(svd_a.singularValues()(z - 1) > tol * (st.norm_e + st.norm_a))) {
      throw Error(ErrorCode::SingularPencil, "pencil is singular: rank deficiency shared by E and A");
    }
    Matrix<Scalar> zm(f, f);
    zm << svd_a.matrixV().rightCols(r), svd_a.matrixV().leftCols(z);
    st.s.leftCols(f) = st.s.leftCols(f) * zm;
    st.t.leftCols(f) = st.t.leftCols(f) * zm;
    st.v.leftCols(f) = st.v.leftCols(f) * zm;
    st.s.block(r, 0, z, r).setZero();

    Eigen::HouseholderQR<Matrix<Scalar>> qr(st.s.block(r, r, z, z));
    const Matrix<Scalar> qt = (qr.householderQ() * Matrix<Scalar>::Identity(z, z)).transpose();
    st.s.block(r, r, z, n - r) = qt * st.s.block(r, r, z, n - r);
    st.t.block(r, r, z, n - r) = qt * st.t.block(r, r, z, n - r);
    st.u.middleRows(r, z) = qt * st.u.middleRows(r, z);
    st.s.block(r, r, z, z).template triangularView<Eigen::StrictlyLower>().setZero();
    st.t.block(r, r, z, z).setZero();
    f = r;
  }

  if (f > 0) {
    Eigen::RealQZ<Matrix<Scalar>> qz(f);
    qz.setMaxIterations(400 * f);
    qz.compute(st.s.topLeftCorner(f, f), st.t.topLeftCorner(f, f), true);
    if (qz.info() != Eigen::Success) {
      throw Error(ErrorCode::ConvergenceFailure, "QZ iteration did not converge");
    }
    // Eigen convention: A = Q S Z, E = Q T Z.
    const Matrix<Scalar> qt = qz.matrixQ().transpose();
    const Matrix<Scalar> zt = qz.matrixZ().transpose();
    st.s.topRightCorner(f, n - f) = qt * st.s.topRightCorner(f, n - f);
    st.t.topRightCorner(f, n - f) = qt * st.t.topRightCorner(f, n - f);
    st.s.topLeftCorner(f, f) = qz.matrixS();
    st.t.topLeftCorner(f, f) = qz.matrixT();
    st.u.topRows(f) = qt * st.u.topRows(f);
    st.v.leftCols(f) = st.v.leftCols(f) * zt;
  }
  clean_quasi_triangular(st.s);
  clean_upper_triangular(st.t);
  return st;
}

template <typename Scalar>
void check_regular(const PencilState<Scalar>& st, Scalar tol) {
  const Scalar scale = tol * (st.norm_e + st.norm_a);
  for (const Block& b : quasi_blocks(st.s)) {
    if (b.size != 1) continue;
    const Eigen::Index i = b.start;
    if (std::max(std::abs(st.t(i, i)), std::abs(st.s(i, i))) <= scale) {
      throw Error(ErrorCode::SingularPencil,
                  "pencil is singular: diagonal pair (" + std::to_string(double(st.t(i, i))) + ", " +
                      std::to_string(double(st.s(i, i))) + ") at index " + std::to_string(i));
    }
  }
}

template <typename Scalar>
std::vector<GeneralizedEigenvalue<Scalar>> all_eigenvalues(const PencilState<Scalar>& st, Scalar tol) {
  std::vector<GeneralizedEigenvalue<Scalar>> out;
  const Scalar inf_tol = tol * st.norm_e;
  for (const Block& b : quasi_blocks(st.s)) {
    auto evs = block_eigenvalues(st.s, st.t, b, inf_tol);
    out.insert(out.end(), evs.begin(), evs.end());
  }
  return out;
}

}  // namespace detail

/// Generalized eigenvalues of the regular pencil (E, A), in QZ diagonal order.
template <typename Scalar>
std::vector<GeneralizedEigenvalue<Scalar>> pencil_eigenvalues(const Matrix<Scalar>& e,
                                                              const Matrix<Scalar>& a,
                                                              Scalar tol = Scalar(-1)) {
  require_square(e, "E");
  require_square(a, "A");
  require_dims(e.rows() == a.rows(), "E and A must have equal size");
  require_finite(e, "E");
  require_finite(a, "A");
  if (tol < 0) tol = default_pencil_tol<Scalar>(a.rows());
  const auto st = detail::unordered_qz(e, a, tol);
  detail::check_regular(st, tol);
  return detail::all_eigenvalues(st, tol);
}

/// Generalized real Schur form of (E, A) with the selected eigenvalues moved to the
/// leading block. Throws SingularPencil when a diagonal pair vanishes.
template <typename Scalar>
OrderedQz<Scalar> qz_ordered(const Matrix<Scalar>& e, const Matrix<Scalar>& a,
                             const EigenvalueSelector<Scalar>& selector, Scalar tol = Scalar(-1)) {
  require_square(e, "E");
  require_square(a, "A");
  require_dims(e.rows() == a.rows(), "E and A must have equal size");
  require_finite(e, "E");
  require_finite(a, "A");
  const Eigen::Index n = a.rows();
  if (tol < 0) tol = default_pencil_tol<Scalar>(n);

  auto st = detail::unordered_qz(e, a, tol);
  detail::check_regular(st, tol);
  const Scalar inf_tol = tol * st.norm_e;

  Eigen::Index k = 0;  // end of the selected leading region
  Eigen::Index pos = 0;
  while (pos < n) {
    const Eigen::Index size = (pos + 1 < n && st.s(pos + 1, pos) != 0) ? 2 : 1;
    const auto evs = detail::block_eigenvalues(st.s, st.t, detail::Block{pos, size}, inf_tol);
    if (selector(evs.front())) {
      Eigen::Index cur = pos;
      while (cur > k) {
        const Eigen::Index prev_size = (cur - 2 >= k && st.s(cur - 1, cur - 2) != 0) ? 2 : 1;
        detail::swap_blocks(st, cur - prev_size, prev_size, size);
        cur -= prev_size;
      }
      k += size;
    }
    pos += size;
  }

  // Swaps leave O(eps) residue on the diagonal of T at infinite eigenvalues; pin it to zero
  // so the blocks stay recognizably infinite when extracted on their own.
  for (const detail::Block& b : detail::quasi_blocks(st.s)) {
    if (b.size == 1 && std::abs(st.t(b.start, b.start)) <= inf_tol) st.t(b.start, b.start) = 0;
  }

  OrderedQz<Scalar> out;
  out.eigenvalues = detail::all_eigenvalues(st, tol);
  out.u = std::move(st.u);
  out.v = std::move(st.v);
  out.et = std::move(st.t);
  out.at = std::move(st.s);
  out.split = k;
  return out;
}

}  // namespace stablekit
