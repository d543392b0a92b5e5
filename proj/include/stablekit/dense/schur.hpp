#pragma once

#include "stablekit/dense/common.hpp"
#include "stablekit/dense/quasi_triangular.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <complex>
#include <functional>
#include <vector>

namespace stablekit {

/// Q * M * Q^T = T with T quasi upper triangular.
template <typename Scalar>
struct RealSchurResult {
  Matrix<Scalar> q;
  Matrix<Scalar> t;
  /// Number of leading rows whose eigenvalues are nonzero (after ordering).
  Eigen::Index nonzero_count = 0;
};

namespace detail {

template <typename Scalar>
std::vector<std::complex<Scalar>> schur_block_eigenvalues(const Matrix<Scalar>& t, const Block& b) {
  if (b.size == 1) return {std::complex<Scalar>(t(b.start, b.start), 0)};
  const Scalar a = t(b.start, b.start), bb = t(b.start, b.start + 1);
  const Scalar c = t(b.start + 1, b.start), d = t(b.start + 1, b.start + 1);
  const Scalar tr = a + d, det = a * d - bb * c;
  const std::complex<Scalar> disc = std::sqrt(std::complex<Scalar>(tr * tr / 4 - det, 0));
  return {tr / Scalar(2) + disc, tr / Scalar(2) - disc};
}

template <typename Scalar>
void standardize_schur_2x2(Matrix<Scalar>& t, Matrix<Scalar>& q, Eigen::Index p) {
  const Eigen::Index n = t.rows();
  Eigen::RealSchur<Matrix<Scalar>> rs(t.block(p, p, 2, 2).eval());
  if (rs.info() != Eigen::Success) return;
  const Matrix<Scalar> w = rs.matrixU();  // block = W T W^T
  t.block(p, p, 2, n - p) = w.transpose() * t.block(p, p, 2, n - p);
  t.block(0, p, p + 2, 2) = t.block(0, p, p + 2, 2) * w;
  q.middleRows(p, 2) = w.transpose() * q.middleRows(p, 2);
  const Scalar local = std::abs(t(p, p)) + std::abs(t(p + 1, p + 1));
  if (std::abs(t(p + 1, p)) <= machine_epsilon<Scalar>() * local) t(p + 1, p) = 0;
}

template <typename Scalar>
void swap_schur_blocks(Matrix<Scalar>& t, Matrix<Scalar>& q, Eigen::Index p, Eigen::Index n1,
                       Eigen::Index n2) {
  const Eigen::Index n = t.rows();
  const Eigen::Index m = n1 + n2;
  const Matrix<Scalar> a11 = t.block(p, p, n1, n1);
  const Matrix<Scalar> a12 = t.block(p, p + n1, n1, n2);
  const Matrix<Scalar> a22 = t.block(p + n1, p + n1, n2, n2);
  Matrix<Scalar> x, unused;
  // A11 X - X A22 = -A12 as the coupled system with identity E blocks.
  if (!solve_small_coupled_sylvester<Scalar>(a11, a22, Matrix<Scalar>::Identity(n1, n1),
                                             Matrix<Scalar>::Identity(n2, n2), -a12,
                                             Matrix<Scalar>::Zero(n1, n2), x, unused)) {
    throw Error(ErrorCode::ConvergenceFailure, "Schur block swap: blocks share eigenvalues");
  }
  Matrix<Scalar> basis(m, n2);
  basis << x, Matrix<Scalar>::Identity(n2, n2);
  const Matrix<Scalar> w = Eigen::HouseholderQR<Matrix<Scalar>>(basis).householderQ() * Matrix<Scalar>::Identity(m, m);
  t.block(p, p, m, n - p) = w.transpose() * t.block(p, p, m, n - p);
  t.block(0, p, p + m, m) = t.block(0, p, p + m, m) * w;
  q.middleRows(p, m) = w.transpose() * q.middleRows(p, m);

  const Scalar local = t.block(p, p, m, m).norm();
  const Scalar leak = t.block(p + n2, p, n1, n2).norm();
  if (leak > Scalar(1e3) * machine_epsilon<Scalar>() * std::max(local, Scalar(1))) {
    throw Error(ErrorCode::ConvergenceFailure, "Schur block swap rejected: ill-conditioned reordering");
  }
  t.block(p + n2, p, n1, n2).setZero();
  if (n2 == 2) standardize_schur_2x2(t, q, p);
  if (n1 == 2) standardize_schur_2x2(t, q, p + n2);
}

}  // namespace detail

/// Real Schur decomposition Q M Q^T = T. Eigenvalues with |lambda| <= zero_tol * ||M||_F
/// are moved to the trailing diagonal block.
template <typename Scalar>
RealSchurResult<Scalar> real_schur(const Matrix<Scalar>& m, Scalar zero_tol = Scalar(1e-10)) {
  require_square(m, "M");
  require_finite(m, "M");
  const Eigen::Index n = m.rows();
  RealSchurResult<Scalar> out;
  if (n == 0) {
    out.q = out.t = Matrix<Scalar>(0, 0);
    return out;
  }
  Eigen::RealSchur<Matrix<Scalar>> rs(n);
  rs.setMaxIterations(400 * n);
  rs.compute(m, true);
  if (rs.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure, "real Schur iteration did not converge");
  }
  out.t = rs.matrixT();
  out.q = rs.matrixU().transpose();
  detail::clean_quasi_triangular(out.t);

  const Scalar threshold = zero_tol * m.norm();
  auto is_nonzero = [&](Eigen::Index pos, Eigen::Index size) {
    const auto evs = detail::schur_block_eigenvalues(out.t, detail::Block{pos, size});
    return std::abs(evs.front()) > threshold;
  };
  Eigen::Index k = 0;
  Eigen::Index pos = 0;
  while (pos < n) {
    const Eigen::Index size = (pos + 1 < n && out.t(pos + 1, pos) != 0) ? 2 : 1;
    if (is_nonzero(pos, size)) {
      Eigen::Index cur = pos;
      while (cur > k) {
        const Eigen::Index prev = (cur - 2 >= k && out.t(cur - 1, cur - 2) != 0) ? 2 : 1;
        detail::swap_schur_blocks(out.t, out.q, cur - prev, prev, size);
        cur -= prev;
      }
      k += size;
    }
    pos += size;
  }
  out.nonzero_count = k;
  return out;
}

/// Eigenvalues read off the diagonal blocks of a quasi-triangular matrix.
template <typename Scalar>
std::vector<std::complex<Scalar>> quasi_triangular_eigenvalues(const Matrix<Scalar>& t) {
  std::vector<std::complex<Scalar>> out;
  for (const auto& b : detail::quasi_blocks(t)) {
    const auto evs = detail::schur_block_eigenvalues(t, b);
    out.insert(out.end(), evs.begin(), evs.end());
  }
  return out;
}

}  // namespace stablekit
