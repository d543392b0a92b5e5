#pragma once

#include "stablekit/dense/common.hpp"

#include <Eigen/LU>

#include <cmath>
#include <utility>
#include <vector>

namespace stablekit::detail {

struct Block {
  Eigen::Index start;
  Eigen::Index size;  // 1 or 2
};

/// Diagonal block structure of a quasi-upper-triangular matrix (exact zeros on the
/// subdiagonal separate blocks).
template <typename Derived>
std::vector<Block> quasi_blocks(const Eigen::MatrixBase<Derived>& s) {
  std::vector<Block> blocks;
  const Eigen::Index n = s.rows();
  Eigen::Index i = 0;
  while (i < n) {
    if (i + 1 < n && s(i + 1, i) != 0) {
      blocks.push_back({i, 2});
      i += 2;
    } else {
      blocks.push_back({i, 1});
      i += 1;
    }
  }
  return blocks;
}

/// Flush numerically negligible subdiagonal entries and everything below the first
/// subdiagonal to exact zero.
template <typename Scalar>
void clean_quasi_triangular(Matrix<Scalar>& s) {
  const Eigen::Index n = s.rows();
  const Scalar eps = machine_epsilon<Scalar>();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 2; i < n; ++i) s(i, j) = 0;
  }
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const Scalar local = std::abs(s(i, i)) + std::abs(s(i + 1, i + 1));
    if (std::abs(s(i + 1, i)) <= eps * local) s(i + 1, i) = 0;
  }
  // Two consecutive nonzero subdiagonals cannot both start 2x2 blocks.
  for (Eigen::Index i = 0; i + 2 < n; ++i) {
    if (s(i + 1, i) != 0 && s(i + 2, i + 1) != 0) {
      if (std::abs(s(i + 2, i + 1)) < std::abs(s(i + 1, i))) {
        s(i + 2, i + 1) = 0;
      } else {
        s(i + 1, i) = 0;
      }
    }
  }
}

template <typename Scalar>
void clean_upper_triangular(Matrix<Scalar>& t) {
  t.template triangularView<Eigen::StrictlyLower>().setZero();
}

/// Solves the small coupled system  A1 R - L A3 = F,  E1 R - L E3 = G  by vectorization.
/// Blocks are at most a few rows; used on 1x1/2x2 diagonal blocks. Returns false when the
/// Kronecker matrix is numerically singular.
template <typename Scalar>
bool solve_small_coupled_sylvester(const Matrix<Scalar>& a1, const Matrix<Scalar>& a3,
                                   const Matrix<Scalar>& e1, const Matrix<Scalar>& e3,
                                   const Matrix<Scalar>& f, const Matrix<Scalar>& g,
                                   Matrix<Scalar>& r, Matrix<Scalar>& l) {
  const Eigen::Index p = a1.rows();
  const Eigen::Index q = a3.rows();
  const Eigen::Index k = p * q;
  Matrix<Scalar> kron = Matrix<Scalar>::Zero(2 * k, 2 * k);
  // vec(A1 R) = (I_q kron A1) vec R, vec(L A3) = (A3^T kron I_p) vec L
  for (Eigen::Index j = 0; j < q; ++j) {
    kron.block(j * p, j * p, p, p) = a1;
    kron.block(k + j * p, j * p, p, p) = e1;
    for (Eigen::Index i = 0; i < q; ++i) {
      kron.block(j * p, k + i * p, p, p) -= a3(i, j) * Matrix<Scalar>::Identity(p, p);
      kron.block(k + j * p, k + i * p, p, p) -= e3(i, j) * Matrix<Scalar>::Identity(p, p);
    }
  }
  Vector<Scalar> rhs(2 * k);
  rhs.head(k) = Eigen::Map<const Vector<Scalar>>(f.data(), k);
  rhs.tail(k) = Eigen::Map<const Vector<Scalar>>(g.data(), k);

  Eigen::FullPivLU<Matrix<Scalar>> lu(kron);
  const Scalar scale = std::max(kron.cwiseAbs().maxCoeff(), Scalar(1e-300));
  const Scalar min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (min_pivot <= Scalar(64) * machine_epsilon<Scalar>() * scale) return false;
  const Vector<Scalar> x = lu.solve(rhs);
  r = Eigen::Map<const Matrix<Scalar>>(x.data(), p, q);
  l = Eigen::Map<const Matrix<Scalar>>(x.data() + k, p, q);
  return true;
}

/// Solves the small standard Sylvester system  A X + X B = C  by vectorization.
template <typename Scalar>
bool solve_small_sylvester(const Matrix<Scalar>& a, const Matrix<Scalar>& b, const Matrix<Scalar>& c,
                           Matrix<Scalar>& x) {
  const Eigen::Index p = a.rows();
  const Eigen::Index q = b.rows();
  const Eigen::Index k = p * q;
  Matrix<Scalar> kron = Matrix<Scalar>::Zero(k, k);
  for (Eigen::Index j = 0; j < q; ++j) {
    kron.block(j * p, j * p, p, p) += a;
    for (Eigen::Index i = 0; i < q; ++i) {
      kron.block(j * p, i * p, p, p) += b(i, j) * Matrix<Scalar>::Identity(p, p);
    }
  }
  Eigen::FullPivLU<Matrix<Scalar>> lu(kron);
  const Scalar scale = std::max(kron.cwiseAbs().maxCoeff(), Scalar(1e-300));
  const Scalar min_pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (min_pivot <= Scalar(64) * machine_epsilon<Scalar>() * scale) return false;
  const Vector<Scalar> sol = lu.solve(Eigen::Map<const Vector<Scalar>>(c.data(), k).eval());
  x = Eigen::Map<const Matrix<Scalar>>(sol.data(), p, q);
  return true;
}

}  // namespace stablekit::detail
