#pragma once

#include "stablekit/dense/common.hpp"
#include "stablekit/dense/qz.hpp"

#include <Eigen/LU>

#include <string>

namespace stablekit {

/// Linear time-invariant descriptor system  E x' = A x + B u,  y = C x + D u
/// with n states, m inputs and p outputs. The pencil (E, A) is regular.
template <typename Scalar>
class DescriptorSystem {
 public:
  using MatrixType = Matrix<Scalar>;

  DescriptorSystem() : DescriptorSystem(empty(0, 0)) {}

  /// Validates dimensions, finiteness and pencil regularity.
  DescriptorSystem(MatrixType e, MatrixType a, MatrixType b, MatrixType c, MatrixType d)
      : e_(std::move(e)), a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {
    validate_shapes();
    if (states() > 0) {
      // Throws SingularPencil.
      (void)pencil_eigenvalues<Scalar>(e_, a_);
    }
  }

  /// Skips the regularity check; for results of operations that preserve regularity.
  static DescriptorSystem trusted(MatrixType e, MatrixType a, MatrixType b, MatrixType c, MatrixType d) {
    DescriptorSystem s(Unchecked{}, std::move(e), std::move(a), std::move(b), std::move(c), std::move(d));
    s.validate_shapes();
    return s;
  }

  /// n = 0 system whose transfer function is the constant D.
  static DescriptorSystem empty(Eigen::Index outputs, Eigen::Index inputs) {
    return empty(MatrixType::Zero(outputs, inputs));
  }

  static DescriptorSystem empty(const MatrixType& d) {
    return trusted(MatrixType(0, 0), MatrixType(0, 0), MatrixType(0, d.cols()), MatrixType(d.rows(), 0), d);
  }

  /// Standard system (E = I).
  static DescriptorSystem standard(const MatrixType& a, const MatrixType& b, const MatrixType& c,
                                   const MatrixType& d) {
    return trusted(MatrixType::Identity(a.rows(), a.rows()), a, b, c, d);
  }

  const MatrixType& e() const { return e_; }
  const MatrixType& a() const { return a_; }
  const MatrixType& b() const { return b_; }
  const MatrixType& c() const { return c_; }
  const MatrixType& d() const { return d_; }

  Eigen::Index states() const { return a_.rows(); }
  Eigen::Index inputs() const { return b_.cols(); }
  Eigen::Index outputs() const { return c_.rows(); }

  bool is_standard(Scalar tol = Scalar(0)) const {
    return states() == 0 || (e_ - MatrixType::Identity(states(), states())).cwiseAbs().maxCoeff() <= tol;
  }

  friend bool operator==(const DescriptorSystem& x, const DescriptorSystem& y) {
    auto same = [](const MatrixType& u, const MatrixType& v) {
      return u.rows() == v.rows() && u.cols() == v.cols() && (u.size() == 0 || u == v);
    };
    return same(x.e_, y.e_) && same(x.a_, y.a_) && same(x.b_, y.b_) && same(x.c_, y.c_) && same(x.d_, y.d_);
  }

 private:
  struct Unchecked {};
  DescriptorSystem(Unchecked, MatrixType e, MatrixType a, MatrixType b, MatrixType c, MatrixType d)
      : e_(std::move(e)), a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)) {}

  void validate_shapes() const {
    const Eigen::Index n = a_.rows();
    require_dims(a_.cols() == n, "A must be square");
    require_dims(e_.rows() == n && e_.cols() == n, "E must be n x n");
    require_dims(b_.rows() == n, "B must have n rows");
    require_dims(c_.cols() == n, "C must have n columns");
    require_dims(d_.rows() == c_.rows() && d_.cols() == b_.cols(), "D must be p x m");
    require_finite(e_, "E");
    require_finite(a_, "A");
    require_finite(b_, "B");
    require_finite(c_, "C");
    require_finite(d_, "D");
  }

  MatrixType e_, a_, b_, c_, d_;
};

/// S1 (+) S2: block-diagonal realization of F_S1 + F_S2.
template <typename Scalar>
DescriptorSystem<Scalar> direct_sum(const DescriptorSystem<Scalar>& s1, const DescriptorSystem<Scalar>& s2) {
  require_dims(s1.inputs() == s2.inputs() && s1.outputs() == s2.outputs(),
               "direct sum needs matching input/output dimensions");
  const Eigen::Index n1 = s1.states(), n2 = s2.states(), n = n1 + n2;
  Matrix<Scalar> e = Matrix<Scalar>::Zero(n, n), a = Matrix<Scalar>::Zero(n, n);
  e.topLeftCorner(n1, n1) = s1.e();
  e.bottomRightCorner(n2, n2) = s2.e();
  a.topLeftCorner(n1, n1) = s1.a();
  a.bottomRightCorner(n2, n2) = s2.a();
  Matrix<Scalar> b(n, s1.inputs());
  b << s1.b(), s2.b();
  Matrix<Scalar> c(s1.outputs(), n);
  c << s1.c(), s2.c();
  return DescriptorSystem<Scalar>::trusted(std::move(e), std::move(a), std::move(b), std::move(c),
                                           s1.d() + s2.d());
}

/// Restricted system equivalence <P S Q> = (P E Q, P A Q, P B, C Q, D).
template <typename Scalar>
DescriptorSystem<Scalar> rse_transform(const Matrix<Scalar>& p, const DescriptorSystem<Scalar>& s,
                                       const Matrix<Scalar>& q) {
  const Eigen::Index n = s.states();
  require_dims(p.rows() == n && p.cols() == n && q.rows() == n && q.cols() == n, "P and Q must be n x n");
  require_finite(p, "P");
  require_finite(q, "Q");
  if (n > 0) {
    Eigen::FullPivLU<Matrix<Scalar>> lp(p), lq(q);
    if (!lp.isInvertible() || !lq.isInvertible()) {
      throw Error(ErrorCode::SingularTransform, "r.s.e. transform needs regular P and Q");
    }
  }
  return DescriptorSystem<Scalar>::trusted(p * s.e() * q, p * s.a() * q, p * s.b(), s.c() * q, s.d());
}

/// Negated system (E, A, B, -C, -D), whose transfer function is -F_S.
template <typename Scalar>
DescriptorSystem<Scalar> negate(const DescriptorSystem<Scalar>& s) {
  return DescriptorSystem<Scalar>::trusted(s.e(), s.a(), s.b(), -s.c(), -s.d());
}

}  // namespace stablekit
