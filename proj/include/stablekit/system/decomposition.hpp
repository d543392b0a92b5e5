#pragma once

#include "stablekit/system/descriptor_system.hpp"
#include "stablekit/system/spectrum.hpp"
#include "stablekit/system/weierstrass.hpp"

#include <sstream>

namespace stablekit {

/// S ~ s_plus (+) s_minus with s_plus stable (infinite eigenvalues allowed, carries D) and
/// s_minus antistable with zero feedthrough. rse_transform(p, S, q) == direct_sum(s_plus, s_minus).
template <typename Scalar>
struct AdditiveDecomposition {
  DescriptorSystem<Scalar> s_plus;
  DescriptorSystem<Scalar> s_minus;
  Matrix<Scalar> p, q;
};

/// Throws AxisEigenvalueError for the first finite eigenvalue within the axis band.
template <typename Scalar>
void require_axis_free(const std::vector<GeneralizedEigenvalue<Scalar>>& evs, Scalar axis_tol = Scalar(1e-10)) {
  for (const auto& ev : evs) {
    if (!ev.infinite && on_axis(ev.value, axis_tol)) {
      std::ostringstream msg;
      msg << "eigenvalue " << ev.value << " lies on the imaginary axis (tolerance " << axis_tol << ")";
      throw AxisEigenvalueError(std::complex<double>(double(ev.value.real()), double(ev.value.imag())), msg.str());
    }
  }
}

template <typename Scalar>
AdditiveDecomposition<Scalar> additive_decompose(const DescriptorSystem<Scalar>& s, Scalar axis_tol = Scalar(1e-10)) {
  const Eigen::Index n = s.states();
  const auto qz = qz_ordered<Scalar>(s.e(), s.a(), select_stable_or_infinite<Scalar>());
  require_axis_free(qz.eigenvalues, axis_tol);
  const Eigen::Index k = qz.split, r = n - k;

  Matrix<Scalar> p, q;
  detail::block_diagonalize(qz, p, q);
  const Matrix<Scalar> pb = p * s.b();
  const Matrix<Scalar> cq = s.c() * q;

  using Sys = DescriptorSystem<Scalar>;
  const Matrix<Scalar> e1 = qz.et.topLeftCorner(k, k).template triangularView<Eigen::Upper>();
  const Matrix<Scalar> e3 = qz.et.bottomRightCorner(r, r).template triangularView<Eigen::Upper>();
  AdditiveDecomposition<Scalar> out{
      Sys::trusted(e1, qz.at.topLeftCorner(k, k), pb.topRows(k), cq.leftCols(k), s.d()),
      Sys::trusted(e3, qz.at.bottomRightCorner(r, r), pb.bottomRows(r), cq.rightCols(r),
                   Matrix<Scalar>::Zero(s.outputs(), s.inputs())),
      std::move(p), std::move(q)};
  return out;
}

}  // namespace stablekit
