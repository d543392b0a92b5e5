#pragma once

#include "stablekit/dense/lyapunov.hpp"
#include "stablekit/system/descriptor_system.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <vector>

namespace stablekit {

/// Generalized Gramians of an antistable system:
///   A Xc E^T + E Xc A^T + B B^T = 0,   A^T Xo E + E^T Xo A + C^T C = 0.
/// Both are negative semidefinite.
template <typename Scalar>
struct GramianPair {
  Matrix<Scalar> xc;
  Matrix<Scalar> xo;
  Scalar residual_c = 0;
  Scalar residual_o = 0;
};

template <typename Scalar>
GramianPair<Scalar> gramians(const DescriptorSystem<Scalar>& s) {
  const auto c = solve_generalized_lyapunov<Scalar>(s.e(), s.a(), s.b() * s.b().transpose(),
                                                    GramianSide::Controllability);
  const auto o = solve_generalized_lyapunov<Scalar>(s.e(), s.a(), s.c().transpose() * s.c(),
                                                    GramianSide::Observability);
  return {c.x, o.x, c.residual, o.residual};
}

template <typename Scalar>
struct HankelData {
  Scalar sigma1 = 0;
  /// Eigenvalues of Xc E^T Xo E in descending order (clamped at zero).
  std::vector<Scalar> spectrum;
  /// Number of eigenvalues within the multiplicity tolerance of sigma1^2.
  Eigen::Index multiplicity = 0;
};

namespace detail {

/// Symmetric square root of a PSD matrix; eigenvalues below zero are clamped.
template <typename Scalar>
Matrix<Scalar> psd_sqrt(const Matrix<Scalar>& m) {
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(m);
  const Vector<Scalar> d = es.eigenvalues().cwiseMax(Scalar(0)).cwiseSqrt();
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace detail

/// sigma1 = sqrt(max eig(Xc E^T Xo E)). The product is symmetrized by congruence,
/// (-Xc)^{1/2} E^T (-Xo) E (-Xc)^{1/2}, so the computed spectrum stays real and nonnegative.
template <typename Scalar>
HankelData<Scalar> hankel_sigma_max(const DescriptorSystem<Scalar>& s, const GramianPair<Scalar>& gr,
                                    Scalar tol = Scalar(1e-8), Scalar multiplicity_tol = Scalar(1e-8)) {
  HankelData<Scalar> out;
  const Eigen::Index n = s.states();
  if (n == 0) return out;
  const Scalar scale = gr.xc.norm() * gr.xo.norm();

  const Matrix<Scalar> nxc = -gr.xc;
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es_c(nxc, Eigen::EigenvaluesOnly);
  std::vector<Scalar> ev;
  if (es_c.eigenvalues().minCoeff() >= -tol * std::max(gr.xc.norm(), Scalar(1e-300))) {
    const Matrix<Scalar> root = detail::psd_sqrt(nxc);
    Matrix<Scalar> sym = root * s.e().transpose() * (-gr.xo) * s.e() * root;
    sym = (sym + sym.transpose()) / Scalar(2);
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(sym, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < n; ++i) ev.push_back(es.eigenvalues()(i));
  } else {
    const Matrix<Scalar> prod = gr.xc * s.e().transpose() * gr.xo * s.e();
    Eigen::EigenSolver<Matrix<Scalar>> es(prod, false);
    for (Eigen::Index i = 0; i < n; ++i) ev.push_back(es.eigenvalues()(i).real());
  }
  std::sort(ev.begin(), ev.end(), std::greater<Scalar>());
  if (ev.back() < -tol * scale) {
    throw Error(ErrorCode::NegativeSpectrum,
                "Gramian product has negative eigenvalue " + std::to_string(double(ev.back())));
  }
  for (Scalar& v : ev) v = std::max(v, Scalar(0));
  out.spectrum = ev;
  out.sigma1 = std::sqrt(ev.front());
  const Scalar top = ev.front();
  out.multiplicity = top > 0 ? std::count_if(ev.begin(), ev.end(), [&](Scalar v) {
    return std::abs(v - top) <= multiplicity_tol * top;
  }) : n;
  return out;
}

template <typename Scalar>
HankelData<Scalar> hankel_sigma_max(const DescriptorSystem<Scalar>& s) {
  return hankel_sigma_max(s, gramians(s));
}

/// ||F||_2 of an antistable system with zero feedthrough: sqrt(trace(C (-Xc) C^T)).
template <typename Scalar>
Scalar h2_norm_antistable(const DescriptorSystem<Scalar>& s, const GramianPair<Scalar>& gr) {
  if (s.d().size() > 0 && s.d().cwiseAbs().maxCoeff() > 0) {
    throw Error(ErrorCode::NonzeroFeedthrough, "H2 norm is infinite for nonzero feedthrough");
  }
  if (s.states() == 0) return Scalar(0);
  const Scalar t = (s.c() * (-gr.xc) * s.c().transpose()).trace();
  return std::sqrt(std::max(t, Scalar(0)));
}

template <typename Scalar>
Scalar h2_norm_antistable(const DescriptorSystem<Scalar>& s) {
  if (s.states() == 0) return h2_norm_antistable(s, GramianPair<Scalar>{});
  return h2_norm_antistable(s, gramians(s));
}

}  // namespace stablekit
