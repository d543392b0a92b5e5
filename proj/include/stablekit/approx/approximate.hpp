#pragma once

#include "stablekit/approx/gamma_system.hpp"
#include "stablekit/norms/gramians.hpp"
#include "stablekit/system/decomposition.hpp"
#include "stablekit/system/spectrum.hpp"

#include <sstream>

namespace stablekit {

enum class ApproxBranch { Additive, Regular, SingularSvd, SingularSchur };

inline const char* to_string(ApproxBranch b) {
  switch (b) {
    case ApproxBranch::Additive: return "additive";
    case ApproxBranch::Regular: return "regular";
    case ApproxBranch::SingularSvd: return "singular-svd";
    case ApproxBranch::SingularSchur: return "singular-schur";
  }
  return "unknown";
}

template <typename Scalar>
struct ApproxDiagnostics {
  Eigen::Index antistable_order = 0;
  Scalar gramian_residual_c = 0;
  Scalar gramian_residual_o = 0;
  Eigen::Index sigma1_multiplicity = 0;
  /// Regularity test on A_g.
  Eigen::Index a_g_rank = 0;
  Scalar a_g_ratio = 1;
  /// ||F_{S-}||_2 for the H2 problem.
  Scalar h2_error = 0;
  /// The antistable part was rescaled to E = I before building the gamma system.
  bool standardized = false;
  /// Null directions of R made exact in the optimal regular branch.
  Eigen::Index deflated_kernel = 0;
};

template <typename Scalar>
struct ApproxResult {
  DescriptorSystem<Scalar> system;
  Scalar sigma1 = 0;
  Scalar gamma_used = 0;
  ApproxBranch branch = ApproxBranch::Additive;
  Eigen::Index reduced_order = 0;
  ApproxDiagnostics<Scalar> diagnostics;
};

template <typename Scalar>
struct ApinfMode {
  bool optimal = true;
  Scalar factor = Scalar(1.001);

  static ApinfMode Optimal() { return {true, Scalar(1)}; }
  static ApinfMode Suboptimal(Scalar f = Scalar(1.001)) {
    require_dims(f > 1, "suboptimal gamma factor must exceed 1");
    return {false, f};
  }
};

enum class SingularMethod { Auto, Svd, Schur };

template <typename Scalar>
struct ApproxOptions {
  /// Rank threshold for A_g, relative to its largest singular value.
  Scalar tol = Scalar(1e-10);
  Scalar axis_tol = Scalar(1e-10);
  /// Zero-block check of the singular reduction.
  Scalar structure_tol = Scalar(1e-8);
  /// Singular values of R below kernel_tol * (gamma^2 + ||Xo E Xc E^T||) are treated as exact zeros (gamma = sigma1 only).
  Scalar kernel_tol = Scalar(1e-8);
  /// Auto picks Schur when the input has E = I.
  SingularMethod singular = SingularMethod::Auto;
};

/// Best stable approximation in RH2: the stable part of the additive decomposition.
/// Any other solution realizes the same transfer function.
template <typename Scalar>
ApproxResult<Scalar> solve_ap2(const DescriptorSystem<Scalar>& s, Scalar axis_tol = Scalar(1e-10)) {
  auto dec = additive_decompose(s, axis_tol);
  ApproxResult<Scalar> out;
  out.diagnostics.antistable_order = dec.s_minus.states();
  if (dec.s_minus.states() > 0) {
    const auto gr = gramians(dec.s_minus);
    out.diagnostics.gramian_residual_c = gr.residual_c;
    out.diagnostics.gramian_residual_o = gr.residual_o;
    out.diagnostics.h2_error = h2_norm_antistable(dec.s_minus, gr);
    out.sigma1 = hankel_sigma_max(dec.s_minus, gr).sigma1;
  }
  out.system = std::move(dec.s_plus);
  out.reduced_order = out.system.states();
  return out;
}

namespace detail {

/// (I, E^-1 A, E^-1 B, C, D) for an invertible E.
template <typename Scalar>
DescriptorSystem<Scalar> to_standard(const DescriptorSystem<Scalar>& s) {
  if (s.states() == 0 || s.is_standard()) return s;
  const Eigen::PartialPivLU<Matrix<Scalar>> lu(s.e());
  return DescriptorSystem<Scalar>::standard(lu.solve(s.a()), lu.solve(s.b()), s.c(), s.d());
}

/// Gamma system with the numerically null directions of R made exact. With R = U S V^T the
/// r.s.e. (I, V) gives E_g V = E^T U S; columns whose singular value is below
/// kernel_tol * (gamma^2 + ||Xo E Xc E^T||) are set to zero so that they show up as exact
/// infinite eigenvalues instead of huge finite ones of random sign. Returns the count through `zeroed`.
template <typename Scalar>
DescriptorSystem<Scalar> deflate_gamma_kernel(const GammaSystem<Scalar>& gs, const Matrix<Scalar>& e,
                                              Scalar kernel_tol, Eigen::Index& zeroed) {
  const Eigen::Index n = gs.states();
  const Scalar g2 = gs.gamma * gs.gamma;
  const Scalar scale = g2 + (gs.r_g + g2 * Matrix<Scalar>::Identity(n, n)).norm();
  Eigen::JacobiSVD<Matrix<Scalar>> sv(gs.r_g, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Vector<Scalar> s = sv.singularValues();
  Eigen::Index k = n;
  while (k > 0 && s(k - 1) <= kernel_tol * scale) --k;
  zeroed = n - k;
  if (zeroed == 0) return gs.system();
  s.tail(n - k).setZero();
  Matrix<Scalar> eg = e.transpose() * (sv.matrixU() * s.asDiagonal());
  eg.rightCols(n - k).setZero();
  return DescriptorSystem<Scalar>::trusted(eg, gs.a_g * sv.matrixV(), gs.b_g, gs.c_g * sv.matrixV(),
                                           Matrix<Scalar>::Zero(gs.c_g.rows(), gs.b_g.cols()));
}

template <typename Scalar>
void require_stable(const DescriptorSystem<Scalar>& s, Scalar axis_tol) {
  const auto rep = pencil_spectrum(s, axis_tol);
  if (rep.stability_class != StabilityClass::Stable) {
    std::ostringstream msg;
    msg << "approximant is not stable (" << to_string(rep.stability_class) << ", max real part "
        << rep.max_real_part() << ")";
    throw Error(ErrorCode::SpectrumViolation, msg.str());
  }
}

}  // namespace detail

/// Optimal (gamma = sigma1) or suboptimal (gamma = factor * sigma1) stable approximation in RH-infinity.
/// The error ||F_S - F_out||_inf lies in [sigma1, gamma].
template <typename Scalar>
ApproxResult<Scalar> solve_apinf(const DescriptorSystem<Scalar>& s, ApinfMode<Scalar> mode = ApinfMode<Scalar>::Optimal(),
                                 const ApproxOptions<Scalar>& opt = {}) {
  auto dec = additive_decompose(s, opt.axis_tol);
  ApproxResult<Scalar> out;
  auto& diag = out.diagnostics;
  diag.antistable_order = dec.s_minus.states();
  if (dec.s_minus.states() == 0) {
    out.system = std::move(dec.s_plus);
    out.reduced_order = out.system.states();
    out.branch = ApproxBranch::Regular;
    return out;
  }

  DescriptorSystem<Scalar> sm = dec.s_minus;
  if (s.is_standard() && !sm.is_standard()) {
    sm = detail::to_standard(sm);
    diag.standardized = true;
  }
  const auto gr = gramians(sm);
  diag.gramian_residual_c = gr.residual_c;
  diag.gramian_residual_o = gr.residual_o;
  const auto hk = hankel_sigma_max(sm, gr);
  diag.sigma1_multiplicity = hk.multiplicity;
  out.sigma1 = hk.sigma1;
  out.gamma_used = mode.optimal ? hk.sigma1 : mode.factor * hk.sigma1;

  auto gs = construct_gamma_system(sm, gr, hk.sigma1, out.gamma_used, opt.tol);
  diag.a_g_rank = gs.verdict.numeric_rank;
  diag.a_g_ratio = gs.verdict.ratio;

  Scalar rank_tol = opt.tol;
  if (mode.optimal && gs.regular() && gs.verdict.ratio <= Scalar(10) * opt.tol) {
    // Too close to singular to invert safely; treat as singular.
    rank_tol = Scalar(10) * opt.tol;
    gs.verdict = regularity_test(gs.a_g, rank_tol);
    gs.verdict.regular = false;
  }

  DescriptorSystem<Scalar> approx;
  if (gs.regular()) {
    out.branch = ApproxBranch::Regular;
    approx = mode.optimal ? detail::deflate_gamma_kernel(gs, sm.e(), opt.kernel_tol, diag.deflated_kernel)
                          : gs.system();
  } else {
    const bool schur = opt.singular == SingularMethod::Schur ||
                       (opt.singular == SingularMethod::Auto && gs.source_standard);
    if (schur) {
      out.branch = ApproxBranch::SingularSchur;
      approx = reduce_singular_schur(gs, rank_tol, opt.structure_tol);
    } else {
      out.branch = ApproxBranch::SingularSvd;
      approx = reduce_singular_svd(gs, rank_tol, opt.structure_tol);
    }
  }
  out.system = direct_sum(dec.s_plus, approx);
  detail::require_stable(out.system, opt.axis_tol);
  out.reduced_order = out.system.states();
  return out;
}

}  // namespace stablekit
