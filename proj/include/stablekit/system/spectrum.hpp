#pragma once

#include "stablekit/dense/qz.hpp"
#include "stablekit/system/descriptor_system.hpp"

#include <complex>
#include <limits>
#include <vector>

namespace stablekit {

enum class StabilityClass {
  Stable,             // finite eigenvalues in Re < 0, infinite allowed
  Antistable,         // all eigenvalues finite with Re > 0, E regular
  RegularOnAxisFree,  // neither, but no eigenvalue on the imaginary axis
  AxisEigenvalue,
  SingularPencil,
};

inline const char* to_string(StabilityClass c) {
  switch (c) {
    case StabilityClass::Stable: return "stable";
    case StabilityClass::Antistable: return "antistable";
    case StabilityClass::RegularOnAxisFree: return "axis-free";
    case StabilityClass::AxisEigenvalue: return "axis-eigenvalue";
    case StabilityClass::SingularPencil: return "singular-pencil";
  }
  return "unknown";
}

template <typename Scalar>
struct SpectrumReport {
  std::vector<std::complex<Scalar>> finite_eigenvalues;
  bool has_infinite = false;
  StabilityClass stability_class = StabilityClass::Stable;
  /// min |Re lambda| over finite eigenvalues (+inf if there are none)
  Scalar margin = std::numeric_limits<Scalar>::infinity();

  Eigen::Index unstable_count() const {
    Eigen::Index k = 0;
    for (const auto& l : finite_eigenvalues) k += l.real() > 0;
    return k;
  }

  Scalar max_real_part() const {
    Scalar best = -std::numeric_limits<Scalar>::infinity();
    for (const auto& l : finite_eigenvalues) best = std::max(best, l.real());
    return best;
  }
};

/// Eigenvalue in the band |Re(lambda)| < tol * (1 + |lambda|) counts as lying on the axis.
template <typename Scalar>
bool on_axis(const std::complex<Scalar>& lambda, Scalar tol = Scalar(1e-10)) {
  return std::abs(lambda.real()) < tol * (Scalar(1) + std::abs(lambda));
}

template <typename Scalar>
SpectrumReport<Scalar> classify_eigenvalues(const std::vector<GeneralizedEigenvalue<Scalar>>& evs,
                                            Scalar axis_tol = Scalar(1e-10)) {
  SpectrumReport<Scalar> rep;
  bool any_axis = false, all_left = true, all_right = true;
  for (const auto& ev : evs) {
    if (ev.infinite) {
      rep.has_infinite = true;
      continue;
    }
    rep.finite_eigenvalues.push_back(ev.value);
    rep.margin = std::min(rep.margin, std::abs(ev.value.real()));
    if (on_axis(ev.value, axis_tol)) any_axis = true;
    if (!(ev.value.real() < 0)) all_left = false;
    if (!(ev.value.real() > 0)) all_right = false;
  }
  if (any_axis) {
    rep.stability_class = StabilityClass::AxisEigenvalue;
  } else if (all_left) {
    rep.stability_class = StabilityClass::Stable;
  } else if (all_right && !rep.has_infinite) {
    rep.stability_class = StabilityClass::Antistable;
  } else {
    rep.stability_class = StabilityClass::RegularOnAxisFree;
  }
  return rep;
}

/// Finite generalized eigenvalues, infinity flag and stability class of the pencil (E, A).
/// A singular pencil is reported through the class rather than thrown.
template <typename Scalar>
SpectrumReport<Scalar> classify_pencil(const Matrix<Scalar>& e, const Matrix<Scalar>& a,
                                       Scalar axis_tol = Scalar(1e-10)) {
  try {
    return classify_eigenvalues(pencil_eigenvalues<Scalar>(e, a), axis_tol);
  } catch (const Error& err) {
    if (err.code() != ErrorCode::SingularPencil) throw;
    SpectrumReport<Scalar> rep;
    rep.stability_class = StabilityClass::SingularPencil;
    rep.margin = 0;
    return rep;
  }
}

template <typename Scalar>
SpectrumReport<Scalar> pencil_spectrum(const DescriptorSystem<Scalar>& s, Scalar axis_tol = Scalar(1e-10)) {
  return classify_eigenvalues(pencil_eigenvalues<Scalar>(s.e(), s.a()), axis_tol);
}

}  // namespace stablekit
