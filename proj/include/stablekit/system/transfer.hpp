#pragma once

#include "stablekit/system/descriptor_system.hpp"

#include <Eigen/LU>

#include <complex>
#include <sstream>

namespace stablekit {

/// F_S(s) = C (s E - A)^{-1} B + D. Throws AtPole when s E - A is numerically singular
/// (reciprocal condition estimate below pole_tol).
template <typename Scalar>
ComplexMatrix<Scalar> transfer_eval(const DescriptorSystem<Scalar>& sys, std::complex<Scalar> s,
                                    Scalar pole_tol = Scalar(1e-14)) {
  using Complex = std::complex<Scalar>;
  if (sys.states() == 0 || sys.b().size() == 0 || sys.c().size() == 0) {
    return sys.d().template cast<Complex>();
  }
  const ComplexMatrix<Scalar> pencil = s * sys.e().template cast<Complex>() - sys.a().template cast<Complex>();
  Eigen::PartialPivLU<ComplexMatrix<Scalar>> lu(pencil);
  const Scalar rcond = lu.rcond();
  if (!(rcond > pole_tol)) {
    std::ostringstream msg;
    msg << "s = " << s << " is (numerically) a pole: rcond(sE - A) = " << rcond;
    throw Error(ErrorCode::AtPole, msg.str());
  }
  return sys.c().template cast<Complex>() * lu.solve(sys.b().template cast<Complex>()) +
         sys.d().template cast<Complex>();
}

/// Response on the imaginary axis, F_S(i omega).
template <typename Scalar>
ComplexMatrix<Scalar> frequency_response(const DescriptorSystem<Scalar>& sys, Scalar omega) {
  return transfer_eval(sys, std::complex<Scalar>(0, omega));
}

/// Largest singular value of a complex matrix.
template <typename Scalar>
Scalar spectral_norm(const ComplexMatrix<Scalar>& g) {
  if (g.size() == 0) return Scalar(0);
  if (g.rows() == 1 || g.cols() == 1) return g.norm();
  Eigen::JacobiSVD<ComplexMatrix<Scalar>> svd(g);
  return svd.singularValues()(0);
}

}  // namespace stablekit
