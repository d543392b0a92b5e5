#pragma once

#include <Eigen/Dense>

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace stablekit {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using ComplexMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

enum class ErrorCode {
  DimensionMismatch,
  NonFiniteEntry,
  SingularPencil,
  NoUniqueSolution,
  SpectrumViolation,
  NonSymmetricInput,
  ConvergenceFailure,
  AxisEigenvalue,
  AtPole,
  SingularTransform,
  NegativeSpectrum,
  NonzeroFeedthrough,
  NonFiniteSample,
  NotMinimal,
  GammaTooSmall,
  StructureViolation,
  NotStandardForm,
  LeastSquaresInconsistent,
  PreconditionViolated,
  ParseError,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteEntry: return "NonFiniteEntry";
    case ErrorCode::SingularPencil: return "SingularPencil";
    case ErrorCode::NoUniqueSolution: return "NoUniqueSolution";
    case ErrorCode::SpectrumViolation: return "SpectrumViolation";
    case ErrorCode::NonSymmetricInput: return "NonSymmetricInput";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::AxisEigenvalue: return "AxisEigenvalue";
    case ErrorCode::AtPole: return "AtPole";
    case ErrorCode::SingularTransform: return "SingularTransform";
    case ErrorCode::NegativeSpectrum: return "NegativeSpectrum";
    case ErrorCode::NonzeroFeedthrough: return "NonzeroFeedthrough";
    case ErrorCode::NonFiniteSample: return "NonFiniteSample";
    case ErrorCode::NotMinimal: return "NotMinimal";
    case ErrorCode::GammaTooSmall: return "GammaTooSmall";
    case ErrorCode::StructureViolation: return "StructureViolation";
    case ErrorCode::NotStandardForm: return "NotStandardForm";
    case ErrorCode::LeastSquaresInconsistent: return "LeastSquaresInconsistent";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Raised when a pencil has an eigenvalue on (or numerically at) the imaginary axis.
class AxisEigenvalueError : public Error {
 public:
  AxisEigenvalueError(std::complex<double> lambda, const std::string& what)
      : Error(ErrorCode::AxisEigenvalue, what), lambda_(lambda) {}

  std::complex<double> eigenvalue() const noexcept { return lambda_; }

 private:
  std::complex<double> lambda_;
};

template <typename Scalar>
constexpr Scalar machine_epsilon() {
  return std::numeric_limits<Scalar>::epsilon();
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* name) {
  if (!m.allFinite()) {
    throw Error(ErrorCode::NonFiniteEntry, std::string(name) + " has NaN or Inf entries");
  }
}

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, const char* name) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                std::string(name) + " must be square, got " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()));
  }
}

inline void require_dims(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::DimensionMismatch, what);
}

/// Relative residual helper: ||r||_F / max(scale, tiny).
template <typename Scalar>
Scalar relative(Scalar residual, Scalar scale) {
  return residual / std::max(scale, std::numeric_limits<Scalar>::min());
}

}  // namespace stablekit
