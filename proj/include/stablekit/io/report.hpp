#pragma once

#include "stablekit/io/dsys_format.hpp"

#include <optional>
#include <string>

namespace stablekit::io {

struct SystemSummary {
  Eigen::Index order = 0;
  Eigen::Index inputs = 0;
  Eigen::Index outputs = 0;
  std::string stability_class;
  Eigen::Index unstable_poles = 0;
  double max_real_part = 0;
  bool has_infinite = false;
};

SystemSummary summarize(const System& s, double axis_tol);

struct ErrorNorms {
  /// ||F1 - F2|| in L2 over the imaginary axis; +inf when the difference does not vanish at infinity.
  double l2 = 0;
  /// Sampled sup and inf of ||F1(iw) - F2(iw)||_2 over the refined grid.
  double linf = 0;
  double linf_min = 0;
  double linf_argmax = 0;
};

ErrorNorms error_norms(const System& original, const System& approximant, double axis_tol);

struct RunReport {
  std::string command;
  std::optional<std::string> norm;
  SystemSummary input;
  std::optional<SystemSummary> output;
  std::optional<double> sigma1;
  std::optional<double> gamma;
  std::optional<std::string> branch;
  std::optional<ErrorNorms> errors;
  std::optional<bool> approximant_stable;
  double wall_time_ms = 0;
};

/// JSON object, one key per field; non-finite numbers are written as the strings "inf"/"nan".
std::string to_json(const RunReport& r);

}  // namespace stablekit::io
