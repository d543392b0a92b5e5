#pragma once

#include "stablekit/io/generator.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace stablekit::io {

enum ExitCode : int { Ok = 0, Failure = 1, AxisEigenvalueExit = 2, SingularPencilExit = 3, UnstableApproximant = 4 };

/// 1e-10 unless STABLEKIT_TOL holds a positive number.
double default_tolerance();

struct ApproxCommand {
  std::string input;
  std::string output;
  std::string norm = "hinf";  // h2 | hinf
  std::optional<double> gamma_factor;
  std::optional<double> tol;
};

struct GenerateCommand {
  GeneratorOptions options;
  std::string output;
};

struct VerifyCommand {
  std::string original;
  std::string approximant;
  std::string norm = "hinf";
  std::optional<double> tol;
};

struct FreqrespCommand {
  std::string input;
  std::string output;
  double wmin = 1e-3;
  double wmax = 1e3;
  int points = 200;
};

// Each command writes its report to `out` and diagnostics to `err`, and returns an exit code.
int cmd_approx(const ApproxCommand& c, std::ostream& out, std::ostream& err);
int cmd_generate(const GenerateCommand& c, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyCommand& c, std::ostream& out, std::ostream& err);
int cmd_freqresp(const FreqrespCommand& c, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace stablekit::io
