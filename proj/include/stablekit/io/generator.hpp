#pragma once

#include "stablekit/io/dsys_format.hpp"

#include <cstdint>

namespace stablekit::io {

struct GeneratorOptions {
  Eigen::Index n = 10;
  Eigen::Index unstable = 2;
  Eigen::Index inputs = 1;
  Eigen::Index outputs = 1;
  std::uint64_t seed = 1;
  bool descriptor = false;
};

/// Stable block (real parts in [-5, -0.1]) plus antistable block (real parts in [0.1, 5]),
/// mixed by a random orthogonal similarity. With `descriptor` both E and A are multiplied
/// from the left by a random well-conditioned matrix. Deterministic for a given seed.
System generate_system(const GeneratorOptions& opt);

}  // namespace stablekit::io
