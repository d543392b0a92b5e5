#pragma once

#include "stablekit/dense/common.hpp"

#include <string>
#include <vector>

namespace stablekit::io {

/// Header `omega,re_G_1_1,im_G_1_1,re_G_2_1,...`, entries column-major over (i, j), 1-based.
std::string write_freqresp_csv(const std::vector<double>& omegas, const std::vector<ComplexMatrix<double>>& responses,
                               Eigen::Index outputs, Eigen::Index inputs);

}  // namespace stablekit::io
