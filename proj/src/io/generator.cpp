#include "stablekit/io/generator.hpp"

#include <Eigen/QR>

#include <random>

namespace stablekit::io {

namespace {

using Mat = Matrix<double>;

class Source {
 public:
  explicit Source(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }

  Mat gaussian(Eigen::Index r, Eigen::Index c) {
    Mat m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = normal();
    return m;
  }

  Mat orthogonal(Eigen::Index n) {
    if (n == 0) return Mat(0, 0);
    Eigen::HouseholderQR<Mat> qr(gaussian(n, n));
    Mat q = qr.householderQ() * Mat::Identity(n, n);
    // Fix the sign ambiguity of QR so the output depends only on the random stream.
    for (Eigen::Index i = 0; i < n; ++i)
      if (qr.matrixQR()(i, i) < 0) q.col(i) = -q.col(i);
    return q;
  }

 private:
  std::mt19937_64 gen_;
};

/// Quasi-triangular block with eigenvalue real parts in [lo, hi]: 1x1 real and 2x2 complex
/// blocks on the diagonal, random coupling above.
Mat spectral_block(Source& src, Eigen::Index n, double lo, double hi) {
  Mat t = Mat::Zero(n, n);
  Eigen::Index i = 0;
  while (i < n) {
    const double re = src.uniform(lo, hi);
    if (i + 1 < n && src.uniform(0, 1) < 0.4) {
      const double im = src.uniform(0.2, 5.0);
      t(i, i) = re;
      t(i + 1, i + 1) = re;
      t(i, i + 1) = im;
      t(i + 1, i) = -im;
      i += 2;
    } else {
      t(i, i) = re;
      i += 1;
    }
  }
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = 0; r < c; ++r)
      if (t(r, c) == 0) t(r, c) = 0.3 * src.normal();
  return t;
}

}  // namespace

System generate_system(const GeneratorOptions& opt) {
  require_dims(opt.n >= 0 && opt.unstable >= 0 && opt.unstable <= opt.n, "need 0 <= unstable <= n");
  require_dims(opt.inputs >= 0 && opt.outputs >= 0, "input and output counts must be nonnegative");
  Source src(opt.seed);
  const Eigen::Index n = opt.n, ns = opt.n - opt.unstable, nu = opt.unstable;

  Mat a = Mat::Zero(n, n);
  a.topLeftCorner(ns, ns) = spectral_block(src, ns, -5.0, -0.1);
  a.bottomRightCorner(nu, nu) = spectral_block(src, nu, 0.1, 5.0);
  const Mat q = src.orthogonal(n);
  a = q * a * q.transpose();
  Mat b = src.gaussian(n, opt.inputs);
  const Mat c = src.gaussian(opt.outputs, n);
  const Mat d = src.gaussian(opt.outputs, opt.inputs);

  Mat e = Mat::Identity(n, n);
  if (opt.descriptor && n > 0) {
    Eigen::VectorXd s(n);
    for (Eigen::Index i = 0; i < n; ++i) s(i) = src.uniform(0.5, 2.0);
    const Mat w = src.orthogonal(n) * s.asDiagonal() * src.orthogonal(n);
    e = w;
    a = w * a;
    b = w * b;
  }
  return System(e, a, b, c, d);
}

}  // namespace stablekit::io
