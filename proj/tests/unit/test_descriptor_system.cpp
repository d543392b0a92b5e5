#include "oracles.hpp"

#include "stablekit/system/decomposition.hpp"
#include "stablekit/system/spectrum.hpp"
#include "stablekit/system/transfer.hpp"
#include "stablekit/system/weierstrass.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace stablekit;
using oracle::Cplx;
using oracle::Mat;

namespace {

using Sys = DescriptorSystem<double>;

Mat m1(double v) { return Mat::Constant(1, 1, v); }

Sys scalar(double e, double a, double b, double c, double d) { return Sys(m1(e), m1(a), m1(b), m1(c), m1(d)); }

std::vector<Cplx> finite_of(const Sys& s) { return pencil_spectrum(s).finite_eigenvalues; }

// Random regular system whose pencil has `finite` finite eigenvalues with real parts in
// [lo, hi] and `inf` infinite eigenvalues of nilpotency index up to `inf`.
Sys random_descriptor(oracle::Rng& rng, int finite, int inf, double lo, double hi, int m = 2, int p = 2) {
  const int n = finite + inf;
  Mat ed = Mat::Zero(n, n), ad = Mat::Zero(n, n);
  ed.topLeftCorner(finite, finite).setIdentity();
  ad.topLeftCorner(finite, finite) = rng.with_real_parts(finite, lo, hi);
  Mat nil = rng.gaussian(inf, inf).triangularView<Eigen::StrictlyUpper>();
  ed.bottomRightCorner(inf, inf) = nil;
  ad.bottomRightCorner(inf, inf).setIdentity();
  const Mat w1 = rng.well_conditioned(n), w2 = rng.well_conditioned(n);
  return Sys(w1 * ed * w2, w1 * ad * w2, rng.gaussian(n, m), rng.gaussian(p, n), rng.gaussian(p, m));
}

// Mixed-sign system: stable, antistable and infinite eigenvalues. The infinite part has
// index 1 unless `chains` is set.
Sys random_mixed(oracle::Rng& rng, int ns, int nu, int ni, bool chains = false) {
  const int n = ns + nu + ni;
  Mat ed = Mat::Zero(n, n), ad = Mat::Zero(n, n);
  ed.topLeftCorner(ns + nu, ns + nu).setIdentity();
  ad.topLeftCorner(ns, ns) = rng.with_real_parts(ns, -5.0, -0.1);
  ad.block(ns, ns, nu, nu) = rng.with_real_parts(nu, 0.1, 5.0);
  ad.topRightCorner(ns + nu, ni) = rng.gaussian(ns + nu, ni);
  ad.topLeftCorner(ns, ns + nu).rightCols(nu) = rng.gaussian(ns, nu);
  ad.bottomRightCorner(ni, ni).setIdentity();
  if (chains) ed.bottomRightCorner(ni, ni) = rng.gaussian(ni, ni).triangularView<Eigen::StrictlyUpper>();
  const Mat w1 = rng.well_conditioned(n), w2 = rng.well_conditioned(n);
  return Sys(w1 * ed * w2, w1 * ad * w2, rng.gaussian(n, 2), rng.gaussian(2, n), rng.gaussian(2, 2));
}

oracle::CMat reference(const Sys& s, Cplx z) { return oracle::transfer(s.e(), s.a(), s.b(), s.c(), s.d(), z); }

}  // namespace

TEST(DescriptorSystem, RejectsInconsistentShapes) {
  EXPECT_THROW(Sys(Mat::Identity(2, 2), Mat::Identity(2, 2), Mat::Zero(3, 1), Mat::Zero(1, 2), Mat::Zero(1, 1)),
               Error);
  EXPECT_THROW(Sys(Mat::Identity(2, 2), Mat::Identity(2, 2), Mat::Zero(2, 1), Mat::Zero(1, 2), Mat::Zero(2, 1)),
               Error);
  Mat a = Mat::Identity(2, 2);
  a(0, 1) = std::nan("");
  EXPECT_THROW(Sys(Mat::Identity(2, 2), a, Mat::Zero(2, 1), Mat::Zero(1, 2), Mat::Zero(1, 1)), Error);
}

TEST(DescriptorSystem, RejectsSingularPencil) {
  Mat e = Mat::Zero(2, 2), a = Mat::Zero(2, 2);
  e(0, 0) = 1;
  a(0, 0) = 1;
  try {
    Sys(e, a, Mat::Zero(2, 1), Mat::Zero(1, 2), Mat::Zero(1, 1));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::SingularPencil);
  }
}

TEST(DescriptorSystem, EmptySystem) {
  const Sys s = Sys::empty(m1(3.0));
  EXPECT_EQ(s.states(), 0);
  EXPECT_NEAR(transfer_eval(s, Cplx(0, 7))(0, 0).real(), 3.0, 0);
  EXPECT_EQ(pencil_spectrum(s).stability_class, StabilityClass::Stable);
}

TEST(PencilSpectrum, MixedDiagonal) {
  Mat a = Mat::Zero(2, 2);
  a(0, 0) = 1;
  a(1, 1) = -2;
  const Sys s(Mat::Identity(2, 2), a, Mat::Zero(2, 1), Mat::Zero(1, 2), Mat::Zero(1, 1));
  const auto rep = pencil_spectrum(s);
  EXPECT_FALSE(rep.has_infinite);
  EXPECT_LT(oracle::multiset_distance(rep.finite_eigenvalues, {Cplx(1), Cplx(-2)}), 1e-14);
  EXPECT_EQ(rep.stability_class, StabilityClass::RegularOnAxisFree);
  EXPECT_NEAR(rep.margin, 1.0, 1e-14);
}

TEST(PencilSpectrum, SingularE) {
  Mat e = Mat::Zero(2, 2);
  e(0, 0) = 1;
  const Sys s(e, Mat::Identity(2, 2), Mat::Zero(2, 1), Mat::Zero(1, 2), Mat::Zero(1, 1));
  const auto rep = pencil_spectrum(s);
  EXPECT_TRUE(rep.has_infinite);
  ASSERT_EQ(rep.finite_eigenvalues.size(), 1u);
  EXPECT_NEAR(std::abs(rep.finite_eigenvalues[0] - Cplx(1)), 0.0, 1e-14);
  EXPECT_EQ(rep.stability_class, StabilityClass::RegularOnAxisFree);
}

TEST(PencilSpectrum, OnlyInfinite) {
  const auto rep = pencil_spectrum(scalar(0, 2, 1, 1, 0));
  EXPECT_TRUE(rep.has_infinite);
  EXPECT_TRUE(rep.finite_eigenvalues.empty());
  EXPECT_EQ(rep.stability_class, StabilityClass::Stable);
}

TEST(PencilSpectrum, Classes) {
  EXPECT_EQ(pencil_spectrum(scalar(1, 2, 1, 1, 0)).stability_class, StabilityClass::Antistable);
  EXPECT_EQ(pencil_spectrum(scalar(1, -2, 1, 1, 0)).stability_class, StabilityClass::Stable);
  EXPECT_EQ(pencil_spectrum(scalar(1, 1e-13, 1, 1, 0)).stability_class, StabilityClass::AxisEigenvalue);
  Mat e = Mat::Zero(2, 2);
  e(0, 0) = 1;
  EXPECT_EQ(classify_pencil<double>(e, e).stability_class, StabilityClass::SingularPencil);
}

TEST(TransferEval, Examples) {
  EXPECT_NEAR(transfer_eval(scalar(1, 1, 1, 1, 0), Cplx(0))(0, 0).real(), -1.0, 1e-15);
  const Sys zero_b(Mat::Identity(2, 2), -Mat::Identity(2, 2), Mat::Zero(2, 1), Mat::Ones(1, 2), m1(0.25));
  EXPECT_NEAR(std::abs(transfer_eval(zero_b, Cplx(0.3, 2))(0, 0) - Cplx(0.25)), 0.0, 1e-15);
  const Sys constant = scalar(0, 0.5, -0.5, -0.5, 0);
  for (Cplx z : {Cplx(0), Cplx(0, 1), Cplx(3, -2), Cplx(1e4, 0)}) {
    EXPECT_NEAR(std::abs(transfer_eval(constant, z)(0, 0) - Cplx(-0.5)), 0.0, 1e-14);
  }
}

TEST(TransferEval, AtPole) {
  try {
    transfer_eval(scalar(1, 1, 1, 1, 0), Cplx(1));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::AtPole);
  }
}

TEST(DirectSum, Examples) {
  const Sys s = scalar(1, -1, 1, 1, 0);
  EXPECT_TRUE(direct_sum(s, Sys::empty(1, 1)) == s);
  const Sys sum = direct_sum(scalar(1, -1, 1, 1, 0), scalar(1, 2, 1, 1, 0));
  // 1/(s+1) + 1/(s-2) at s = 0
  EXPECT_NEAR(transfer_eval(sum, Cplx(0))(0, 0).real(), 0.5, 1e-15);
  EXPECT_THROW(direct_sum(s, Sys::empty(2, 1)), Error);
}

TEST(DirectSum, TransferAdds) {
  oracle::Rng rng(11);
  const Sys s1 = random_descriptor(rng, 3, 2, -3, -0.5);
  const Sys s2 = random_descriptor(rng, 4, 0, 0.5, 3);
  const Sys sum = direct_sum(s1, s2);
  for (int i = 0; i < 10; ++i) {
    const Cplx z(0, rng.uniform(-20, 20));
    const oracle::CMat expect = reference(s1, z) + reference(s2, z);
    EXPECT_LT((transfer_eval(sum, z) - expect).norm(), 1e-10 * (1 + expect.norm()));
  }
}

TEST(RseTransform, Examples) {
  const Sys s = scalar(1, 1, 1, 1, 0);
  EXPECT_TRUE(rse_transform(Mat(Mat::Identity(1, 1)), s, Mat(Mat::Identity(1, 1))) == s);
  const Sys t = rse_transform(m1(2), s, m1(2));
  EXPECT_TRUE(t == scalar(4, 4, 2, 2, 0));
  EXPECT_NEAR(transfer_eval(t, Cplx(2))(0, 0).real(), 1.0, 1e-15);
  EXPECT_NEAR(transfer_eval(s, Cplx(2))(0, 0).real(), 1.0, 1e-15);
  try {
    rse_transform(m1(0), s, m1(1));
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::SingularTransform);
  }
}

TEST(RseTransform, TransferAndSpectrumInvariance) {
  oracle::Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const Sys s = random_mixed(rng, 3, 2, 2, true);
    const Mat p = rng.well_conditioned(s.states()), q = rng.well_conditioned(s.states());
    const Sys t = rse_transform(p, s, q);
    for (int i = 0; i < 10; ++i) {
      const Cplx z(0, rng.uniform(-10, 10));
      const oracle::CMat g = reference(s, z);
      EXPECT_LT((transfer_eval(t, z) - g).norm(), 1e-9 * (1 + g.norm()));
    }
    EXPECT_LT(oracle::multiset_distance(finite_of(s), finite_of(t)), 1e-8);
  }
}

TEST(Weierstrass, StandardSystem) {
  oracle::Rng rng(13);
  const Sys s = random_descriptor(rng, 4, 0, -2, 2);
  const auto w = weierstrass_split(Sys::standard(s.a(), s.b(), s.c(), s.d()));
  EXPECT_EQ(w.finite_order(), 4);
  EXPECT_EQ(w.infinite_order(), 0);
  EXPECT_EQ(w.nu, 1);
}

TEST(Weierstrass, PolynomialPartOnly) {
  Mat e = Mat::Zero(2, 2);
  e(0, 0) = 1;
  Mat b(2, 1), c(1, 2);
  b << 0, 1;
  c << 0, 1;
  const Sys s(e, Mat::Identity(2, 2), b, c, m1(0));
  const auto w = weierstrass_split(s);
  EXPECT_EQ(w.finite_order(), 1);
  EXPECT_EQ(w.infinite_order(), 1);
  EXPECT_EQ(w.nu, 1);
  EXPECT_NEAR((w.c_n * w.b_n)(0, 0), 1.0, 1e-14);
  for (Cplx z : {Cplx(0), Cplx(0, 3), Cplx(-2, 1)}) {
    EXPECT_NEAR(std::abs(weierstrass_transfer(w, z)(0, 0) - Cplx(-1)), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(transfer_eval(s, z)(0, 0) - Cplx(-1)), 0.0, 1e-14);
  }
}

TEST(Weierstrass, RandomSingularE) {
  oracle::Rng rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    const int inf = rng.integer(1, 3);
    const Sys s = random_descriptor(rng, rng.integer(0, 5), inf, -3, 3);
    const auto w = weierstrass_split(s);
    EXPECT_EQ(w.infinite_order(), inf);
    EXPECT_LE(w.nu, inf);
    // N^nu = 0 and N^(nu-1) != 0
    Mat power = Mat::Identity(inf, inf);
    for (Eigen::Index i = 0; i + 1 < w.nu; ++i) power = power * w.n;
    EXPECT_GT(power.norm(), 1e-12);
    EXPECT_LT((power * w.n).norm(), 1e-12);
    // P E Q = diag(I, N), P A Q = diag(J, I)
    const Eigen::Index k = w.finite_order();
    const Mat pe = w.p * s.e() * w.q, pa = w.p * s.a() * w.q;
    EXPECT_LT((pe.topLeftCorner(k, k) - Mat::Identity(k, k)).norm(), 1e-9);
    EXPECT_LT((pa.bottomRightCorner(inf, inf) - Mat::Identity(inf, inf)).norm(), 1e-9);
    EXPECT_LT(pe.topRightCorner(k, inf).norm() + pa.topRightCorner(k, inf).norm(), 1e-9);
    for (int i = 0; i < 10; ++i) {
      const Cplx z(rng.uniform(-4, 4), rng.uniform(-4, 4));
      const oracle::CMat g = reference(s, z);
      EXPECT_LT((weierstrass_transfer(w, z) - g).norm(), 1e-9 * (1 + g.norm())) << "trial " << trial;
    }
  }
}

TEST(AdditiveDecompose, AlreadyDecoupled) {
  Mat a = Mat::Zero(2, 2);
  a(0, 0) = -1;
  a(1, 1) = 2;
  const Sys s(Mat::Identity(2, 2), a, Mat::Ones(2, 1), Mat::Ones(1, 2), m1(0.5));
  const auto dec = additive_decompose(s);
  ASSERT_EQ(dec.s_plus.states(), 1);
  ASSERT_EQ(dec.s_minus.states(), 1);
  // Up to a sign convention of the orthogonal factors the parts are the scalar systems.
  EXPECT_NEAR(dec.s_plus.a()(0, 0) / dec.s_plus.e()(0, 0), -1.0, 1e-14);
  EXPECT_NEAR(dec.s_minus.a()(0, 0) / dec.s_minus.e()(0, 0), 2.0, 1e-14);
  EXPECT_NEAR(transfer_eval(dec.s_plus, Cplx(0))(0, 0).real(), 1.0 + 0.5, 1e-14);
  EXPECT_NEAR(transfer_eval(dec.s_minus, Cplx(0))(0, 0).real(), -0.5, 1e-14);
  EXPECT_EQ(dec.s_minus.d()(0, 0), 0.0);
}

TEST(AdditiveDecompose, CoupledTwoState) {
  Mat a(2, 2);
  a << -1, 3, 0, 2;
  const Sys s(Mat::Identity(2, 2), a, Mat::Ones(2, 1), Mat::Ones(1, 2), m1(0));
  const auto dec = additive_decompose(s);
  for (int i = 0; i < 64; ++i) {
    const Cplx z(0, std::pow(10.0, -4 + 8.0 * i / 63));
    const oracle::CMat g = reference(s, z);
    const oracle::CMat parts = transfer_eval(dec.s_plus, z) + transfer_eval(dec.s_minus, z);
    EXPECT_LT((g - parts).norm(), 1e-9 * (1 + g.norm()));
  }
}

TEST(AdditiveDecompose, AlreadyAntistable) {
  const Sys s = scalar(1, 3, 1, 2, 0.7);
  const auto dec = additive_decompose(s);
  EXPECT_EQ(dec.s_plus.states(), 0);
  EXPECT_EQ(dec.s_minus.states(), 1);
  EXPECT_NEAR(transfer_eval(dec.s_plus, Cplx(0, 5))(0, 0).real(), 0.7, 0);
}

TEST(AdditiveDecompose, AxisEigenvalue) {
  Mat a(2, 2);
  a << 0, 1, -1, 0;
  const Sys s(Mat::Identity(2, 2), a, Mat::Ones(2, 1), Mat::Ones(1, 2), m1(0));
  try {
    additive_decompose(s);
    FAIL();
  } catch (const AxisEigenvalueError& err) {
    EXPECT_EQ(err.code(), ErrorCode::AxisEigenvalue);
    EXPECT_NEAR(std::abs(err.eigenvalue()), 1.0, 1e-12);
  }
}

TEST(AdditiveDecompose, RandomProperties) {
  oracle::Rng rng(15);
  for (int trial = 0; trial < 40; ++trial) {
    const Sys s = random_mixed(rng, rng.integer(0, 5), rng.integer(0, 5), rng.integer(0, 3));
    const auto dec = additive_decompose(s);
    EXPECT_EQ(dec.s_plus.states() + dec.s_minus.states(), s.states());
    const auto plus = pencil_spectrum(dec.s_plus), minus = pencil_spectrum(dec.s_minus);
    EXPECT_EQ(plus.stability_class, StabilityClass::Stable);
    if (dec.s_minus.states() > 0) EXPECT_EQ(minus.stability_class, StabilityClass::Antistable);
    EXPECT_GT(plus.margin, 1e-10);
    EXPECT_GT(minus.margin, 1e-10);
    EXPECT_TRUE(dec.s_minus.d().isZero(0));

    std::vector<Cplx> parts = plus.finite_eigenvalues;
    parts.insert(parts.end(), minus.finite_eigenvalues.begin(), minus.finite_eigenvalues.end());
    EXPECT_LT(oracle::multiset_distance(finite_of(s), parts), 1e-8);

    const Sys joined = direct_sum(dec.s_plus, dec.s_minus);
    const Sys moved = rse_transform(dec.p, s, dec.q);
    EXPECT_LT((joined.a() - moved.a()).norm(), 1e-9 * (1 + s.a().norm()));
    EXPECT_LT((joined.e() - moved.e()).norm(), 1e-9 * (1 + s.e().norm()));

    for (int i = 0; i < 64; ++i) {
      const Cplx z(0, std::pow(10.0, -3 + 6.0 * i / 63));
      const oracle::CMat g = reference(s, z);
      const oracle::CMat sum = transfer_eval(dec.s_plus, z) + transfer_eval(dec.s_minus, z);
      EXPECT_LE((g - sum).norm(), 1e-8 * (1 + g.norm())) << "trial " << trial;
    }
  }
}

TEST(AdditiveDecompose, JordanChainsAtInfinity) {
  // The polynomial part grows like s^2 here, so the dense reference itself is only good to
  // about cond * eps at the top of the grid.
  oracle::Rng rng(16);
  for (int trial = 0; trial < 20; ++trial) {
    const Sys s = random_mixed(rng, rng.integer(1, 4), rng.integer(1, 4), 3, true);
    const auto dec = additive_decompose(s);
    EXPECT_EQ(pencil_spectrum(dec.s_minus).stability_class, StabilityClass::Antistable);
    EXPECT_TRUE(pencil_spectrum(dec.s_plus).has_infinite);
    for (int i = 0; i < 64; ++i) {
      const Cplx z(0, std::pow(10.0, -3 + 6.0 * i / 63));
      const oracle::CMat g = reference(s, z);
      const oracle::CMat sum = transfer_eval(dec.s_plus, z) + transfer_eval(dec.s_minus, z);
      EXPECT_LE((g - sum).norm(), 1e-6 * (1 + g.norm())) << "trial " << trial;
    }
  }
}
