#include "oracles.hpp"

#include "stablekit/dense/lyapunov.hpp"
#include "stablekit/dense/qz.hpp"
#include "stablekit/dense/schur.hpp"
#include "stablekit/dense/svd.hpp"
#include "stablekit/dense/sylvester.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace stablekit;
using oracle::Cplx;
using oracle::Mat;

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double orthogonality_error(const Mat& q) {
  return (q.transpose() * q - Mat::Identity(q.rows(), q.cols())).norm();
}

std::vector<Cplx> finite_values(const std::vector<GeneralizedEigenvalue<double>>& evs) {
  std::vector<Cplx> out;
  for (const auto& ev : evs)
    if (!ev.infinite) out.push_back(ev.value);
  return out;
}

void expect_valid_qz(const Mat& e, const Mat& a, const OrderedQz<double>& qz) {
  const Eigen::Index n = a.rows();
  EXPECT_LE(orthogonality_error(qz.u), 64.0 * n * kEps);
  EXPECT_LE(orthogonality_error(qz.v), 64.0 * n * kEps);
  EXPECT_LE((qz.u * e * qz.v - qz.et).norm(), 1e-12 * std::max(e.norm(), 1.0));
  EXPECT_LE((qz.u * a * qz.v - qz.at).norm(), 1e-12 * std::max(a.norm(), 1.0));
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = j + 2; i < n; ++i) {
      EXPECT_EQ(qz.at(i, j), 0.0);
      EXPECT_EQ(qz.et(i, j), 0.0);
    }
}

}  // namespace

// ---------------------------------------------------------------- qz_ordered

TEST(QzOrdered, DiagonalAlreadyOrdered) {
  const Mat e = Mat::Identity(2, 2);
  Mat a(2, 2);
  a << -1, 0, 0, 2;
  const auto qz = qz_ordered<double>(e, a, select_stable_or_infinite<double>());
  expect_valid_qz(e, a, qz);
  ASSERT_EQ(qz.split, 1);
  EXPECT_NEAR(qz.eigenvalues[0].value.real(), -1.0, 1e-14);
  EXPECT_NEAR(qz.eigenvalues[1].value.real(), 2.0, 1e-14);
}

TEST(QzOrdered, InfiniteEigenvalueGoesToLeadingBlock) {
  Mat e(2, 2);
  e << 1, 0, 0, 0;
  const Mat a = Mat::Identity(2, 2);
  const auto qz = qz_ordered<double>(e, a, select_stable_or_infinite<double>());
  expect_valid_qz(e, a, qz);
  ASSERT_EQ(qz.split, 1);
  EXPECT_TRUE(qz.eigenvalues[0].infinite);
  EXPECT_FALSE(qz.eigenvalues[1].infinite);
  EXPECT_NEAR(qz.eigenvalues[1].value.real(), 1.0, 1e-14);
}

TEST(QzOrdered, UpperTriangularNeedsSwap) {
  const Mat e = Mat::Identity(2, 2);
  Mat a(2, 2);
  a << 2, 3, 0, -1;  // unstable first: ordering must move -1 up
  const auto qz = qz_ordered<double>(e, a, select_stable_or_infinite<double>());
  expect_valid_qz(e, a, qz);
  ASSERT_EQ(qz.split, 1);
  EXPECT_NEAR(qz.eigenvalues[0].value.real(), -1.0, 1e-13);
  EXPECT_NEAR(qz.eigenvalues[1].value.real(), 2.0, 1e-13);

  Mat a2(2, 2);
  a2 << -1, 3, 0, 2;
  const auto qz2 = qz_ordered<double>(e, a2, select_stable_or_infinite<double>());
  expect_valid_qz(e, a2, qz2);
  EXPECT_EQ(qz2.split, 1);
  EXPECT_NEAR(qz2.eigenvalues[0].value.real(), -1.0, 1e-13);
}

TEST(QzOrdered, SingularPencilRejected) {
  Mat e(2, 2), a(2, 2);
  e << 1, 0, 0, 0;
  a << 1, 0, 0, 0;
  try {
    qz_ordered<double>(e, a, select_stable_or_infinite<double>());
    FAIL() << "expected SingularPencil";
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::SingularPencil);
  }
}

TEST(QzOrdered, DimensionMismatch) {
  try {
    qz_ordered<double>(Mat::Identity(2, 2), Mat::Identity(3, 3), select_stable_or_infinite<double>());
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(QzOrdered, RandomPencilsPreserveSpectrumAndSplit) {
  oracle::Rng rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const Eigen::Index n = rng.integer(1, 14);
    const Eigen::Index n_inf = trial % 3 == 0 ? rng.integer(0, 2) : 0;
    // Build E = P diag(I, 0) Q and A = P * blockdiag(J, I) * Q with mixed-sign spectrum J.
    const Eigen::Index k = std::max<Eigen::Index>(n - n_inf, 0);
    Mat j = rng.with_real_parts(k, -3.0, 3.0);
    // keep eigenvalues off the axis
    for (Eigen::Index i = 0; i < k; ++i) j(i, i) += (j(i, i) >= 0 ? 0.2 : -0.2);
    Mat e0 = Mat::Zero(n, n), a0 = Mat::Zero(n, n);
    e0.topLeftCorner(k, k).setIdentity();
    a0.topLeftCorner(k, k) = j;
    a0.bottomRightCorner(n - k, n - k).setIdentity();
    const Mat p = rng.well_conditioned(n), q = rng.well_conditioned(n);
    const Mat e = p * e0 * q, a = p * a0 * q;

    const auto reference = pencil_eigenvalues<double>(e, a);
    const auto qz = qz_ordered<double>(e, a, select_stable_or_infinite<double>());
    expect_valid_qz(e, a, qz);
    EXPECT_LE(oracle::multiset_distance(finite_values(reference), finite_values(qz.eigenvalues)), 1e-8);
    Eigen::Index selected = 0;
    for (std::size_t i = 0; i < qz.eigenvalues.size(); ++i) {
      const bool sel = qz.eigenvalues[i].infinite || qz.eigenvalues[i].value.real() < 0;
      if (Eigen::Index(i) < qz.split) {
        EXPECT_TRUE(sel) << "trial " << trial << " index " << i;
      } else {
        EXPECT_FALSE(sel) << "trial " << trial << " index " << i;
      }
      selected += sel;
    }
    EXPECT_EQ(selected, qz.split);
  }
}

// ------------------------------------------------- solve_generalized_sylvester

TEST(GeneralizedSylvester, ZeroRightHandSide) {
  oracle::Rng rng(3);
  const Mat a1 = rng.with_real_parts(3, -2, -1), a3 = rng.with_real_parts(2, 1, 2);
  const auto sol = solve_generalized_sylvester<double>(a1, a3, Mat::Identity(3, 3), Mat::Identity(2, 2),
                                                       Mat::Zero(3, 2), Mat::Zero(3, 2));
  EXPECT_EQ(sol.r.norm(), 0.0);
  EXPECT_EQ(sol.l.norm(), 0.0);
}

TEST(GeneralizedSylvester, ScalarHandComputed) {
  // r - 2l = -1, r - l = 0  =>  r = l = 1
  const Mat one = Mat::Constant(1, 1, 1.0), two = Mat::Constant(1, 1, 2.0);
  const auto sol = solve_generalized_sylvester<double>(one, two, one, one, one, Mat::Zero(1, 1));
  EXPECT_NEAR(sol.r(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(sol.l(0, 0), 1.0, 1e-14);
}

TEST(GeneralizedSylvester, MatchesKroneckerOracle) {
  oracle::Rng rng(5);
  const Mat a1 = rng.with_real_parts(3, -3, -0.5), e1 = rng.well_conditioned(3);
  const Mat a3 = rng.with_real_parts(2, 0.5, 3), e3 = rng.well_conditioned(2);
  const Mat a2 = rng.gaussian(3, 2), e2 = rng.gaussian(3, 2);
  // pencils (E1, E1*A1) and (E3, E3*A3) have the spectra of A1 and A3
  const Mat aa1 = e1 * a1, aa3 = e3 * a3;
  const auto sol = solve_generalized_sylvester<double>(aa1, aa3, e1, e3, a2, e2);
  Mat r_ref, l_ref;
  oracle::kron_coupled_sylvester(aa1, aa3, e1, e3, a2, e2, r_ref, l_ref);
  EXPECT_LE((sol.r - r_ref).norm(), 1e-10 * (1 + r_ref.norm()));
  EXPECT_LE((sol.l - l_ref).norm(), 1e-10 * (1 + l_ref.norm()));
  EXPECT_LE(sol.residual, 1e-10);
}

TEST(GeneralizedSylvester, SharedSpectrumHasNoUniqueSolution) {
  const Mat one = Mat::Constant(1, 1, 1.0);
  try {
    solve_generalized_sylvester<double>(one, one, one, one, one, one);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::NoUniqueSolution);
  }
}

TEST(GeneralizedSylvester, RandomResidualsWithInfiniteEigenvalues) {
  oracle::Rng rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n1 = rng.integer(1, 12), n3 = rng.integer(1, 12);
    Mat e1 = rng.well_conditioned(n1);
    const Mat a1 = e1 * rng.with_real_parts(n1, -4, -0.3);
    Mat a3 = rng.with_real_parts(n3, 0.3, 4);
    Mat e3 = rng.well_conditioned(n3);
    a3 = e3 * a3;
    if (trial % 4 == 0) {
      // Add an infinite eigenvalue to the second pencil.
      const Mat p = rng.well_conditioned(n3);
      Mat d = Mat::Identity(n3, n3);
      d(n3 - 1, n3 - 1) = 0.0;
      e3 = p * d * e3;
      Mat shift = Mat::Zero(n3, n3);
      shift(n3 - 1, n3 - 1) = 1.0;
      a3 = p * (d * a3 + shift);
    }
    const Mat a2 = rng.gaussian(n1, n3), e2 = rng.gaussian(n1, n3);
    const auto sol = solve_generalized_sylvester<double>(a1, a3, e1, e3, a2, e2);
    EXPECT_LE(sol.residual, 1e-10) << "trial " << trial;
  }
}

// ----------------------------------------------------- solve_generalized_lyapunov

TEST(GeneralizedLyapunov, ScalarClosedForm) {
  const Mat one = Mat::Constant(1, 1, 1.0);
  const auto sol = solve_generalized_lyapunov<double>(one, one, one, GramianSide::Controllability);
  EXPECT_NEAR(sol.x(0, 0), -0.5, 1e-15);
}

TEST(GeneralizedLyapunov, ZeroForcing) {
  oracle::Rng rng(2);
  const Mat a = rng.with_real_parts(4, 0.5, 2);
  const auto sol = solve_generalized_lyapunov<double>(Mat::Identity(4, 4), a, Mat::Zero(4, 4),
                                                      GramianSide::Observability);
  EXPECT_EQ(sol.x.norm(), 0.0);
}

TEST(GeneralizedLyapunov, HandVerifiedMinusIdentity) {
  Mat a(2, 2);
  a << 1, 0.5, -0.5, 0;
  Mat w = Mat::Zero(2, 2);
  w(0, 0) = 2;
  for (auto side : {GramianSide::Controllability, GramianSide::Observability}) {
    const auto sol = solve_generalized_lyapunov<double>(Mat::Identity(2, 2), a, w, side);
    EXPECT_LE((sol.x + Mat::Identity(2, 2)).norm(), 1e-13);
  }
}

TEST(GeneralizedLyapunov, RejectsStableOrSingular) {
  const Mat one = Mat::Constant(1, 1, 1.0);
  try {
    solve_generalized_lyapunov<double>(one, -one, one, GramianSide::Controllability);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::SpectrumViolation);
  }
  try {
    solve_generalized_lyapunov<double>(Mat::Zero(1, 1), one, one, GramianSide::Controllability);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::SpectrumViolation);
  }
  Mat nonsym(2, 2);
  nonsym << 1, 2, 0, 1;
  try {
    solve_generalized_lyapunov<double>(Mat::Identity(2, 2), Mat::Identity(2, 2), nonsym,
                                       GramianSide::Controllability);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::NonSymmetricInput);
  }
}

TEST(GeneralizedLyapunov, RandomDescriptorResidualSymmetryAndSign) {
  oracle::Rng rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const Eigen::Index n = rng.integer(1, 30);
    const Mat e = rng.well_conditioned(n);
    const Mat a = e * rng.with_real_parts(n, 0.3, 3);
    const Mat b = rng.gaussian(n, 2), c = rng.gaussian(2, n);
    const auto xc = solve_generalized_lyapunov<double>(e, a, b * b.transpose(), GramianSide::Controllability);
    const auto xo = solve_generalized_lyapunov<double>(e, a, c.transpose() * c, GramianSide::Observability);
    EXPECT_LE(xc.residual, 1e-10);
    EXPECT_LE(xo.residual, 1e-10);
    EXPECT_LE((xc.x - xc.x.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    Eigen::SelfAdjointEigenSolver<Mat> es(xc.x);
    EXPECT_LE(es.eigenvalues().maxCoeff(), 1e-10 * (1 + xc.x.norm()));
  }
}

TEST(GeneralizedLyapunov, LongDoubleInstantiation) {
  using LMat = Matrix<long double>;
  LMat a(2, 2);
  a << 1, 0.5L, -0.5L, 0;
  LMat w = LMat::Zero(2, 2);
  w(0, 0) = 2;
  const auto sol = solve_generalized_lyapunov<long double>(LMat::Identity(2, 2), a, w, GramianSide::Controllability);
  EXPECT_LE(double((sol.x + LMat::Identity(2, 2)).norm()), 1e-16);
}

// ------------------------------------------------------------------------ svd

TEST(Svd, ZeroMatrixHasRankZero) {
  const auto s = svd(Mat::Zero(3, 2));
  EXPECT_EQ(s.numeric_rank, 0);
}

TEST(Svd, DiagonalRankOne) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = 2;
  const auto s = svd(m);
  EXPECT_EQ(s.numeric_rank, 1);
  EXPECT_DOUBLE_EQ(s.singular_values(0), 2.0);
  EXPECT_DOUBLE_EQ(s.singular_values(1), 0.0);
  EXPECT_NEAR(std::abs(s.u(0, 0)), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(s.v(0, 0)), 1.0, 1e-15);
}

TEST(Svd, RandomReconstructionAndOrdering) {
  oracle::Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Mat m = rng.gaussian(4, 3);
    const auto s = svd(m);
    Mat sigma = Mat::Zero(4, 3);
    for (Eigen::Index i = 0; i < 3; ++i) sigma(i, i) = s.singular_values(i);
    EXPECT_LE((m - s.u * sigma * s.v.transpose()).norm(), 1e-12 * m.norm());
    for (Eigen::Index i = 1; i < 3; ++i) EXPECT_GE(s.singular_values(i - 1), s.singular_values(i));
    EXPECT_LE(orthogonality_error(s.u), 64 * 4 * kEps);
    EXPECT_LE(orthogonality_error(s.v), 64 * 3 * kEps);
  }
}

TEST(Svd, RejectsNaN) {
  Mat m = Mat::Zero(2, 2);
  m(1, 1) = std::nan("");
  EXPECT_THROW(svd(m), Error);
}

// ----------------------------------------------------------------- real_schur

TEST(RealSchur, DiagonalIsItsOwnSchurForm) {
  Mat m = Mat::Zero(3, 3);
  m.diagonal() << 3, -1, 2;
  const auto rs = real_schur<double>(m);
  EXPECT_LE((rs.q * m * rs.q.transpose() - rs.t).norm(), 1e-14);
  std::vector<double> d;
  for (Eigen::Index i = 0; i < 3; ++i) d.push_back(rs.t(i, i));
  std::sort(d.begin(), d.end());
  EXPECT_NEAR(d[0], -1, 1e-14);
  EXPECT_NEAR(d[1], 2, 1e-14);
  EXPECT_NEAR(d[2], 3, 1e-14);
}

TEST(RealSchur, NilpotentAlreadyTriangular) {
  Mat m(2, 2);
  m << 0, 1, 0, 0;
  const auto rs = real_schur<double>(m);
  EXPECT_LE((rs.t - m).norm(), 1e-15);
  EXPECT_EQ(rs.nonzero_count, 0);
}

TEST(RealSchur, SymmetricMatchesCharacteristicPolynomialRoots) {
  oracle::Rng rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    Mat g = rng.gaussian(5, 5);
    const Mat m = (g + g.transpose()) / 2;
    const auto rs = real_schur<double>(m);
    EXPECT_LE((rs.q * m * rs.q.transpose() - rs.t).norm(), 1e-12 * m.norm());
    std::vector<double> diag;
    for (Eigen::Index i = 0; i < 5; ++i) diag.push_back(rs.t(i, i));
    std::sort(diag.begin(), diag.end());
    const double bound = m.cwiseAbs().rowwise().sum().maxCoeff() + 1.0;
    auto roots = oracle::real_roots(oracle::characteristic_polynomial(m), -bound, bound);
    ASSERT_EQ(roots.size(), 5u) << "trial " << trial;
    std::sort(roots.begin(), roots.end());
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(diag[i], roots[i], 1e-10);
  }
}

TEST(RealSchur, ZeroEigenvaluesTrail) {
  oracle::Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = rng.integer(2, 9);
    const Eigen::Index zeros = rng.integer(1, int(n) - 1);
    Mat blk = Mat::Zero(n, n);
    blk.topLeftCorner(n - zeros, n - zeros) = rng.with_real_parts(n - zeros, -2, 2, false);
    for (Eigen::Index i = 0; i < n - zeros; ++i) blk(i, i) += blk(i, i) >= 0 ? 0.5 : -0.5;
    const Mat t = rng.well_conditioned(n);
    const Mat m = t * blk * t.inverse();
    const auto rs = real_schur<double>(m);
    EXPECT_EQ(rs.nonzero_count, n - zeros);
    EXPECT_LE(orthogonality_error(rs.q), 64 * n * kEps);
    EXPECT_LE((rs.q * m * rs.q.transpose() - rs.t).norm(), 1e-12 * m.norm());
    EXPECT_LE(rs.t.bottomRightCorner(zeros, zeros).diagonal().cwiseAbs().maxCoeff(), 1e-10 * m.norm());
  }
}
