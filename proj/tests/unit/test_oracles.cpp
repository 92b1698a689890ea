// Checks on the reference implementations themselves.

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "msdc/identifier.hpp"
#include "oracles.hpp"

using namespace msdc;

TEST(CharBoundaryOracle, HandComputedCrossings) {
  // b = s alpha + beta = 7, omega^2 = (49 + sqrt(2401 + 4)) / 2, tau_c = atan2(7 omega, 1) / omega.
  EXPECT_NEAR(oracle::first_crossing_delay(1.0, 2.0, 5.0), 0.221438, 2e-6);
  EXPECT_EQ(oracle::char_boundary_oracle(1.0, 2.0, 5.0, 0.2), oracle::Verdict::Stable);
  EXPECT_EQ(oracle::char_boundary_oracle(1.6, 2.0, 5.0, 0.2), oracle::Verdict::Unstable);
  EXPECT_EQ(oracle::char_boundary_oracle(0.05, 0.05, 5.0, 2.0), oracle::Verdict::Stable);
}

TEST(CharBoundaryOracle, DelayFreeCases) {
  EXPECT_EQ(oracle::char_boundary_oracle(-1.0, 2.0, 5.0, 0.0), oracle::Verdict::Unstable);
  EXPECT_EQ(oracle::char_boundary_oracle(1.0, -7.0, 5.0, 0.0), oracle::Verdict::Unstable);
  EXPECT_EQ(oracle::char_boundary_oracle(1.0, 2.0, 5.0, 0.0), oracle::Verdict::Stable);
  EXPECT_EQ(oracle::char_boundary_oracle(0.0, 2.0, 5.0, 0.1), oracle::Verdict::Indeterminate);
}

TEST(CharBoundaryOracle, ModulusConditionAtCrossing) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> a(0.01, 2.0), b(0.01, 8.0);
  for (int i = 0; i < 100; ++i) {
    const double alpha = a(rng), beta = b(rng);
    const double bb = 5.0 * alpha + beta;
    const double w = std::sqrt((bb * bb + std::sqrt(bb * bb * bb * bb + 4 * alpha * alpha)) / 2);
    EXPECT_NEAR(oracle::first_crossing_delay(alpha, beta, 5.0), std::atan2(bb * w, alpha) / w, 1e-9);
  }
}

TEST(CovarianceRls, AgreesWithBatchAtUnitForgetting) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  Eigen::MatrixX3d a(60, 3);
  Eigen::VectorXd y(60);
  oracle::CovarianceRls rls(1.0, 1e3);
  for (int k = 0; k < 60; ++k) {
    a.row(k) << nd(rng), nd(rng), nd(rng);
    y(k) = nd(rng);
    rls.update(a.row(k).transpose(), y(k));
  }
  EXPECT_LT((rls.params() - batch_ls(a, y)).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(Companion, QuadraticExample) {
  const auto c = oracle::companion_from_roots({1.0, 2.0});
  EXPECT_DOUBLE_EQ(c(0, 0), 3.0);
  EXPECT_DOUBLE_EQ(c(0, 1), -2.0);
  EXPECT_DOUBLE_EQ(c(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(c(1, 1), 0.0);
}
