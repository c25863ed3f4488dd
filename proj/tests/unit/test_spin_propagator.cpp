#include <gtest/gtest.h>

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "redmash/rng.hpp"
#include "redmash/spin_propagator.hpp"

using namespace redmash;

namespace {

double max_diff(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST(SpinPropagator, MatchesEigenMatrixExponential) {
  RandomStream rng(1, 0, RandomStream::Purpose::test);
  for (int i = 0; i < 200; ++i) {
    SpinGenerator g{rng.normal(0.0, 3.0), rng.normal(), rng.normal()};
    if (i % 4 == 1) g.growth = 0.0;
    if (i % 4 == 2) g.tau = 0.0;
    const double h = rng.uniform(0.0, 2.0);
    const Eigen::Matrix3d reference = (g.matrix() * h).exp();
    EXPECT_LT(max_diff(spin_propagator(g, h), reference), 1e-12 * (1.0 + reference.cwiseAbs().maxCoeff()))
        << "omega=" << g.omega << " tau=" << g.tau << " growth=" << g.growth << " h=" << h;
  }
}

TEST(SpinPropagator, RotationIsOrthogonal) {
  const SpinGenerator g{2.3, -0.7, 0.0};
  const Eigen::Matrix3d r = spin_propagator(g, 1.7);
  EXPECT_LT(max_diff(r.transpose() * r, Eigen::Matrix3d::Identity()), 1e-14);
  EXPECT_NEAR(r.determinant(), 1.0, 1e-14);
}

TEST(SpinPropagator, SemigroupProperty) {
  const SpinGenerator g{1.1, 0.4, -0.3};
  EXPECT_LT(max_diff(spin_propagator(g, 0.3) * spin_propagator(g, 0.5), spin_propagator(g, 0.8)), 1e-14);
}

TEST(Expm3, LargeNormScalingAndSquaring) {
  Eigen::Matrix3d a;
  a << 0.5, -20.0, 3.0, 20.0, 0.5, 0.0, -3.0, 0.0, 0.0;
  const Eigen::Matrix3d reference = a.exp();
  EXPECT_LT(max_diff(expm3(a), reference), 1e-11 * reference.cwiseAbs().maxCoeff());
}
