#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <vector>

#include "redmash/errors.hpp"
#include "redmash/redfield.hpp"
#include "redmash/unravel.hpp"

using namespace redmash;

namespace {

// Fraction of single steps from `spin` that fire each channel.
std::array<double, 3> jump_fractions(const SpinVector& spin, const SchedulePoint& c, double dt, int n) {
  std::array<double, 3> count{0, 0, 0};
  for (int i = 0; i < n; ++i) {
    RandomStream rng(4, static_cast<std::uint64_t>(i), RandomStream::Purpose::jumps);
    QuantumTrajectory t;
    t.spin = spin;
    t = pdp_step(std::move(t), c, dt, rng);
    for (const auto& j : t.jumps) count[static_cast<std::size_t>(j.channel)] += 1.0;
  }
  for (auto& x : count) x /= n;
  return count;
}

}  // namespace

TEST(PdpStep, NoRatesConservesNorm) {
  const SchedulePoint c{1.7, 0.4, 0.0, 0.0, 0.0};
  RandomStream rng(1, 0, RandomStream::Purpose::jumps);
  QuantumTrajectory t;
  t.spin = SpinVector(0.6, 0.0, 0.8);
  for (int i = 0; i < 1000; ++i) t = pdp_step(std::move(t), c, 0.01, rng);
  EXPECT_NEAR(t.spin.norm(), 1.0, 1e-15);
  EXPECT_TRUE(t.jumps.empty());
  EXPECT_NEAR(t.t, 10.0, 1e-10);
}

TEST(PdpStep, PoleJumpProbabilities) {
  const double dt = 0.01;
  const int n = 200000;
  const SchedulePoint c{1.0, 0.0, 0.0, 4.0, 0.0};
  // The lower adiabat (south pole) cannot emit, and gamma_+ = 0 forbids absorption.
  const auto south = jump_fractions({0.0, 0.0, -1.0}, c, dt, n);
  EXPECT_EQ(south[0], 0.0);
  EXPECT_EQ(south[1], 0.0);
  // From the north pole sigma- fires with probability gamma_- dt.
  const auto north = jump_fractions({0.0, 0.0, 1.0}, c, dt, n);
  const double p = 4.0 * dt;
  EXPECT_EQ(north[0], 0.0);
  EXPECT_LT(std::abs(north[1] - p), 4.0 * std::sqrt(p * (1.0 - p) / n));
}

TEST(PdpStep, EquatorDriftTowardsLowerState) {
  const SchedulePoint c{0.0, 0.0, 0.2, 0.9, 0.0};
  const Eigen::Vector3d d = pdp_drift(c, {1.0, 0.0, 0.0});
  EXPECT_DOUBLE_EQ(d.z(), -0.5 * (0.9 - 0.2));
  EXPECT_DOUBLE_EQ(d.x(), 0.0);
}

TEST(PdpStep, ExcessiveJumpProbabilityRaises) {
  const SchedulePoint c{0.0, 0.0, 0.0, 30.0, 0.0};
  RandomStream rng(1, 0, RandomStream::Purpose::jumps);
  QuantumTrajectory t;
  EXPECT_THROW(pdp_step(t, c, 0.01, rng), StepTooLarge);
}

TEST(PdpStep, SigmaZJumpRotatesTransverse) {
  const SchedulePoint c{0.0, 0.0, 0.0, 0.0, 9.0};
  for (std::uint64_t i = 0; i < 200; ++i) {
    RandomStream rng(2, i, RandomStream::Purpose::jumps);
    QuantumTrajectory t;
    t.spin = SpinVector(0.6, 0.0, 0.8);
    t = pdp_step(std::move(t), c, 0.01, rng);
    if (!t.jumps.empty()) {
      EXPECT_NEAR(t.spin.x(), -0.6, 1e-14);
      EXPECT_NEAR(t.spin.z(), 0.8, 1e-14);
      return;
    }
  }
  FAIL() << "no sigma_z jump in 200 tries at probability 0.09";
}

TEST(EnsembleDensity, SingleTrajectoryAtNorthPole) {
  const std::vector<SpinVector> spins{{0.0, 0.0, 1.0}};
  const BlochEstimate e = ensemble_density(spins);
  EXPECT_EQ(e.mean, Eigen::Vector3d(0, 0, 1));
  EXPECT_THROW(ensemble_density(std::span<const SpinVector>{}), Error);
}

TEST(RunUnravel, ZeroTemperatureAbsorbs) {
  const SchedulePoint c{1.0, 0.0, 0.0, 1.0, 0.0};
  const DrivenSchedule s({0.0, 40.0}, {c, c});
  const auto grid = uniform_grid(0.0, 40.0, 5);
  const UnravelResult r = run_unravel(s, {0.0, 0.0, 1.0}, grid, 500, 3, 0.01);
  EXPECT_NEAR(r.bloch.back().mean.z(), -1.0, 1e-12);
  EXPECT_NEAR(r.minus_jumps.back(), 1.0, 1e-12);
}

TEST(RunUnravel, MatchesMasterEquationAndShrinksAsInverseRoot) {
  const SchedulePoint c{2.0, 0.0, 0.15, 0.45, 0.05};
  const DrivenSchedule s({0.0, 3.0}, {c, c});
  const auto grid = uniform_grid(0.0, 3.0, 7);
  const BlochState rho0{0.6, 0.0, 0.8};
  const auto exact = propagate_static(c, rho0, grid);
  const UnravelResult small = run_unravel(s, rho0, grid, 2000, 5, 0.01);
  const UnravelResult large = run_unravel(s, rho0, grid, 8000, 6, 0.01);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    for (int k = 0; k < 3; ++k) {
      EXPECT_LT(std::abs(large.bloch[i].mean[k] - exact[i].vec()[k]), 4.0 * large.bloch[i].sem[k] + 1e-12);
      const double ratio = large.bloch[i].sem[k] / small.bloch[i].sem[k];
      EXPECT_NEAR(ratio, 0.5, 0.06);
    }
  }
}
