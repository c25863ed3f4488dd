#include <gtest/gtest.h>

#include <cmath>

#include "redmash/errors.hpp"
#include "redmash/hybrid.hpp"
#include "redmash/models.hpp"
#include "redmash/redfield.hpp"
#include "redmash/spin_propagator.hpp"

using namespace redmash;

namespace {

// Flat potentials with constant bias and coupling: frozen nuclei.
class FrozenModel : public DiabaticModel {
 public:
  std::size_t dof() const override { return 1; }
  DiabaticPoint evaluate(const Vec&) const override {
    return {0.0, 0.8, 0.6, Vec::Zero(1), Vec::Zero(1), Vec::Zero(1)};
  }
};

class FixedRates : public Dissipator {
 public:
  explicit FixedRates(RateSet r) : r_(r) {}
  RateSet rates(const AdiabaticFrame&) const override { return r_; }
  Vec grad_omega_ls(const AdiabaticFrame& f, const RateSet&) const override { return Vec::Zero(f.nac.size()); }

 private:
  RateSet r_;
};

HybridState state_with_spin(const SpinVector& s) {
  HybridState h;
  h.spin = s;
  h.active = s.z() > 0.0 ? 1 : -1;
  h.rates.omega_ls = 1.0;
  return h;
}

}  // namespace

TEST(HybridSpinPropagate, EqualRatesIsRotation) {
  const SpinVector s(0.3, -0.5, 0.4);
  const SpinVector out = hybrid_spin_propagate(s, 1.4, 0.3, 0.7, 0.7, 0.9);
  const SpinVector rot = rotation_propagator({0.0, 0.6, 1.4}, 0.9) * s;
  EXPECT_LT((out - rot).norm(), 1e-15);
}

TEST(HybridSpinPropagate, TransverseGrowthFollowsHemisphere) {
  // Upper hemisphere grows when gamma_- > gamma_+; lower hemisphere shrinks.
  const double gp = 0.2, gm = 0.9, dt = 0.3;
  const double factor = std::exp(0.5 * (gm - gp) * dt);
  const SpinVector up = hybrid_spin_propagate({0.3, 0.4, 0.5}, 0.0, 0.0, gp, gm, dt);
  EXPECT_NEAR(up.x(), 0.3 * factor, 1e-15);
  EXPECT_NEAR(up.y(), 0.4 * factor, 1e-15);
  EXPECT_DOUBLE_EQ(up.z(), 0.5);
  const SpinVector down = hybrid_spin_propagate({0.3, 0.4, -0.5}, 0.0, 0.0, gp, gm, dt);
  EXPECT_NEAR(down.x(), 0.3 / factor, 1e-15);
  EXPECT_NEAR(down.y(), 0.4 / factor, 1e-15);
  EXPECT_DOUBLE_EQ(down.z(), -0.5);
}

TEST(JumpProbabilities, HemisphereSelection) {
  RateSet r;
  r.gamma_plus = 0.1;
  r.gamma_minus = 0.5;
  r.gamma_z = 0.05;
  const JumpProbabilities up = jump_probabilities({0, 0, 0.2}, r);
  EXPECT_EQ(up.minus, 0.5);
  EXPECT_EQ(up.plus, 0.0);
  EXPECT_EQ(up.z, 0.05);
  const JumpProbabilities down = jump_probabilities({0, 0, -0.2}, r);
  EXPECT_EQ(down.plus, 0.1);
  EXPECT_EQ(down.minus, 0.0);
  EXPECT_EQ(down.z, 0.05);
}

TEST(ApplyJump, SigmaZIsInvolution) {
  RandomStream rng(1, 0, RandomStream::Purpose::resample);
  const SpinVector s(0.31, -0.72, 0.4);
  HybridState h = state_with_spin(s);
  h = apply_jump(std::move(h), JumpChannel::z, rng);
  EXPECT_EQ(h.spin, SpinVector(-0.31, 0.72, 0.4));
  EXPECT_EQ(h.weight.factor, 1.0);
  h = apply_jump(std::move(h), JumpChannel::z, rng);
  EXPECT_EQ(h.spin, s);
}

TEST(ApplyJump, SigmaMinusReweights) {
  RandomStream rng(1, 0, RandomStream::Purpose::resample);
  HybridState h = state_with_spin({0.5, 0.0, 0.4});
  ASSERT_DOUBLE_EQ(h.weight.prefactor(OperatorClass::population), 2.0);
  h = apply_jump(std::move(h), JumpChannel::minus, rng);
  EXPECT_DOUBLE_EQ(h.weight.prefactor(OperatorClass::population), 1.6);
  EXPECT_LT(h.spin.z(), 0.0);
  EXPECT_NEAR(h.spin.norm(), 1.0, 1e-14);
  EXPECT_EQ(h.active, -1);
  EXPECT_DOUBLE_EQ(h.bath_energy, 1.0);
}

TEST(ApplyJump, SigmaPlusResampleMean) {
  const int n = 100000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    RandomStream rng(2, static_cast<std::uint64_t>(i), RandomStream::Purpose::resample);
    HybridState h = state_with_spin({0.0, 0.6, -0.8});
    h = apply_jump(std::move(h), JumpChannel::plus, rng);
    EXPECT_EQ(h.active, 1);
    const double w = 2.0 * std::abs(h.spin.z()) * sgn(h.spin.z());
    sum += w;
    sum2 += w * w;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sum2 / n - mean * mean);
  EXPECT_LT(std::abs(mean - 1.0), 4.0 * sd / std::sqrt(n));
}

TEST(HybridStep, WithoutBathMatchesMashBitwise) {
  CavityConfig cfg;
  cfg.photon_coupling = false;
  const TrajectorySetup mash = cavity_setup(cfg, Method::mash);
  const TrajectorySetup hyb = cavity_setup(cfg, Method::hybrid);
  int hops = 0;
  for (std::uint64_t n = 0; n < 20; ++n) {
    RandomStream init(7, n, RandomStream::Purpose::initial);
    RandomStream jumps(7, n, RandomStream::Purpose::jumps);
    auto [q, p] = mash.sample_nuclei(init);
    const SpinVector s = sample_sphere(init, mash.hemisphere);
    MashState a = make_mash_state(*mash.model, q, p, s);
    HybridState b = make_hybrid_state(*hyb.model, *hyb.dissipator, q, p, s);
    HopStats st;
    for (int k = 0; k < 500; ++k) {
      a = mash_step(std::move(a), *mash.model, 10.0, {}, &st);
      b = hybrid_step(std::move(b), *hyb.model, *hyb.dissipator, 10.0, jumps);
      ASSERT_TRUE(a.q == b.q && a.p == b.p && a.spin == b.spin && a.active == b.active) << "trajectory " << n;
    }
    EXPECT_TRUE(b.jumps.empty());
    hops += st.hops;
  }
  EXPECT_GT(hops, 0);
}

TEST(HybridStep, FrozenNucleiReproduceMasterEquation) {
  RateSet r;
  r.gamma_plus = 0.15;
  r.gamma_minus = 0.45;
  r.gamma_z = 0.05;
  r.omega_ls = 2.0;
  FrozenModel model;
  FixedRates diss(r);
  const double dt = 0.01, t_end = 3.0;
  const int n_traj = 20000;
  const int n_steps = static_cast<int>(t_end / dt + 0.5);
  // Correlation of sigma_z (as the initial operator, rho0 = (I + sz)/2) with sigma_z(t).
  double c0 = 0.0, cz = 0.0, cz2 = 0.0;
  double min_factor = 1.0;
  for (int n = 0; n < n_traj; ++n) {
    RandomStream init(3, static_cast<std::uint64_t>(n), RandomStream::Purpose::initial);
    RandomStream rng(3, static_cast<std::uint64_t>(n), RandomStream::Purpose::jumps);
    const SpinVector s0 = sample_sphere(init, Hemisphere::full);
    HybridState h = make_hybrid_state(model, diss, Vec::Zero(1), Vec::Zero(1), s0);
    const PauliExpansion a{0.5, 0.0, 0.0, 0.5};
    c0 += 2.0 * correlation_integrand(a, s0, h.weight, {1, 0, 0, 0}, h.spin);
    for (int k = 0; k < n_steps; ++k) h = hybrid_step(std::move(h), model, diss, dt, rng);
    const double v = 2.0 * correlation_integrand(a, s0, h.weight, {0, 0, 0, 1}, h.spin);
    cz += v;
    cz2 += v * v;
    min_factor = std::min(min_factor, h.weight.factor);
  }
  const double mean = cz / n_traj;
  const double sem = std::sqrt((cz2 / n_traj - mean * mean) / n_traj);
  const double exact = propagate_static(r, {0.0, 0.0, 1.0}, std::vector<double>{0.0, t_end}).back().rz;
  EXPECT_NEAR(c0 / n_traj, 1.0, 0.02);
  EXPECT_LT(std::abs(mean - exact), 4.0 * sem);
  EXPECT_GT(min_factor, 0.0);
}

TEST(HybridStep, ExcessiveJumpProbabilityRaises) {
  RateSet r;
  r.gamma_minus = 50.0;
  r.omega_ls = 1.0;
  FrozenModel model;
  FixedRates diss(r);
  HybridState h = make_hybrid_state(model, diss, Vec::Zero(1), Vec::Zero(1), {0.0, 0.0, 1.0});
  RandomStream rng(1, 0, RandomStream::Purpose::jumps);
  EXPECT_THROW(hybrid_step(h, model, diss, 0.01, rng), StepTooLarge);
}
