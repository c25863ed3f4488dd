#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "redmash/errors.hpp"
#include "redmash/models.hpp"
#include "redmash/two_level.hpp"
#include "redmash/units.hpp"

using namespace redmash;

namespace {

constexpr double pi = std::numbers::pi;

// Constant bias and coupling, no nuclear dependence.
class ConstantModel : public DiabaticModel {
 public:
  ConstantModel(double bias, double coupling) : bias_(bias), coupling_(coupling) {}
  std::size_t dof() const override { return 1; }
  DiabaticPoint evaluate(const Vec&) const override {
    return {0.0, bias_, coupling_, Vec::Zero(1), Vec::Zero(1), Vec::Zero(1)};
  }

 private:
  double bias_;
  double coupling_;
};

Eigen::Matrix2cd adiabatic_sandwich(double theta, const Eigen::Matrix2cd& op) {
  const Eigen::Matrix2cd u = adiabatic_vectors(theta).cast<std::complex<double>>();
  return u.adjoint() * op * u;
}

}  // namespace

TEST(Adiabatize, ConstantCouplingGapAndAngle) {
  ConstantModel model(1.0, 1.0);
  const AdiabaticFrame f = adiabatize(model, Vec::Zero(1));
  EXPECT_NEAR(f.gap, 2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(f.theta, pi / 8.0, 1e-12);
  EXPECT_EQ(f.nac.size(), 1);
  EXPECT_EQ(f.nac(0), 0.0);
}

TEST(Adiabatize, CavityGapAtOrigin) {
  CavityConfig cfg;
  LinearCouplingModel model(cfg.eps(), cfg.delta(), Vec::Constant(1, cfg.omega0()),
                            Vec::Constant(1, cfg.bias_slope()));
  const AdiabaticFrame f = adiabatize(model, Vec::Zero(1));
  EXPECT_NEAR(f.gap * units::hartree_in_ev, 2.0 * std::sqrt(1.1225), 1e-10);
  EXPECT_NEAR(f.gap * units::hartree_in_ev, 2.1190, 1e-4);
}

TEST(Adiabatize, CavityNacMatchesClosedFormAndFiniteDifference) {
  CavityConfig cfg;
  const double slope = cfg.bias_slope();
  LinearCouplingModel model(cfg.eps(), cfg.delta(), Vec::Constant(1, cfg.omega0()), Vec::Constant(1, slope));
  RandomStream rng(7, 0, RandomStream::Purpose::test);
  for (int i = 0; i < 10; ++i) {
    const double q_ang = rng.uniform(-2.0, 1.5);
    const double x = q_ang * units::angstrom * std::sqrt(cfg.mass());
    const AdiabaticFrame f = adiabatize(model, Vec::Constant(1, x));
    const double bias = cfg.eps() + slope * x;
    const double closed = -cfg.delta() * slope / (2.0 * (bias * bias + cfg.delta() * cfg.delta()));
    EXPECT_NEAR(f.nac(0), closed, 1e-10 * std::abs(closed));

    // <upper| d/dx |lower> from finite differences of the eigenvectors.
    const double h = 1e-4;
    const AdiabaticFrame fp = adiabatize(model, Vec::Constant(1, x + h), &f);
    const AdiabaticFrame fm = adiabatize(model, Vec::Constant(1, x - h), &f);
    const Eigen::Matrix2d dv = (adiabatic_vectors(fp.theta) - adiabatic_vectors(fm.theta)) / (2.0 * h);
    const double fd = adiabatic_vectors(f.theta).col(0).dot(dv.col(1));
    EXPECT_NEAR(f.nac(0), fd, 1e-6 * std::abs(closed));
  }
}

TEST(Adiabatize, RebuildsDiabaticMatrix) {
  CavityConfig cfg;
  LinearCouplingModel model(cfg.eps(), cfg.delta(), Vec::Constant(1, cfg.omega0()),
                            Vec::Constant(1, cfg.bias_slope()));
  for (double x : {-80.0, -10.0, 0.0, 3.0, 40.0}) {
    const Vec q = Vec::Constant(1, x);
    const DiabaticPoint d = model.evaluate(q);
    Eigen::Matrix2d v;
    v << d.v0 + d.bias, d.coupling, d.coupling, d.v0 - d.bias;
    const Eigen::Matrix2d rebuilt = diabatic_matrix(adiabatize(model, q));
    EXPECT_LT((rebuilt - v).cwiseAbs().maxCoeff(), 1e-12 * (1.0 + v.cwiseAbs().maxCoeff()));
  }
}

TEST(Adiabatize, DegenerateGapThrows) {
  ConstantModel model(0.0, 0.0);
  EXPECT_THROW(adiabatize(model, Vec::Zero(1)), DegenerateGap);
}

TEST(MashKernel, Examples) {
  const PauliExpansion a = mash_kernel({0.0, 0.0, 0.3});
  EXPECT_DOUBLE_EQ(a.aI, 0.5);
  EXPECT_DOUBLE_EQ(a.ax, 0.0);
  EXPECT_DOUBLE_EQ(a.ay, 0.0);
  EXPECT_DOUBLE_EQ(a.az, 0.5);
  const PauliExpansion b = mash_kernel({1.0, 0.0, -0.2});
  EXPECT_DOUBLE_EQ(b.aI, 0.5);
  EXPECT_DOUBLE_EQ(b.ax, 0.5);
  EXPECT_DOUBLE_EQ(b.ay, 0.0);
  EXPECT_DOUBLE_EQ(b.az, -0.5);
  EXPECT_THROW(mash_kernel({1.0, 0.0, 0.0}), EquatorUndefined);
}

TEST(MashKernel, SigmaZTraceIsSign) {
  RandomStream rng(3, 0, RandomStream::Purpose::test);
  const PauliExpansion sz{0.0, 0.0, 0.0, 1.0};
  for (int i = 0; i < 100; ++i) {
    const SpinVector s = sample_sphere(rng, Hemisphere::full);
    EXPECT_DOUBLE_EQ(kernel_trace(sz, s), sgn(s.z()));
  }
}

TEST(ExpandOperator, Identity) {
  for (double theta : {-1.0, 0.0, 0.3, pi / 8.0, 1.4}) {
    const PauliExpansion e = expand_diabatic_operator(theta, Eigen::Matrix2cd::Identity());
    EXPECT_NEAR(e.aI, 1.0, 1e-15);
    EXPECT_NEAR(e.ax, 0.0, 1e-15);
    EXPECT_NEAR(e.ay, 0.0, 1e-15);
    EXPECT_NEAR(e.az, 0.0, 1e-15);
  }
}

TEST(ExpandOperator, DiabaticSigmaZAtPiOverEight) {
  const PauliExpansion e = expand_diabatic_operator(pi / 8.0, diabatic_sigma_z());
  EXPECT_NEAR(e.aI, 0.0, 1e-15);
  EXPECT_NEAR(e.az, std::cos(pi / 4.0), 1e-12);
  EXPECT_NEAR(std::abs(e.ax), std::sin(pi / 4.0), 1e-12);
  EXPECT_NEAR(e.ay, 0.0, 1e-15);
}

TEST(ExpandOperator, OffDiagonalDipoleMatchesSandwich) {
  const double mu = 5.0 * units::debye;
  Eigen::Matrix2cd dipole;
  dipole << 0.0, mu, mu, 0.0;
  for (double theta : {-1.2, -0.4, 0.1, pi / 8.0, 0.9}) {
    const PauliExpansion e = expand_diabatic_operator(theta, dipole);
    const Eigen::Matrix2cd direct = adiabatic_sandwich(theta, dipole);
    EXPECT_NEAR(std::abs(direct(0, 1)), mu * std::abs(std::cos(2.0 * theta)), 1e-14);
    EXPECT_NEAR(std::hypot(e.ax, e.ay), std::abs(direct(0, 1)), 1e-14);
    EXPECT_LT((to_adiabatic_matrix(e) - direct).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(ExpandOperator, RoundTripIsIdentity) {
  RandomStream rng(11, 0, RandomStream::Purpose::test);
  for (int i = 0; i < 50; ++i) {
    const double a = rng.normal(), d = rng.normal();
    const std::complex<double> c(rng.normal(), rng.normal());
    Eigen::Matrix2cd op;
    op << a, c, std::conj(c), d;
    const double theta = rng.uniform(-pi / 2.0, pi / 2.0);
    const Eigen::Matrix2cd back = to_diabatic_operator(theta, expand_diabatic_operator(theta, op));
    EXPECT_LT((back - op).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(SampleSphere, HemisphereMoments) {
  RandomStream rng(5, 0, RandomStream::Purpose::test);
  const int n = 100000;
  double sum_sgn = 0.0, sum_abs = 0.0, sum_abs2 = 0.0, sum_up = 0.0, sum_up2 = 0.0;
  bool all_up = true;
  for (int i = 0; i < n; ++i) {
    const SpinVector s = sample_sphere(rng, Hemisphere::full);
    EXPECT_NEAR(s.norm(), 1.0, 1e-12);
    sum_sgn += sgn(s.z());
    sum_abs += std::abs(s.z());
    sum_abs2 += s.z() * s.z();
    const SpinVector u = sample_sphere(rng, Hemisphere::upper);
    all_up = all_up && u.z() > 0.0;
    const double w = 2.0 * std::abs(u.z()) * sgn(u.z());
    sum_up += w;
    sum_up2 += w * w;
  }
  EXPECT_TRUE(all_up);
  EXPECT_LT(std::abs(sum_sgn / n), 3.0 / std::sqrt(n));
  const double sd_abs = std::sqrt(sum_abs2 / n - std::pow(sum_abs / n, 2));
  EXPECT_LT(std::abs(sum_abs / n - 0.5), 3.0 * sd_abs / std::sqrt(n));
  const double sd_up = std::sqrt(sum_up2 / n - std::pow(sum_up / n, 2));
  EXPECT_LT(std::abs(sum_up / n - 1.0), 3.0 * sd_up / std::sqrt(n));
}

TEST(SpinFromAmplitudes, Examples) {
  const double r = 1.0 / std::sqrt(2.0);
  const std::complex<double> i(0.0, 1.0);
  EXPECT_LT((spin_from_amplitudes(1.0, 0.0) - SpinVector(0, 0, -1)).norm(), 1e-15);
  EXPECT_LT((spin_from_amplitudes(r, r) - SpinVector(1, 0, 0)).norm(), 1e-15);
  // S_y = 2 Im[c1* c0] is -1 here; this sign makes dS_y/dt = +omega S_x.
  EXPECT_LT((spin_from_amplitudes(r, i * r) - SpinVector(0, -1, 0)).norm(), 1e-15);
  EXPECT_LT((spin_from_amplitudes(i * r, r) - SpinVector(0, 1, 0)).norm(), 1e-15);
  EXPECT_THROW(spin_from_amplitudes(1.0, 1.0), NotNormalized);
}
