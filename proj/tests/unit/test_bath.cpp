#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "redmash/bath.hpp"
#include "redmash/errors.hpp"
#include "redmash/units.hpp"

using namespace redmash;

namespace {

constexpr double pi = std::numbers::pi;

const DebyeBath kBath{0.5, 10.0, 0.25};

// Gamma(w) from the Matsubara expansion of the Debye correlation function,
// C(t) = c0 exp(-Omega t) + sum_k c_k exp(-nu_k t), Gamma = sum c / (rate - i w).
std::complex<double> matsubara_gamma(const DebyeBath& b, double omega, int n_terms = 2000000) {
  const std::complex<double> i(0.0, 1.0);
  const double l = b.lambda, w_c = b.omega_c, beta = b.beta;
  const std::complex<double> c0 = 0.25 * l * w_c * (1.0 / std::tan(0.5 * beta * w_c) - i);
  std::complex<double> g = c0 / (w_c - i * omega);
  for (int k = n_terms; k >= 1; --k) {
    const double nu = 2.0 * pi * k / beta;
    const double ck = (l * w_c / beta) * nu / (nu * nu - w_c * w_c);
    g += ck / (nu - i * omega);
  }
  return g;
}

}  // namespace

TEST(DebyeSpectralDensity, Examples) {
  EXPECT_EQ(debye_spectral_density(kBath, 0.0), 0.0);
  EXPECT_NEAR(debye_spectral_density(kBath, 1.0), 5.0 / 202.0, 1e-15);
  EXPECT_NEAR(debye_spectral_density(kBath, 10.0), 0.5 / 4.0, 1e-15);
  EXPECT_DOUBLE_EQ(debye_spectral_density(kBath, -3.0), -debye_spectral_density(kBath, 3.0));
  // Maximum at Omega.
  EXPECT_LT(debye_spectral_density(kBath, 9.9), debye_spectral_density(kBath, 10.0));
  EXPECT_LT(debye_spectral_density(kBath, 10.1), debye_spectral_density(kBath, 10.0));
}

TEST(GammaReal, Examples) {
  EXPECT_NEAR(gamma_real(kBath, 1.0), 0.111902, 1e-6);
  EXPECT_NEAR(gamma_real(kBath, 0.0), 0.1, 1e-15);
  EXPECT_NEAR(gamma_real(kBath, 1e-9), 0.1, 1e-9);
  EXPECT_NEAR(gamma_real(kBath, -1e-9), 0.1, 1e-9);
}

TEST(GammaReal, DetailedBalance) {
  for (double w : {0.01, 0.3, 1.7, 5.0, 12.0, 40.0}) {
    EXPECT_NEAR(gamma_real(kBath, -w), std::exp(-kBath.beta * w) * gamma_real(kBath, w),
                1e-14 * gamma_real(kBath, w));
  }
}

TEST(GammaImag, MatchesMatsubaraExpansion) {
  for (double w : {-30.0, -5.0, -1.0, -0.1, 0.0, 0.2, 1.0, 2.828, 10.0, 45.0}) {
    const std::complex<double> ref = matsubara_gamma(kBath, w);
    EXPECT_NEAR(gamma_real(kBath, w), ref.real(), 1e-6 * std::abs(ref)) << "w=" << w;
    EXPECT_NEAR(gamma_imag(kBath, w), ref.imag(), 1e-5 * std::abs(ref)) << "w=" << w;
  }
}

TEST(GammaImag, NoSymmetryAndGridConverged) {
  EXPECT_GT(std::abs(gamma_imag(kBath, 2.0) + gamma_imag(kBath, -2.0)), 1e-3);
  const double coarse = gamma_imag(kBath, 2.0, {1e-6, 8});
  const double fine = gamma_imag(kBath, 2.0, {1e-9, 12});
  EXPECT_LT(std::abs(coarse - fine), 1e-6 * std::abs(fine));
}

TEST(GammaImag, ZeroReorganisationEnergy) {
  const DebyeBath zero{0.0, 10.0, 0.25};
  for (double w : {-3.0, 0.0, 1.0, 20.0}) EXPECT_EQ(gamma_imag(zero, w), 0.0);
}

TEST(DebyeCorrelation, TableMatchesDirectQuadrature) {
  DebyeCorrelation table(kBath, 40.0, 2001);
  ASSERT_TRUE(table.tabulated());
  for (double w : {-37.0, -2.5, 0.0, 0.7, 2.9, 19.0}) {
    EXPECT_NEAR(table.im(w), gamma_imag(kBath, w), 1e-6 * (1.0 + std::abs(gamma_imag(kBath, w))));
    const double h = 1e-3;
    const double fd = (gamma_imag(kBath, w + h) - gamma_imag(kBath, w - h)) / (2.0 * h);
    EXPECT_NEAR(table.im_derivative(w), fd, 1e-4);
  }
}

TEST(VacuumGammaReal, CubicLawAndValue) {
  const PhotonBath vac;
  EXPECT_EQ(vacuum_gamma_real(vac, 0.0), 0.0);
  EXPECT_EQ(vacuum_gamma_real(vac, -0.1), 0.0);
  EXPECT_NEAR(vacuum_gamma_real(vac, 0.2) / vacuum_gamma_real(vac, 0.1), 8.0, 1e-12);
  const double w = 3.0 * units::ev;
  EXPECT_NEAR(w, 0.110247, 1e-6);
  const double c = 137.036;
  EXPECT_NEAR(vacuum_gamma_real(vac, w), 2.0 * std::pow(w, 3) / (3.0 * c * c * c), 1e-5 * vacuum_gamma_real(vac, w));
}

TEST(CavityGammaMinus, ResonanceAndDetuning) {
  PhotonBath bath;
  bath.cavity = CavityMode{2200.0 * units::wavenumber, 3.0 * units::ev, 18637.0, std::nullopt};
  PhotonBath vacuum;
  const PauliExpansion dipole{0.0, 1.3, 0.0, 0.0};
  AdiabaticFrame on;
  on.gap = 3.0 * units::ev;
  const double ratio = cavity_gamma_minus(on, dipole, bath) / cavity_gamma_minus(on, dipole, vacuum);
  EXPECT_NEAR(ratio, 18638.0, 1e-8 * 18638.0);

  // Far above the cavity the Lorentzian tail times 2 C1 is below 1e-3.
  AdiabaticFrame far;
  far.gap = 100.0 * units::ev;
  const double far_ratio = cavity_gamma_minus(far, dipole, bath) / cavity_gamma_minus(far, dipole, vacuum);
  EXPECT_GE(far_ratio, 1.0);
  EXPECT_LT(far_ratio - 1.0, 1e-3);

  const RateSet r = cavity_rates(on, dipole, bath);
  EXPECT_EQ(r.gamma_plus, 0.0);
  EXPECT_EQ(r.gamma_z, 0.0);
  EXPECT_EQ(r.omega_ls, on.gap);
}

TEST(CavityGammaMinus, TwoC1FromCoupling) {
  PhotonBath bath;
  const double g = 110.0 * units::wavenumber;
  const double kappa = 2200.0 * units::wavenumber;
  const double w = 3.0 * units::ev;
  EXPECT_NEAR(two_c1_from_coupling(bath, g, kappa, w), g * g / (kappa * vacuum_gamma_real(bath, w)), 1e-9);
  bath.cavity = CavityMode{kappa, w, std::nullopt, g};
  EXPECT_NEAR(cavity_enhancement(bath, w), two_c1_from_coupling(bath, g, kappa, w), 1e-9);
}

TEST(RedfieldRates, SpecialCases) {
  DebyeCorrelation corr(kBath);
  const BathCorrelation* baths[] = {&corr};
  const double gap = 2.0 * std::sqrt(2.0);

  const RateSet zero = redfield_rates(gap, PauliExpansion{}, baths);
  EXPECT_EQ(zero.total(), 0.0);
  EXPECT_EQ(zero.xi_minus, 0.0);
  EXPECT_EQ(zero.omega_ls, gap);

  const RateSet flip = redfield_rates(gap, PauliExpansion{0.0, 1.0, 0.0, 0.0}, baths);
  EXPECT_EQ(flip.gamma_z, 0.0);
  EXPECT_NEAR(flip.gamma_minus / flip.gamma_plus, std::exp(kBath.beta * gap), 1e-12);
  EXPECT_NEAR(flip.omega_ls, gap + flip.xi_minus - flip.xi_plus, 1e-14);

  const RateSet diag = redfield_rates(gap, PauliExpansion{0.0, 0.0, 0.0, 1.0}, baths);
  EXPECT_EQ(diag.gamma_plus, 0.0);
  EXPECT_EQ(diag.gamma_minus, 0.0);
  EXPECT_NEAR(diag.gamma_z, 2.0 * gamma_real(kBath, 0.0), 1e-15);
}

TEST(RedfieldRates, AdditiveOverBaths) {
  DebyeCorrelation a(kBath);
  DebyeCorrelation b(DebyeBath{0.3, 2.0, 0.25});
  const BathCorrelation* only_a[] = {&a};
  const BathCorrelation* only_b[] = {&b};
  const BathCorrelation* both[] = {&a, &b};
  const PauliExpansion c{0.1, 0.6, 0.0, 0.8};
  const RateSet ra = redfield_rates(1.5, c, only_a);
  const RateSet rb = redfield_rates(1.5, c, only_b);
  const RateSet r = redfield_rates(1.5, c, both);
  EXPECT_NEAR(r.gamma_minus, ra.gamma_minus + rb.gamma_minus, 1e-14);
  EXPECT_NEAR(r.gamma_plus, ra.gamma_plus + rb.gamma_plus, 1e-14);
  EXPECT_NEAR(r.gamma_z, ra.gamma_z + rb.gamma_z, 1e-14);
  EXPECT_NEAR(r.xi_minus, ra.xi_minus + rb.xi_minus, 1e-12);
}

TEST(DiscretizeDebye, SingleModeAndSumRule) {
  const DiscretizedBath one = discretize_debye(DebyeBath{0.5, 0.2, 0.25}, 1);
  EXPECT_NEAR(one.omegas[0], 0.2, 1e-15);
  const DiscretizedBath d = discretize_debye(DebyeBath{0.5, 0.2, 0.25}, 200);
  EXPECT_LT(std::abs(d.reorganization_energy() - 0.5), 0.005);
  EXPECT_THROW(discretize_debye(kBath, 0), ConfigInvalid);
}

TEST(DiscretizeDebye, ContinuumLimit) {
  // Binned (pi/2) sum c_j^2/w_j delta(w - w_j) approaches J(w).
  const DebyeBath bath{0.5, 0.2, 0.25};
  const std::size_t n = 2000;
  const DiscretizedBath d = discretize_debye(bath, n);
  const std::vector<double> edges{0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.6};
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    double mass = 0.0;
    for (Eigen::Index j = 0; j < d.omegas.size(); ++j) {
      if (d.omegas[j] >= edges[k] && d.omegas[j] < edges[k + 1]) {
        mass += 0.5 * pi * d.couplings[j] * d.couplings[j] / d.omegas[j];
      }
    }
    // Antiderivative of J is (lambda Omega / 4) log(w^2 + Omega^2).
    const auto anti = [&](double w) { return 0.25 * bath.lambda * bath.omega_c * std::log(w * w + 0.04); };
    const double expected = anti(edges[k + 1]) - anti(edges[k]);
    EXPECT_NEAR(mass, expected, 0.02 * expected) << "bin " << k;
  }
}

TEST(SampleBoltzmann, Equipartition) {
  const DebyeBath bath{0.5, 0.2, 0.25};
  const DiscretizedBath d = discretize_debye(bath, 3);
  RandomStream rng(9, 0, RandomStream::Purpose::test);
  const int n = 100000;
  Eigen::Vector3d sq = Eigen::Vector3d::Zero(), sp2 = Eigen::Vector3d::Zero(), sv2 = Eigen::Vector3d::Zero();
  for (int i = 0; i < n; ++i) {
    const auto [q, p] = sample_boltzmann(d, bath.beta, rng);
    for (int j = 0; j < 3; ++j) {
      sq[j] += q[j] * d.omegas[j];
      sp2[j] += p[j] * p[j];
      sv2[j] += q[j] * q[j] * d.omegas[j] * d.omegas[j];
    }
  }
  const double kt = 1.0 / bath.beta;
  for (int j = 0; j < 3; ++j) {
    // Var(x^2) = 2 kT^2 for a Gaussian of variance kT.
    const double sem2 = std::sqrt(2.0) * kt / std::sqrt(n);
    EXPECT_LT(std::abs(sp2[j] / n - kt), 3.0 * sem2);
    EXPECT_LT(std::abs(sv2[j] / n - kt), 3.0 * sem2);
    EXPECT_LT(std::abs(sq[j] / n), 3.0 * std::sqrt(kt / n));
  }
}

TEST(SampleWignerGround, MinimumUncertainty) {
  const double w0 = 0.7, center = -2.0;
  RandomStream rng(10, 0, RandomStream::Purpose::test);
  const int n = 100000;
  double sq = 0, sq2 = 0, sp = 0, sp2 = 0, se = 0, se2 = 0;
  for (int i = 0; i < n; ++i) {
    const auto [q, p] = sample_wigner_ground(w0, center, rng);
    sq += q;
    sq2 += q * q;
    sp += p;
    sp2 += p * p;
    const double e = 0.5 * p * p + 0.5 * w0 * w0 * (q - center) * (q - center);
    se += e;
    se2 += e * e;
  }
  const double var_q = sq2 / n - std::pow(sq / n, 2);
  const double var_p = sp2 / n - std::pow(sp / n, 2);
  EXPECT_LT(std::abs(sq / n - center), 3.0 * std::sqrt(var_q / n));
  EXPECT_NEAR(var_q * var_p, 0.25, 0.01);
  const double var_e = se2 / n - std::pow(se / n, 2);
  EXPECT_LT(std::abs(se / n - 0.5 * w0), 3.0 * std::sqrt(var_e / n));
  EXPECT_THROW(sample_wigner_ground(0.0, 0.0, rng), Error);
}
