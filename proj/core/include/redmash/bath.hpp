#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "redmash/rng.hpp"
#include "redmash/two_level.hpp"

namespace redmash {

struct DebyeBath {
  double lambda = 0.0;   // reorganisation energy
  double omega_c = 1.0;  // characteristic frequency
  double beta = 1.0;     // inverse temperature

  void validate() const;
};

// J(w) = lambda w Omega / (2 (w^2 + Omega^2)), odd in w.
double debye_spectral_density(const DebyeBath& bath, double omega);

// Re Gamma(w) = J(w) / (1 - exp(-beta w)).
double gamma_real(const DebyeBath& bath, double omega);

struct QuadratureOptions {
  double rel_tol = 1e-6;
  int max_refinements = 8;
};

// Im Gamma(w) = (1/pi) PV int Re Gamma(w') / (w - w') dw', by pole-subtracted
// Gauss-Legendre quadrature refined until two successive grids agree.
double gamma_imag(const DebyeBath& bath, double omega, const QuadratureOptions& opts = {});

// Frequency-resolved bath correlation spectrum, Gamma(w) = Re + i Im.
class BathCorrelation {
 public:
  virtual ~BathCorrelation() = default;
  virtual double re(double omega) const = 0;
  virtual double im(double omega) const = 0;
  virtual double im_derivative(double omega) const = 0;
};

// Debye bath with an optional cubic-spline table of Im Gamma on
// [-omega_max, omega_max]. The table is filled in the constructor and is
// read-only afterwards; queries outside it fall back to direct quadrature.
class DebyeCorrelation : public BathCorrelation {
 public:
  explicit DebyeCorrelation(DebyeBath bath);
  DebyeCorrelation(DebyeBath bath, double omega_max, std::size_t n_points);
  ~DebyeCorrelation() override;
  DebyeCorrelation(const DebyeCorrelation&) = delete;
  DebyeCorrelation& operator=(const DebyeCorrelation&) = delete;

  double re(double omega) const override;
  double im(double omega) const override;
  double im_derivative(double omega) const override;

  const DebyeBath& bath() const { return bath_; }
  bool tabulated() const { return table_ != nullptr; }
  double table_limit() const { return omega_max_; }

 private:
  struct Table;
  DebyeBath bath_;
  double omega_max_ = 0.0;
  std::unique_ptr<Table> table_;
};

struct CavityMode {
  double kappa = 0.0;      // cavity damping rate
  double omega_cav = 0.0;  // cavity frequency
  // Enhancement 2 C1 evaluated at the cavity frequency. Takes precedence
  // over g when both are set.
  std::optional<double> two_c1;
  std::optional<double> g;
};

struct PhotonBath {
  double c_light = 137.035999084;
  std::optional<CavityMode> cavity;

  void validate() const;
};

// 2 w^3 / (3 c^3) for w > 0, else 0.
double vacuum_gamma_real(const PhotonBath& bath, double omega);

// 2 C1(w) = g^2 / (kappa Re Gamma_vac(w)).
double two_c1_from_coupling(const PhotonBath& bath, double g, double kappa, double omega);

// Enhancement factor 2 C1 at frequency w for the configured cavity.
double cavity_enhancement(const PhotonBath& bath, double omega);

struct RateSet {
  double gamma_plus = 0.0;
  double gamma_minus = 0.0;
  double gamma_z = 0.0;
  double xi_plus = 0.0;
  double xi_minus = 0.0;
  double xi_z = 0.0;
  double omega_ls = 0.0;  // Lamb-shift-dressed gap

  double total() const { return gamma_plus + gamma_minus + gamma_z; }
};

// Spontaneous-emission rate of the upper adiabat, cavity-enhanced when a
// cavity is configured. Other rates are zero and the Lamb shift is ignored.
RateSet cavity_rates(const AdiabaticFrame& frame, const PauliExpansion& dipole, const PhotonBath& bath);
double cavity_gamma_minus(const AdiabaticFrame& frame, const PauliExpansion& dipole, const PhotonBath& bath);

// Secular rates for system-bath coupling A (x) B summed over baths:
//   gamma_+- = (ax^2 + ay^2) 2 Re Gamma(-+ w_S), gamma_z = az^2 2 Re Gamma(0),
//   xi likewise with Im Gamma,  omega_ls = w_S + xi_- - xi_+.
RateSet redfield_rates(const AdiabaticFrame& frame, const PauliExpansion& coupling,
                       std::span<const BathCorrelation* const> baths);
RateSet redfield_rates(double gap, const PauliExpansion& coupling,
                       std::span<const BathCorrelation* const> baths);

struct DiscretizedBath {
  Vec omegas;
  Vec couplings;

  // 2 sum c_j^2 / w_j^2
  double reorganization_energy() const;
};

// Equal-reorganisation tangent grid:
//   w_j = Omega tan((j - 1/2) pi / (2N)),  c_j = w_j sqrt(lambda / (2N)).
DiscretizedBath discretize_debye(const DebyeBath& bath, std::size_t n_modes);

// Thermal classical sampling of the uncoupled oscillators.
std::pair<Vec, Vec> sample_boltzmann(const DiscretizedBath& disc, double beta, RandomStream& rng);

// Ground-state Wigner sampling of a single mass-weighted oscillator.
std::pair<double, double> sample_wigner_ground(double omega0, double center_q, RandomStream& rng);

// Position-dependent dissipative data seen by the hybrid propagator.
class Dissipator {
 public:
  virtual ~Dissipator() = default;
  virtual RateSet rates(const AdiabaticFrame& frame) const = 0;
  // Gradient of omega_ls with respect to the classical coordinates.
  virtual Vec grad_omega_ls(const AdiabaticFrame& frame, const RateSet& rates) const = 0;
};

// System operator coupled linearly to one or more thermal baths.
class RedfieldDissipator : public Dissipator {
 public:
  RedfieldDissipator(Eigen::Matrix2cd coupling, std::vector<std::shared_ptr<const BathCorrelation>> baths);

  RateSet rates(const AdiabaticFrame& frame) const override;
  Vec grad_omega_ls(const AdiabaticFrame& frame, const RateSet& rates) const override;

 private:
  Eigen::Matrix2cd coupling_;
  std::vector<std::shared_ptr<const BathCorrelation>> baths_;
  std::vector<const BathCorrelation*> raw_;
};

// Transition dipole coupled to the zero-temperature photon field.
class CavityDissipator : public Dissipator {
 public:
  CavityDissipator(Eigen::Matrix2cd dipole, PhotonBath bath);

  RateSet rates(const AdiabaticFrame& frame) const override;
  Vec grad_omega_ls(const AdiabaticFrame& frame, const RateSet& rates) const override;

  const PhotonBath& bath() const { return bath_; }

 private:
  Eigen::Matrix2cd dipole_;
  PhotonBath bath_;
};

}  // namespace redmash
