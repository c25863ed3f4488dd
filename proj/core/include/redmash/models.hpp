#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>

#include "redmash/bath.hpp"
#include "redmash/rng.hpp"
#include "redmash/two_level.hpp"

namespace redmash {

enum class Method { mash, redfield, unravel, hybrid };
enum class ModelKind { spin_boson, cavity };

const char* to_string(Method m);
const char* to_string(ModelKind m);
Method parse_method(const std::string& name);

struct DebyeBathSpec {
  double lambda = 0.5;
  double omega_c = 1.0;
  std::size_t n_modes = 200;
};

// Two-bath spin-boson model in units of the diabatic coupling.
struct SpinBosonConfig {
  double eps = 1.0;
  double delta = 1.0;
  double beta = 0.25;
  DebyeBathSpec classical{0.5, 0.2, 200};
  DebyeBathSpec quantum{0.5, 10.0, 200};

  DebyeBath classical_bath() const { return {classical.lambda, classical.omega_c, beta}; }
  DebyeBath quantum_bath() const { return {quantum.lambda, quantum.omega_c, beta}; }
  void validate() const;
};

// One-mode molecule in a leaky cavity. Inputs are in laboratory units; the
// accessors return atomic units with mass-weighted coordinates.
struct CavityConfig {
  double omega0_cm = 300.0;
  double eps_ev = 1.0;
  double delta_ev = 0.35;
  double zeta_ev_per_angstrom = 2.0;
  double mass_amu = 10.0;
  double mu_ab_debye = 5.0;
  double g_cm = 110.0;
  double kappa_cm = 2200.0;
  double omega_cav_ev = 3.0;
  // Enhancement 2 C1 at the cavity frequency; when empty it is derived from g.
  std::optional<double> two_c1 = 18637.0;
  // Couples the dipole to the photon field; false gives the isolated molecule.
  bool photon_coupling = true;

  double omega0() const;
  double eps() const;
  double delta() const;
  double zeta() const;  // Ha / bohr
  double mass() const;  // electron masses
  double mu_ab() const;
  double kappa() const;
  double omega_cav() const;
  double g() const;
  // Bias gradient with respect to x = sqrt(m) q.
  double bias_slope() const { return zeta() / std::sqrt(mass()); }
  // Minimum of the lower diabat, mass-weighted.
  double wigner_center() const;
  PhotonBath photon_bath() const;
  void validate() const;
};

// Everything the trajectory loop needs for one benchmark.
struct TrajectorySetup {
  std::shared_ptr<const DiabaticModel> model;
  std::shared_ptr<const Dissipator> dissipator;  // hybrid only
  std::function<std::pair<Vec, Vec>(RandomStream&)> sample_nuclei;
  Hemisphere hemisphere = Hemisphere::full;
  double sphere_measure = 2.0;
  // Initial operator A: either a diabatic operator expanded at q(0) or a
  // fixed adiabatic expansion.
  std::optional<Eigen::Matrix2cd> initial_diabatic;
  std::optional<PauliExpansion> initial_adiabatic;
  bool diabatic_population = false;
  bool emission = false;
};

TrajectorySetup spin_boson_setup(const SpinBosonConfig& cfg, Method method);
TrajectorySetup cavity_setup(const CavityConfig& cfg, Method method);

// Frame of the bare system (classical bath at its origin).
AdiabaticFrame spin_boson_system_frame(const SpinBosonConfig& cfg);

// Rates with both baths treated through their correlation functions.
RateSet spin_boson_static_rates(const SpinBosonConfig& cfg);

// Ground-state diabatic-b Wigner distribution of the cavity molecule.
std::pair<double, double> sample_cavity_nuclei(const CavityConfig& cfg, RandomStream& rng);

}  // namespace redmash
