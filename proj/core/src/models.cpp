#include "redmash/models.hpp"

#include <sstream>

#include "redmash/errors.hpp"
#include "redmash/units.hpp"

namespace redmash {

const char* to_string(Method m) {
  switch (m) {
    case Method::mash:
      return "mash";
    case Method::redfield:
      return "redfield";
    case Method::unravel:
      return "unravel";
    case Method::hybrid:
      return "hybrid";
  }
  return "?";
}

const char* to_string(ModelKind m) { return m == ModelKind::spin_boson ? "spin_boson" : "cavity"; }

Method parse_method(const std::string& name) {
  for (Method m : {Method::mash, Method::redfield, Method::unravel, Method::hybrid}) {
    if (name == to_string(m)) return m;
  }
  throw ConfigInvalid("unknown method '" + name + "' (expected mash, redfield, unravel or hybrid)");
}

void SpinBosonConfig::validate() const {
  if (!(delta != 0.0) || !std::isfinite(eps)) throw ConfigInvalid("spin_boson: delta must be nonzero");
  classical_bath().validate();
  quantum_bath().validate();
  if (classical.n_modes < 1 || quantum.n_modes < 1) throw ConfigInvalid("spin_boson: n_modes must be >= 1");
}

double CavityConfig::omega0() const { return omega0_cm * units::wavenumber; }
double CavityConfig::eps() const { return eps_ev * units::ev; }
double CavityConfig::delta() const { return delta_ev * units::ev; }
double CavityConfig::zeta() const { return zeta_ev_per_angstrom * units::ev / units::angstrom; }
double CavityConfig::mass() const { return mass_amu * units::amu; }
double CavityConfig::mu_ab() const { return mu_ab_debye * units::debye; }
double CavityConfig::kappa() const { return kappa_cm * units::wavenumber; }
double CavityConfig::omega_cav() const { return omega_cav_ev * units::ev; }
double CavityConfig::g() const { return g_cm * units::wavenumber; }

double CavityConfig::wigner_center() const {
  // q_c = zeta / (m w0^2), mass-weighted x_c = sqrt(m) q_c.
  return zeta() / (std::sqrt(mass()) * omega0() * omega0());
}

PhotonBath CavityConfig::photon_bath() const {
  PhotonBath b;
  b.c_light = units::speed_of_light;
  CavityMode mode;
  mode.kappa = kappa();
  mode.omega_cav = omega_cav();
  mode.g = g();
  mode.two_c1 = two_c1;
  b.cavity = mode;
  return b;
}

void CavityConfig::validate() const {
  const std::pair<const char*, double> positive[] = {
      {"omega0_cm", omega0_cm}, {"delta_ev", delta_ev}, {"mass_amu", mass_amu}, {"kappa_cm", kappa_cm},
      {"omega_cav_ev", omega_cav_ev}, {"g_cm", g_cm}};
  for (const auto& [name, value] : positive) {
    if (!(value > 0.0)) throw ConfigInvalid(std::string("cavity.") + name + " must be positive");
  }
  if (two_c1 && !(*two_c1 >= 0.0)) throw ConfigInvalid("cavity.two_C1 must be nonnegative");
  photon_bath().validate();
}

namespace {

Eigen::Matrix2cd off_diagonal(double value) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 1) = value;
  m(1, 0) = value;
  return m;
}

}  // namespace

AdiabaticFrame spin_boson_system_frame(const SpinBosonConfig& cfg) {
  const LinearCouplingModel bare(cfg.eps, cfg.delta, Vec(0), Vec(0));
  return adiabatize(bare, Vec(0));
}

RateSet spin_boson_static_rates(const SpinBosonConfig& cfg) {
  cfg.validate();
  const AdiabaticFrame frame = spin_boson_system_frame(cfg);
  const DebyeCorrelation classical(cfg.classical_bath());
  const DebyeCorrelation quantum(cfg.quantum_bath());
  const BathCorrelation* baths[] = {&classical, &quantum};
  return redfield_rates(frame, expand_diabatic_operator(frame, diabatic_sigma_z()), baths);
}

TrajectorySetup spin_boson_setup(const SpinBosonConfig& cfg, Method method) {
  cfg.validate();
  if (method != Method::mash && method != Method::hybrid) {
    throw ConfigInvalid("spin_boson_setup handles trajectory methods only");
  }
  TrajectorySetup s;
  const DebyeBath classical = cfg.classical_bath();
  DiscretizedBath explicit_modes;
  if (classical.lambda > 0.0) explicit_modes = discretize_debye(classical, cfg.classical.n_modes);
  if (method == Method::mash) {
    // Both baths as classical oscillators.
    const DiscretizedBath q = discretize_debye(cfg.quantum_bath(), cfg.quantum.n_modes);
    DiscretizedBath all;
    all.omegas.resize(explicit_modes.omegas.size() + q.omegas.size());
    all.couplings.resize(all.omegas.size());
    all.omegas << explicit_modes.omegas, q.omegas;
    all.couplings << explicit_modes.couplings, q.couplings;
    explicit_modes = all;
  } else {
    // Im Gamma table over the gaps the classical bath can reach: the bias
    // fluctuates with variance lambda_c / (2 beta).
    const DebyeBath qb = cfg.quantum_bath();
    const double spread = std::sqrt(classical.lambda / (2.0 * cfg.beta));
    const double reach = 2.0 * (std::hypot(cfg.eps, cfg.delta) + 12.0 * spread) + 10.0 * qb.omega_c;
    auto corr = std::make_shared<DebyeCorrelation>(qb, reach, 2001);
    s.dissipator = std::make_shared<RedfieldDissipator>(
        diabatic_sigma_z(), std::vector<std::shared_ptr<const BathCorrelation>>{corr});
  }
  auto model = std::make_shared<LinearCouplingModel>(cfg.eps, cfg.delta, explicit_modes.omegas,
                                                     explicit_modes.couplings);
  s.model = model;
  const double beta = cfg.beta;
  s.sample_nuclei = [explicit_modes, beta](RandomStream& rng) {
    return sample_boltzmann(explicit_modes, beta, rng);
  };
  s.hemisphere = Hemisphere::full;
  s.sphere_measure = 2.0;
  s.initial_diabatic = diabatic_projector_a();
  s.diabatic_population = true;
  return s;
}

std::pair<double, double> sample_cavity_nuclei(const CavityConfig& cfg, RandomStream& rng) {
  return sample_wigner_ground(cfg.omega0(), cfg.wigner_center(), rng);
}

TrajectorySetup cavity_setup(const CavityConfig& cfg, Method method) {
  cfg.validate();
  if (method != Method::mash && method != Method::hybrid) {
    throw ConfigInvalid("the cavity model has an explicit nuclear coordinate; use mash or hybrid");
  }
  TrajectorySetup s;
  Vec w(1), k(1);
  w << cfg.omega0();
  k << cfg.bias_slope();
  s.model = std::make_shared<LinearCouplingModel>(cfg.eps(), cfg.delta(), w, k);
  if (method == Method::hybrid) {
    const double mu = cfg.photon_coupling ? cfg.mu_ab() : 0.0;
    s.dissipator = std::make_shared<CavityDissipator>(off_diagonal(mu), cfg.photon_bath());
    s.emission = true;
  }
  s.sample_nuclei = [cfg](RandomStream& rng) {
    const auto [x, p] = sample_cavity_nuclei(cfg, rng);
    Vec q(1), pv(1);
    q << x;
    pv << p;
    return std::make_pair(q, pv);
  };
  s.hemisphere = Hemisphere::upper;
  s.sphere_measure = 1.0;
  s.initial_adiabatic = PauliExpansion{0.5, 0.0, 0.0, 0.5};
  return s;
}

}  // namespace redmash
