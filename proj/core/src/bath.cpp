#include "redmash/bath.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>
#include <boost/math/quadrature/gauss.hpp>

#include "redmash/errors.hpp"

namespace redmash {

void DebyeBath::validate() const {
  if (!(lambda >= 0.0) || !(omega_c > 0.0) || !(beta > 0.0)) {
    std::ostringstream msg;
    msg << "Debye bath needs lambda >= 0, omega_c > 0, beta > 0 (got " << lambda << ", " << omega_c
        << ", " << beta << ")";
    throw ConfigInvalid(msg.str());
  }
}

double debye_spectral_density(const DebyeBath& bath, double omega) {
  return bath.lambda * omega * bath.omega_c / (2.0 * (omega * omega + bath.omega_c * bath.omega_c));
}

double gamma_real(const DebyeBath& bath, double omega) {
  const double x = bath.beta * omega;
  const double prefactor = bath.lambda * bath.omega_c / (2.0 * (omega * omega + bath.omega_c * bath.omega_c));
  if (std::abs(x) < 1e-6) {
    // w / (1 - exp(-beta w)) expanded to second order about w = 0.
    return prefactor * (1.0 / bath.beta + 0.5 * omega + bath.beta * omega * omega / 12.0);
  }
  return prefactor * omega / (-std::expm1(-x));
}

namespace {

using Gauss = boost::math::quadrature::gauss<double, 16>;

// Panels on [a, b] whose width grows linearly with distance from the
// nearest feature point.
void graded_panels(double a, double b, std::span<const double> features, double h0, double growth,
                   std::vector<std::pair<double, double>>& out) {
  double x = a;
  while (x < b) {
    double dist = std::numeric_limits<double>::infinity();
    for (double f : features) dist = std::min(dist, std::abs(x - f));
    double width = h0 + growth * dist;
    double next = x + width;
    if (next > b || b - next < 0.25 * width) next = b;
    out.emplace_back(x, next);
    x = next;
  }
}

// Integral over [-W, W] of (R(w') - R(w)) / (w - w') on the given grid.
double subtracted_integral(const DebyeBath& bath, double omega, double window, double h0, double growth) {
  const double r_omega = gamma_real(bath, omega);
  std::vector<double> cuts{-window, 0.0, omega, window};
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  const double features[2] = {0.0, omega};
  std::vector<std::pair<double, double>> panels;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    graded_panels(cuts[i], cuts[i + 1], features, h0, growth, panels);
  }
  auto integrand = [&](double w) {
    const double d = omega - w;
    if (d == 0.0) return 0.0;
    return (gamma_real(bath, w) - r_omega) / d;
  };
  double total = 0.0;
  for (const auto& [lo, hi] : panels) total += Gauss::integrate(integrand, lo, hi);
  return total;
}

double gamma_imag_once(const DebyeBath& bath, double omega, double window, double h0, double growth) {
  const double omega_c = bath.omega_c;
  double pv = subtracted_integral(bath, omega, window, h0, growth);
  pv += gamma_real(bath, omega) * std::log((window + omega) / (window - omega));
  // Upper tail: Re Gamma equals J up to exp(-beta W); the lower tail is
  // exponentially small and dropped.
  const double a = omega / (omega * omega + omega_c * omega_c);
  const double c = a * omega - 1.0;
  const double tail =
      a * (std::log(window - omega) - 0.5 * std::log(window * window + omega_c * omega_c)) +
      c * (0.5 * std::numbers::pi - std::atan(window / omega_c)) / omega_c;
  pv += 0.5 * bath.lambda * omega_c * tail;
  return pv / std::numbers::pi;
}

}  // namespace

double gamma_imag(const DebyeBath& bath, double omega, const QuadratureOptions& opts) {
  if (bath.lambda == 0.0) return 0.0;
  const double window =
      std::max({50.0 * bath.omega_c, 50.0 * std::abs(omega), 40.0 / bath.beta});
  const double scale = std::min(bath.omega_c, 1.0 / bath.beta);
  double h0 = 0.25 * scale;
  double growth = 0.25;
  double previous = gamma_imag_once(bath, omega, window, h0, growth);
  double change = std::numeric_limits<double>::infinity();
  for (int level = 0; level < opts.max_refinements; ++level) {
    h0 *= 0.5;
    growth *= 0.5;
    const double current = gamma_imag_once(bath, omega, window, h0, growth);
    change = std::abs(current - previous);
    const double ref = std::max(std::abs(current), 1e-3 * bath.lambda);
    if (change <= opts.rel_tol * ref) return current;
    previous = current;
  }
  std::ostringstream msg;
  msg << "Im Gamma quadrature at omega = " << omega << " stalled at change " << change;
  throw QuadratureNotConverged(msg.str(), change);
}

struct DebyeCorrelation::Table {
  boost::math::interpolators::cardinal_cubic_b_spline<double> spline;
};

DebyeCorrelation::DebyeCorrelation(DebyeBath bath) : bath_(bath) { bath_.validate(); }

DebyeCorrelation::DebyeCorrelation(DebyeBath bath, double omega_max, std::size_t n_points)
    : bath_(bath), omega_max_(omega_max) {
  bath_.validate();
  if (!(omega_max > 0.0) || n_points < 8) throw Error("DebyeCorrelation: bad table range");
  const double step = 2.0 * omega_max / static_cast<double>(n_points - 1);
  std::vector<double> values(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    values[i] = gamma_imag(bath_, -omega_max + step * static_cast<double>(i));
  }
  table_ = std::make_unique<Table>(Table{boost::math::interpolators::cardinal_cubic_b_spline<double>(
      values.begin(), values.end(), -omega_max, step)});
}

DebyeCorrelation::~DebyeCorrelation() = default;

double DebyeCorrelation::re(double omega) const { return gamma_real(bath_, omega); }

double DebyeCorrelation::im(double omega) const {
  if (table_ && std::abs(omega) <= omega_max_) return table_->spline(omega);
  return gamma_imag(bath_, omega);
}

double DebyeCorrelation::im_derivative(double omega) const {
  if (table_ && std::abs(omega) <= omega_max_) return table_->spline.prime(omega);
  const double h = 1e-3 * std::min(bath_.omega_c, 1.0 / bath_.beta) + 1e-6 * std::abs(omega);
  return (gamma_imag(bath_, omega + h) - gamma_imag(bath_, omega - h)) / (2.0 * h);
}

void PhotonBath::validate() const {
  if (!(c_light > 0.0)) throw ConfigInvalid("photon bath: speed of light must be positive");
  if (cavity) {
    if (!(cavity->kappa > 0.0)) throw ConfigInvalid("cavity: kappa must be positive");
    if (!(cavity->omega_cav > 0.0)) throw ConfigInvalid("cavity: omega_cav must be positive");
    if (!cavity->two_c1 && !cavity->g) throw ConfigInvalid("cavity: need g or two_C1");
    if (cavity->two_c1 && !(*cavity->two_c1 >= 0.0)) throw ConfigInvalid("cavity: two_C1 must be >= 0");
  }
}

double vacuum_gamma_real(const PhotonBath& bath, double omega) {
  if (omega <= 0.0) return 0.0;
  const double c3 = bath.c_light * bath.c_light * bath.c_light;
  return 2.0 * omega * omega * omega / (3.0 * c3);
}

double two_c1_from_coupling(const PhotonBath& bath, double g, double kappa, double omega) {
  return g * g / (kappa * vacuum_gamma_real(bath, omega));
}

double cavity_enhancement(const PhotonBath& bath, double omega) {
  if (!bath.cavity) return 0.0;
  const CavityMode& cav = *bath.cavity;
  if (cav.two_c1) {
    // Scale from the cavity frequency: 2 C1 is inversely proportional to Re Gamma_vac.
    return *cav.two_c1 * vacuum_gamma_real(bath, cav.omega_cav) / vacuum_gamma_real(bath, omega);
  }
  return two_c1_from_coupling(bath, *cav.g, cav.kappa, omega);
}

double cavity_gamma_minus(const AdiabaticFrame& frame, const PauliExpansion& dipole, const PhotonBath& bath) {
  const double mu2 = dipole.ax * dipole.ax + dipole.ay * dipole.ay;
  const double vac = vacuum_gamma_real(bath, frame.gap);
  double rate = vac;
  if (bath.cavity && vac > 0.0) {
    const CavityMode& cav = *bath.cavity;
    const double detuning = cav.omega_cav - frame.gap;
    const double lorentz = cav.kappa * cav.kappa / (cav.kappa * cav.kappa + detuning * detuning);
    rate += vac * cavity_enhancement(bath, frame.gap) * lorentz;
  }
  return 2.0 * mu2 * rate;
}

RateSet cavity_rates(const AdiabaticFrame& frame, const PauliExpansion& dipole, const PhotonBath& bath) {
  RateSet r;
  r.gamma_minus = cavity_gamma_minus(frame, dipole, bath);
  r.omega_ls = frame.gap;
  return r;
}

RateSet redfield_rates(double gap, const PauliExpansion& coupling,
                       std::span<const BathCorrelation* const> baths) {
  const double p_flip = coupling.ax * coupling.ax + coupling.ay * coupling.ay;
  const double p_z = coupling.az * coupling.az;
  RateSet r;
  for (const BathCorrelation* b : baths) {
    if (p_flip != 0.0) {
      r.gamma_minus += p_flip * 2.0 * b->re(gap);
      r.gamma_plus += p_flip * 2.0 * b->re(-gap);
      r.xi_minus += p_flip * b->im(gap);
      r.xi_plus += p_flip * b->im(-gap);
    }
    if (p_z != 0.0) {
      r.gamma_z += p_z * 2.0 * b->re(0.0);
      r.xi_z += p_z * b->im(0.0);
    }
  }
  r.omega_ls = gap + (r.xi_minus - r.xi_plus);
  return r;
}

RateSet redfield_rates(const AdiabaticFrame& frame, const PauliExpansion& coupling,
                       std::span<const BathCorrelation* const> baths) {
  return redfield_rates(frame.gap, coupling, baths);
}

double DiscretizedBath::reorganization_energy() const {
  return 2.0 * (couplings.array().square() / omegas.array().square()).sum();
}

DiscretizedBath discretize_debye(const DebyeBath& bath, std::size_t n_modes) {
  if (n_modes < 1) throw ConfigInvalid("discretize_debye: need at least one mode");
  const double n = static_cast<double>(n_modes);
  DiscretizedBath d;
  d.omegas.resize(static_cast<Eigen::Index>(n_modes));
  d.couplings.resize(static_cast<Eigen::Index>(n_modes));
  const double weight = std::sqrt(bath.lambda / (2.0 * n));
  for (std::size_t j = 1; j <= n_modes; ++j) {
    const double w = bath.omega_c * std::tan((static_cast<double>(j) - 0.5) * std::numbers::pi / (2.0 * n));
    d.omegas[static_cast<Eigen::Index>(j - 1)] = w;
    d.couplings[static_cast<Eigen::Index>(j - 1)] = w * weight;
  }
  return d;
}

std::pair<Vec, Vec> sample_boltzmann(const DiscretizedBath& disc, double beta, RandomStream& rng) {
  const Eigen::Index n = disc.omegas.size();
  Vec q(n), p(n);
  const double sp = std::sqrt(1.0 / beta);
  for (Eigen::Index j = 0; j < n; ++j) {
    q[j] = rng.normal() * sp / disc.omegas[j];
    p[j] = rng.normal() * sp;
  }
  return {q, p};
}

std::pair<double, double> sample_wigner_ground(double omega0, double center_q, RandomStream& rng) {
  if (!(omega0 > 0.0)) throw Error("sample_wigner_ground: omega0 must be positive");
  const double q = center_q + rng.normal() * std::sqrt(0.5 / omega0);
  const double p = rng.normal() * std::sqrt(0.5 * omega0);
  return {q, p};
}

RedfieldDissipator::RedfieldDissipator(Eigen::Matrix2cd coupling,
                                       std::vector<std::shared_ptr<const BathCorrelation>> baths)
    : coupling_(std::move(coupling)), baths_(std::move(baths)) {
  for (const auto& b : baths_) raw_.push_back(b.get());
}

RateSet RedfieldDissipator::rates(const AdiabaticFrame& frame) const {
  return redfield_rates(frame, expand_diabatic_operator(frame, coupling_), raw_);
}

Vec RedfieldDissipator::grad_omega_ls(const AdiabaticFrame& frame, const RateSet&) const {
  // omega_ls = w + P(theta) sum_b [Im G_b(w) - Im G_b(-w)], P = ax^2 + ay^2,
  // dP/dtheta = 4 ax az and grad theta = nac.
  const PauliExpansion e = expand_diabatic_operator(frame, coupling_);
  const double p_flip = e.ax * e.ax + e.ay * e.ay;
  double slope = 0.0;
  double shift = 0.0;
  if (p_flip != 0.0) {
    for (const BathCorrelation* b : raw_) {
      slope += b->im_derivative(frame.gap) + b->im_derivative(-frame.gap);
      shift += b->im(frame.gap) - b->im(-frame.gap);
    }
  }
  return frame.grad_gap * (1.0 + p_flip * slope) + (4.0 * e.ax * e.az * shift) * frame.nac;
}

CavityDissipator::CavityDissipator(Eigen::Matrix2cd dipole, PhotonBath bath)
    : dipole_(std::move(dipole)), bath_(std::move(bath)) {
  bath_.validate();
}

RateSet CavityDissipator::rates(const AdiabaticFrame& frame) const {
  return cavity_rates(frame, expand_diabatic_operator(frame, dipole_), bath_);
}

Vec CavityDissipator::grad_omega_ls(const AdiabaticFrame& frame, const RateSet&) const {
  return frame.grad_gap;
}

}  // namespace redmash
