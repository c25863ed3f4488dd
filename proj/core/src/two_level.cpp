#include "redmash/two_level.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "redmash/errors.hpp"

namespace redmash {

LinearCouplingModel::LinearCouplingModel(double eps, double delta, Vec frequencies,
                                         Vec bias_gradient)
    : eps_(eps),
      delta_(delta),
      frequencies_(std::move(frequencies)),
      bias_gradient_(std::move(bias_gradient)) {
  if (frequencies_.size() != bias_gradient_.size()) {
    throw Error("LinearCouplingModel: frequency and coupling vectors differ in length");
  }
  freq_sq_ = frequencies_.array().square().matrix();
}

DiabaticPoint LinearCouplingModel::evaluate(const Vec& q) const {
  DiabaticPoint d;
  d.grad_v0 = freq_sq_.cwiseProduct(q);
  d.v0 = 0.5 * q.dot(d.grad_v0);
  d.bias = eps_ + bias_gradient_.dot(q);
  d.coupling = delta_;
  d.grad_bias = bias_gradient_;
  d.grad_coupling = Vec::Zero(q.size());
  return d;
}

AdiabaticFrame adiabatize(const DiabaticModel& model, const Vec& q, const AdiabaticFrame* previous,
                          double gap_floor) {
  const DiabaticPoint d = model.evaluate(q);
  const double r2 = d.bias * d.bias + d.coupling * d.coupling;
  const double r = std::sqrt(r2);
  AdiabaticFrame f;
  f.gap = 2.0 * r;
  if (!(f.gap >= gap_floor)) {
    std::ostringstream msg;
    msg << "adiabatic gap " << f.gap << " below floor " << gap_floor;
    throw DegenerateGap(msg.str());
  }
  f.vbar = d.v0;
  f.theta = 0.5 * std::atan2(d.coupling, d.bias);
  if (previous != nullptr) {
    // theta is defined modulo pi (a joint sign flip of both adiabats);
    // pick the branch closest to the previous frame.
    const double shift = std::round((previous->theta - f.theta) / std::numbers::pi);
    f.theta += shift * std::numbers::pi;
  }
  f.nac = (d.bias * d.grad_coupling - d.coupling * d.grad_bias) / (2.0 * r2);
  f.grad_vbar = d.grad_v0;
  f.grad_gap = (2.0 / r) * (d.bias * d.grad_bias + d.coupling * d.grad_coupling);
  return f;
}

Eigen::Matrix2d adiabatic_vectors(double theta) {
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  Eigen::Matrix2d u;
  u << c, s, s, -c;
  return u;
}

Eigen::Matrix2d diabatic_matrix(const AdiabaticFrame& frame) {
  const Eigen::Matrix2d u = adiabatic_vectors(frame.theta);
  Eigen::Matrix2d diag = Eigen::Matrix2d::Zero();
  diag(0, 0) = frame.vbar + 0.5 * frame.gap;
  diag(1, 1) = frame.vbar - 0.5 * frame.gap;
  return u * diag * u.transpose();
}

PauliExpansion mash_kernel(const SpinVector& s) {
  if (s.z() == 0.0) throw EquatorUndefined("mash_kernel: S_z is exactly zero");
  return {0.5, 0.5 * s.x(), 0.5 * s.y(), 0.5 * sgn(s.z())};
}

PauliExpansion expand_diabatic_operator(double theta, const Eigen::Matrix2cd& op) {
  const Eigen::Matrix2cd u = adiabatic_vectors(theta).cast<std::complex<double>>();
  const Eigen::Matrix2cd a = u.adjoint() * op * u;
  PauliExpansion e;
  e.aI = 0.5 * (a(0, 0) + a(1, 1)).real();
  e.az = 0.5 * (a(0, 0) - a(1, 1)).real();
  e.ax = a(0, 1).real();
  e.ay = a(1, 0).imag();
  return e;
}

PauliExpansion expand_diabatic_operator(const AdiabaticFrame& frame, const Eigen::Matrix2cd& op) {
  return expand_diabatic_operator(frame.theta, op);
}

Eigen::Matrix2cd to_adiabatic_matrix(const PauliExpansion& e) {
  using C = std::complex<double>;
  Eigen::Matrix2cd m;
  m << C(e.aI + e.az, 0.0), C(e.ax, -e.ay), C(e.ax, e.ay), C(e.aI - e.az, 0.0);
  return m;
}

Eigen::Matrix2cd to_diabatic_operator(double theta, const PauliExpansion& e) {
  const Eigen::Matrix2cd u = adiabatic_vectors(theta).cast<std::complex<double>>();
  return u * to_adiabatic_matrix(e) * u.adjoint();
}

double kernel_trace(const PauliExpansion& op, const SpinVector& s) {
  return op.aI + op.ax * s.x() + op.ay * s.y() + op.az * sgn(s.z());
}

SpinVector sample_sphere(RandomStream& rng, Hemisphere region) {
  double z = 0.0;
  switch (region) {
    case Hemisphere::full:
      z = rng.uniform(-1.0, 1.0);
      break;
    case Hemisphere::upper:
      z = rng.uniform();
      break;
    case Hemisphere::lower:
      z = -rng.uniform();
      break;
  }
  const double phi = 2.0 * std::numbers::pi * rng.uniform();
  const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {rho * std::cos(phi), rho * std::sin(phi), z};
}

SpinVector spin_from_amplitudes(std::complex<double> c0, std::complex<double> c1) {
  const double norm = std::norm(c0) + std::norm(c1);
  if (std::abs(norm - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg << "amplitudes have norm " << norm;
    throw NotNormalized(msg.str());
  }
  const std::complex<double> z = std::conj(c1) * c0;
  return {2.0 * z.real(), 2.0 * z.imag(), std::norm(c1) - std::norm(c0)};
}

Eigen::Matrix2cd diabatic_sigma_z() {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

Eigen::Matrix2cd diabatic_projector_a() {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = 1.0;
  return m;
}

}  // namespace redmash
