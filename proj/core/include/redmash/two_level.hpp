#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Dense>

#include "redmash/rng.hpp"

namespace redmash {

using Vec = Eigen::VectorXd;

// Bloch-sphere vector (S_x, S_y, S_z) in the adiabatic basis.
using SpinVector = Eigen::Vector3d;

// Density matrix rho = (I + rx sx + ry sy + rz sz) / 2 in the adiabatic basis.
struct BlochState {
  double rx = 0.0;
  double ry = 0.0;
  double rz = 0.0;

  Eigen::Vector3d vec() const { return {rx, ry, rz}; }
  static BlochState from(const Eigen::Vector3d& v) { return {v.x(), v.y(), v.z()}; }
};

// O = aI*I + ax*sx + ay*sy + az*sz with sz = |1><1| - |0><0| (|1> upper adiabat).
struct PauliExpansion {
  double aI = 0.0;
  double ax = 0.0;
  double ay = 0.0;
  double az = 0.0;
};

// Real symmetric diabatic potential
//   V(q) = v0 + [[bias, coupling], [coupling, -bias]]
// with gradients in mass-weighted coordinates.
struct DiabaticPoint {
  double v0 = 0.0;
  double bias = 0.0;
  double coupling = 0.0;
  Vec grad_v0;
  Vec grad_bias;
  Vec grad_coupling;
};

class DiabaticModel {
 public:
  virtual ~DiabaticModel() = default;
  virtual std::size_t dof() const = 0;
  virtual DiabaticPoint evaluate(const Vec& q) const = 0;
};

// Harmonic reference potential with a bias linear in the coordinates and a
// constant coupling:
//   v0 = sum_j w_j^2 q_j^2 / 2,  bias = eps + sum_j k_j q_j,  coupling = delta.
// Covers both the spin-boson bath and the one-mode cavity molecule.
class LinearCouplingModel : public DiabaticModel {
 public:
  LinearCouplingModel(double eps, double delta, Vec frequencies, Vec bias_gradient);

  std::size_t dof() const override { return static_cast<std::size_t>(frequencies_.size()); }
  DiabaticPoint evaluate(const Vec& q) const override;

  double eps() const { return eps_; }
  double delta() const { return delta_; }
  const Vec& frequencies() const { return frequencies_; }
  const Vec& bias_gradient() const { return bias_gradient_; }

 private:
  double eps_;
  double delta_;
  Vec frequencies_;
  Vec bias_gradient_;
  Vec freq_sq_;
};

struct AdiabaticFrame {
  double vbar = 0.0;
  double gap = 0.0;    // omega_S = 2 sqrt(bias^2 + coupling^2)
  double theta = 0.0;  // upper adiabat (cos, sin), lower adiabat (sin, -cos)
  Vec nac;             // <upper|grad|lower> = grad theta
  Vec grad_vbar;
  Vec grad_gap;
};

constexpr double kDefaultGapFloor = 1e-12;

// Diagonalises the diabatic matrix at q. When a previous frame is given the
// mixing angle is shifted by multiples of pi to stay continuous with it.
AdiabaticFrame adiabatize(const DiabaticModel& model, const Vec& q,
                          const AdiabaticFrame* previous = nullptr,
                          double gap_floor = kDefaultGapFloor);

// Columns are the upper and lower adiabats in the diabatic basis.
Eigen::Matrix2d adiabatic_vectors(double theta);

// Rebuilds the diabatic potential matrix from (vbar, gap, theta).
Eigen::Matrix2d diabatic_matrix(const AdiabaticFrame& frame);

// (1/2)(1, S_x, S_y, sgn S_z). Throws EquatorUndefined for S_z == 0.
PauliExpansion mash_kernel(const SpinVector& s);

// Coefficients of a Hermitian diabatic operator in the adiabatic Pauli basis
// of the frame.
PauliExpansion expand_diabatic_operator(const AdiabaticFrame& frame, const Eigen::Matrix2cd& op);
PauliExpansion expand_diabatic_operator(double theta, const Eigen::Matrix2cd& op);

// Adiabatic-basis matrix in the ordering (upper, lower).
Eigen::Matrix2cd to_adiabatic_matrix(const PauliExpansion& e);

// Inverse of expand_diabatic_operator.
Eigen::Matrix2cd to_diabatic_operator(double theta, const PauliExpansion& e);

// tr[O w(S)] for the expansion of O and the kernel w(S).
double kernel_trace(const PauliExpansion& op, const SpinVector& s);

enum class Hemisphere { full, upper, lower };

SpinVector sample_sphere(RandomStream& rng, Hemisphere region);

// S = (2 Re c1* c0, 2 Im c1* c0, |c1|^2 - |c0|^2); c1 on the upper adiabat.
SpinVector spin_from_amplitudes(std::complex<double> c0, std::complex<double> c1);

inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Diabatic projector and Pauli matrices used by the benchmark estimators.
Eigen::Matrix2cd diabatic_sigma_z();
Eigen::Matrix2cd diabatic_projector_a();

}  // namespace redmash
