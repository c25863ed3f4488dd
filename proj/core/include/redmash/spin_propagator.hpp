#pragma once

#include <Eigen/Dense>

#include "redmash/two_level.hpp"

namespace redmash {

// Linear spin flow  dS/dt = M S  with
//   M = [[growth, -omega, 2 tau], [omega, growth, 0], [-2 tau, 0, 0]].
// growth == 0 is the pure MASH rotation about (0, 2 tau, omega).
struct SpinGenerator {
  double omega = 0.0;
  double tau = 0.0;
  double growth = 0.0;

  Eigen::Matrix3d matrix() const;
};

// exp(M h). Closed forms when growth or tau is exactly zero, a
// scaling-and-squaring Taylor series otherwise.
Eigen::Matrix3d spin_propagator(const SpinGenerator& gen, double h);

// Rotation by angle |axis| * h about axis (Rodrigues).
Eigen::Matrix3d rotation_propagator(const Eigen::Vector3d& axis, double h);

// exp(A) for a general 3x3 matrix, accurate to ~1e-15 relative.
Eigen::Matrix3d expm3(const Eigen::Matrix3d& a);

inline SpinVector propagate_spin(const SpinVector& s, const SpinGenerator& gen, double h) {
  return spin_propagator(gen, h) * s;
}

}  // namespace redmash
