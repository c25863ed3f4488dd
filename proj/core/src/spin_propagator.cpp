#include "redmash/spin_propagator.hpp"

#include <cmath>

namespace redmash {

Eigen::Matrix3d SpinGenerator::matrix() const {
  Eigen::Matrix3d m;
  m << growth, -omega, 2.0 * tau,
       omega, growth, 0.0,
       -2.0 * tau, 0.0, 0.0;
  return m;
}

Eigen::Matrix3d rotation_propagator(const Eigen::Vector3d& axis, double h) {
  const double rate = axis.norm();
  if (rate == 0.0) return Eigen::Matrix3d::Identity();
  const Eigen::Vector3d n = axis / rate;
  Eigen::Matrix3d k;
  k << 0.0, -n.z(), n.y(),
       n.z(), 0.0, -n.x(),
       -n.y(), n.x(), 0.0;
  const double angle = rate * h;
  return Eigen::Matrix3d::Identity() + std::sin(angle) * k + (1.0 - std::cos(angle)) * (k * k);
}

Eigen::Matrix3d expm3(const Eigen::Matrix3d& a) {
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Eigen::Matrix3d b = std::ldexp(1.0, -squarings) * a;
  Eigen::Matrix3d sum = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d term = Eigen::Matrix3d::Identity();
  for (int k = 1; k <= 30; ++k) {
    term = term * b / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() < 1e-18 * sum.cwiseAbs().maxCoeff()) break;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

Eigen::Matrix3d spin_propagator(const SpinGenerator& gen, double h) {
  if (gen.growth == 0.0) return rotation_propagator({0.0, 2.0 * gen.tau, gen.omega}, h);
  if (gen.tau == 0.0) {
    // Transverse rotation with uniform growth; S_z is untouched.
    const double scale = std::exp(gen.growth * h);
    const double c = scale * std::cos(gen.omega * h);
    const double s = scale * std::sin(gen.omega * h);
    Eigen::Matrix3d m;
    m << c, -s, 0.0,
         s, c, 0.0,
         0.0, 0.0, 1.0;
    return m;
  }
  return expm3(gen.matrix() * h);
}

}  // namespace redmash
