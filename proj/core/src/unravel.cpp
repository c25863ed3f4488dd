#include "redmash/unravel.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "redmash/errors.hpp"
#include "redmash/statistics.hpp"

namespace redmash {

Eigen::Vector3d pdp_drift(const SchedulePoint& c, const Eigen::Vector3d& s) {
  // Normalised no-jump evolution under H - (i/2)(g- P_upper + g+ P_lower).
  const double k = 0.5 * (c.gamma_minus - c.gamma_plus);
  return {-c.omega_ls * s.y() + 2.0 * c.tau * s.z() + k * s.x() * s.z(),
          c.omega_ls * s.x() + k * s.y() * s.z(),
          -2.0 * c.tau * s.x() - k * (1.0 - s.z() * s.z())};
}

namespace {

using Coefficients = std::function<SchedulePoint(double)>;

SpinVector flow(const Coefficients& coeffs, double t, const SpinVector& s, double h) {
  const SchedulePoint c0 = coeffs(t);
  const SchedulePoint cm = coeffs(t + 0.5 * h);
  const SchedulePoint c1 = coeffs(t + h);
  const Eigen::Vector3d k1 = pdp_drift(c0, s);
  const Eigen::Vector3d k2 = pdp_drift(cm, s + 0.5 * h * k1);
  const Eigen::Vector3d k3 = pdp_drift(cm, s + 0.5 * h * k2);
  const Eigen::Vector3d k4 = pdp_drift(c1, s + h * k3);
  const SpinVector next = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  return next / next.norm();
}

void maybe_jump(QuantumTrajectory& traj, const SchedulePoint& c, double dt, RandomStream& rng) {
  const double s_z = traj.spin.z();
  const double p_plus = c.gamma_plus * 0.5 * (1.0 - s_z) * dt;
  const double p_minus = c.gamma_minus * 0.5 * (1.0 + s_z) * dt;
  const double p_z = c.gamma_z * dt;
  const double total = p_plus + p_minus + p_z;
  if (total > kMaxJumpProbability) {
    std::ostringstream msg;
    msg << "jump probability " << total << " per step exceeds " << kMaxJumpProbability;
    throw StepTooLarge(msg.str());
  }
  const double u = rng.uniform();
  if (u < p_plus) {
    traj.spin = {0.0, 0.0, 1.0};
    traj.jumps.push_back({traj.t, JumpChannel::plus});
  } else if (u < p_plus + p_minus) {
    traj.spin = {0.0, 0.0, -1.0};
    traj.jumps.push_back({traj.t, JumpChannel::minus});
  } else if (u < total) {
    traj.spin.x() = -traj.spin.x();
    traj.spin.y() = -traj.spin.y();
    traj.jumps.push_back({traj.t, JumpChannel::z});
  }
}

}  // namespace

QuantumTrajectory pdp_step(QuantumTrajectory traj, const SchedulePoint& c, double dt, RandomStream& rng) {
  maybe_jump(traj, c, dt, rng);
  traj.spin = flow([&c](double) { return c; }, traj.t, traj.spin, dt);
  traj.t += dt;
  return traj;
}

BlochEstimate ensemble_density(std::span<const SpinVector> spins) {
  if (spins.empty()) throw Error("ensemble_density: no trajectories");
  Accumulator acc[3];
  for (const auto& s : spins) {
    for (int i = 0; i < 3; ++i) acc[i].add(s[i]);
  }
  BlochEstimate e;
  for (int i = 0; i < 3; ++i) {
    e.mean[i] = acc[i].mean();
    e.sem[i] = acc[i].stderr_of_mean();
  }
  return e;
}

UnravelResult run_unravel(const DrivenSchedule& schedule, const BlochState& rho0,
                          std::span<const double> tgrid, std::size_t n_traj, std::uint64_t seed,
                          double dt) {
  if (tgrid.empty() || n_traj == 0 || !(dt > 0.0)) throw Error("run_unravel: bad arguments");
  schedule.at(tgrid.front());
  schedule.at(tgrid.back());
  const Coefficients coeffs = [&schedule](double t) { return schedule.at(t); };
  const Eigen::Vector3d r0 = rho0.vec();
  const double purity = r0.norm();
  const std::size_t n_out = tgrid.size();

  std::vector<Accumulator> acc(3 * n_out);
  std::vector<Accumulator> jumps(n_out);
  for (std::size_t n = 0; n < n_traj; ++n) {
    RandomStream init(seed, n, RandomStream::Purpose::initial);
    RandomStream rng(seed, n, RandomStream::Purpose::jumps);
    QuantumTrajectory traj;
    traj.t = tgrid.front();
    if (purity > 0.0) {
      const double sign = init.uniform() < 0.5 * (1.0 + purity) ? 1.0 : -1.0;
      traj.spin = sign * r0 / purity;
    } else {
      traj.spin = sample_sphere(init, Hemisphere::full);
    }
    std::size_t minus = 0;
    for (std::size_t i = 0; i < n_out; ++i) {
      if (i > 0) {
        const double span = tgrid[i] - tgrid[i - 1];
        const auto steps = static_cast<std::size_t>(std::ceil(span / dt - 1e-9));
        const double h = span / static_cast<double>(steps);
        for (std::size_t k = 0; k < steps; ++k) {
          const std::size_t before = traj.jumps.size();
          maybe_jump(traj, coeffs(traj.t), h, rng);
          if (traj.jumps.size() > before && traj.jumps.back().channel == JumpChannel::minus) ++minus;
          traj.spin = flow(coeffs, traj.t, traj.spin, h);
          traj.t = tgrid[i - 1] + static_cast<double>(k + 1) * h;
        }
        traj.jumps.clear();
      }
      for (int c = 0; c < 3; ++c) acc[3 * i + static_cast<std::size_t>(c)].add(traj.spin[c]);
      jumps[i].add(static_cast<double>(minus));
    }
  }
  UnravelResult res;
  res.t.assign(tgrid.begin(), tgrid.end());
  for (std::size_t i = 0; i < n_out; ++i) {
    BlochEstimate e;
    for (int c = 0; c < 3; ++c) {
      e.mean[c] = acc[3 * i + static_cast<std::size_t>(c)].mean();
      e.sem[c] = acc[3 * i + static_cast<std::size_t>(c)].stderr_of_mean();
    }
    res.bloch.push_back(e);
    res.minus_jumps.push_back(jumps[i].mean());
    res.minus_jumps_stderr.push_back(jumps[i].stderr_of_mean());
  }
  return res;
}

}  // namespace redmash
