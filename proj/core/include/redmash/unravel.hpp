#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "redmash/redfield.hpp"
#include "redmash/rng.hpp"
#include "redmash/two_level.hpp"

namespace redmash {

enum class JumpChannel { plus, minus, z };

struct JumpEvent {
  double t = 0.0;
  JumpChannel channel = JumpChannel::z;
  double weight = 1.0;  // estimator weight carried by the trajectory right after the jump
};

// Pure-state trajectory of the piecewise deterministic unravelling.
struct QuantumTrajectory {
  SpinVector spin{0.0, 0.0, 1.0};
  double t = 0.0;
  std::vector<JumpEvent> jumps;
};

// Largest allowed dt * (total jump probability per unit time).
constexpr double kMaxJumpProbability = 0.1;

// Nonlinear no-jump flow of the unit spin, k = (g- - g+)/2:
//   dS_x/dt = -w S_y + 2 tau S_z + k S_x S_z
//   dS_y/dt =  w S_x + k S_y S_z
//   dS_z/dt = -2 tau S_x - k (1 - S_z^2)
Eigen::Vector3d pdp_drift(const SchedulePoint& c, const Eigen::Vector3d& s);

// One step: at most one jump drawn at the step start (sigma+ to the north
// pole, sigma- to the south pole, sigma_z a pi rotation about z), then the
// deterministic flow over dt with RK4 and renormalisation.
QuantumTrajectory pdp_step(QuantumTrajectory traj, const SchedulePoint& c, double dt, RandomStream& rng);

struct BlochEstimate {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Vector3d sem = Eigen::Vector3d::Zero();
};

// Component-wise mean and standard error of the spin vectors.
BlochEstimate ensemble_density(std::span<const SpinVector> spins);

struct UnravelResult {
  std::vector<double> t;
  std::vector<BlochEstimate> bloch;
  // Mean number of sigma- jumps before each output time, with its stderr.
  std::vector<double> minus_jumps;
  std::vector<double> minus_jumps_stderr;
};

// Runs n_traj trajectories of the static or driven unravelling from rho0
// (mixed states are sampled as +-r/|r| with probabilities (1 +- |r|)/2) and
// reports Bloch estimates on tgrid. Steps of at most dt.
UnravelResult run_unravel(const DrivenSchedule& schedule, const BlochState& rho0,
                          std::span<const double> tgrid, std::size_t n_traj, std::uint64_t seed,
                          double dt);

}  // namespace redmash
