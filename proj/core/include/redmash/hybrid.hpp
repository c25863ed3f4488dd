#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "redmash/bath.hpp"
#include "redmash/mash.hpp"
#include "redmash/redfield.hpp"
#include "redmash/rng.hpp"
#include "redmash/unravel.hpp"

namespace redmash {

// MASH state plus the stochastic bookkeeping of the hybrid method. The spin
// norm is free; sgn S_z still selects the active surface.
struct HybridState : MashState {
  double t = 0.0;
  WeightRecord weight;
  std::vector<JumpEvent> jumps;
  // Electronic energy released to the quantum bath by jumps (+omega_ls per
  // sigma-, -omega_ls per sigma+). Jumps do not rescale the momentum.
  double bath_energy = 0.0;
};

HybridState make_hybrid_state(const DiabaticModel& model, const Dissipator& dissipator, Vec q, Vec p,
                              const SpinVector& spin, double gap_floor = kDefaultGapFloor);

// Exact linear flow over dt:
//   dS_x/dt = -w S_y + 2 tau S_z + k S_x,  dS_y/dt = w S_x + k S_y,  dS_z/dt = -2 tau S_x,
// with k = (g- - g+)/2 sgn S_z, so the transverse part grows in the upper
// hemisphere when g- > g+. Requires sgn S_z constant over the step.
SpinVector hybrid_spin_propagate(const SpinVector& spin, double omega_ls, double tau, double gamma_plus,
                                 double gamma_minus, double dt);

// Jump rates: sigma- only from the upper hemisphere, sigma+ only from the
// lower one, sigma_z everywhere.
struct JumpProbabilities {
  double plus = 0.0;
  double minus = 0.0;
  double z = 0.0;
  double total() const { return plus + minus + z; }
};

JumpProbabilities jump_probabilities(const SpinVector& spin, const RateSet& rates);

// sigma+- : resample the spin uniformly in the target hemisphere and multiply
// the weight factor by 2 |S_z(t-)|. sigma_z : (S_x, S_y) -> (-S_x, -S_y).
HybridState apply_jump(HybridState state, JumpChannel channel, RandomStream& rng);

// Draws at most one jump at the step start, then half spin step, velocity
// Verlet on vbar +- omega_ls / 2, half spin step.
HybridState hybrid_step(HybridState state, const DiabaticModel& model, const Dissipator& dissipator,
                        double dt, RandomStream& rng, const MashOptions& opts = {}, HopStats* stats = nullptr);

struct PrescribedResult {
  std::vector<double> t;
  std::vector<BlochEstimate> bloch;
  // Ensemble estimate of tr[rho(t)], exactly 1 for the quantum dynamics.
  std::vector<double> identity;
  std::vector<double> identity_sem;
};

// Hybrid spin ensemble along a prescribed path: the schedule supplies
// omega_ls, tau and rates directly. Full-sphere initial spins; Bloch
// estimates are correlation functions of rho0 with sigma_x,y,z.
PrescribedResult run_prescribed_hybrid(const DrivenSchedule& schedule, const BlochState& rho0,
                                       std::span<const double> tgrid, std::size_t n_traj, std::uint64_t seed,
                                       double dt, int bisections = 10);

}  // namespace redmash
