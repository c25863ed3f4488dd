#pragma once

#include "redmash/bath.hpp"
#include "redmash/spin_propagator.hpp"
#include "redmash/two_level.hpp"

namespace redmash {

// Phase point, spin and the adiabatic data at q. `rates` and `grad_omega`
// describe the surface the nuclei move on: for pure MASH the rates are zero,
// rates.omega_ls is the bare gap and grad_omega its gradient.
struct MashState {
  Vec q;
  Vec p;
  SpinVector spin{0.0, 0.0, 1.0};
  int active = 1;  // +1 upper adiabat, -1 lower; always sgn S_z
  AdiabaticFrame frame;
  RateSet rates;
  Vec grad_omega;
};

struct MashOptions {
  int bisections = 10;
  int max_crossings = 8;
  double gap_floor = kDefaultGapFloor;
};

// Counters for the hops handled during a step.
struct HopStats {
  int hops = 0;
  int frustrated = 0;
};

MashState make_mash_state(const DiabaticModel& model, Vec q, Vec p, const SpinVector& spin,
                          const Dissipator* dissipator = nullptr, double gap_floor = kDefaultGapFloor);

// Kinetic plus active-surface energy p^2/2 + vbar + active * omega / 2.
double mash_energy(const MashState& s);

// Symmetric splitting: half-step exact spin rotation, velocity Verlet on the
// active adiabat, half-step spin rotation. Equator crossings are bracketed by
// bisection on the exact propagator and resolved with hop_impulse.
MashState mash_step(MashState state, const DiabaticModel& model, double dt, const MashOptions& opts = {},
                    HopStats* stats = nullptr);

struct HopOutcome {
  Vec p;
  bool hopped = false;
};

// Momentum update at an equator crossing from surface `active` across gap.
// Successful: p_par' = sgn(p_par) sqrt(p_par^2 + 2 active gap) along the NAC.
// Frustrated: p_par' = -p_par. Throws ZeroNac when |nac| = 0.
HopOutcome hop_momentum(const Vec& p, const Vec& nac, double gap, int active);

// hop_momentum applied to a state; flips `active` on success. The spin is
// left untouched (the propagator places it on the correct side).
MashState hop_impulse(MashState state, bool* hopped = nullptr);

struct CrossingBracket {
  double lo = 0.0;  // last bisection time still on the original side
  double hi = 0.0;  // first bisection time on the new side
};

// Bisection of the sign change of S_z(t) = [exp(M t) S]_z on [0, h].
CrossingBracket bracket_crossing(const SpinVector& s, const SpinGenerator& gen, double h, int bisections);

// Midpoint of the bracket; throws NoCrossing if S_z has the same sign at 0 and h.
double find_hop_time(const SpinVector& s, const SpinGenerator& gen, double h, int bisections = 10);

// (q, p, S) -> (q, -p, (S_x, -S_y, S_z)).
MashState time_reversed(MashState s);

enum class OperatorClass { population, coherence };

// Running weight of a trajectory. Before any jump factor = 1 and the
// weighting factors are W_{mu P}(t) = a_mu |S_z(t)|, W_{mu C}(t) = a_mu with
// a_P = 2, a_C = 3; each sigma+- jump multiplies factor by 2 |S_z(t-)|.
struct WeightRecord {
  double factor = 1.0;

  double prefactor(OperatorClass mu) const { return (mu == OperatorClass::population ? 2.0 : 3.0) * factor; }
  double weight(OperatorClass mu, OperatorClass nu, const SpinVector& s) const {
    return prefactor(mu) * (nu == OperatorClass::population ? std::abs(s.z()) : 1.0);
  }
};

// Per-trajectory integrand of the MASH correlation function
//   sum_{mu nu} A_mu(S0) W_{mu nu}(t) B_nu(S(t)),
// with phase-space functions I -> 1, sz -> sgn S_z, sx -> S_x, sy -> S_y.
// The correlation function is the sphere measure (2 for the full sphere,
// 1 for a hemisphere) times the ensemble mean of this quantity.
double correlation_integrand(const PauliExpansion& a0, const SpinVector& s0, const WeightRecord& w,
                             const PauliExpansion& bt, const SpinVector& st);

// (P0, P1) = ((1 - r) / 2, (1 + r) / 2), r = <W_PP(t) sgn S_z(t)> / <W_PP(0)>.
std::pair<double, double> adiabatic_populations(double mean_signed_weight, double mean_initial_weight);

// (1 + C(t) / C(0)) / 2; throws ZeroDenominator for C(0) = 0.
double diabatic_population(double c_t, double c_0);

namespace detail {

// Recomputes frame, rates and the gradient of the dressed gap at state.q.
void refresh_surface(MashState& s, const DiabaticModel& model, const Dissipator* dissipator,
                     double gap_floor);

// Linear spin generator at the current state; growth = (g- - g+)/2 sgn S_z.
SpinGenerator spin_generator(const MashState& s);

// Exact spin propagation over h with hop handling at fixed q.
void spin_substep(MashState& s, double h, const MashOptions& opts, HopStats& stats);

// Velocity Verlet on the active surface.
void verlet(MashState& s, double dt, const DiabaticModel& model, const Dissipator* dissipator,
            double gap_floor);

}  // namespace detail

}  // namespace redmash
