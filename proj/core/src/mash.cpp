#include "redmash/mash.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "redmash/errors.hpp"

namespace redmash {

namespace detail {

void refresh_surface(MashState& s, const DiabaticModel& model, const Dissipator* dissipator,
                     double gap_floor) {
  const bool has_previous = s.frame.gap > 0.0 && s.frame.nac.size() == s.q.size();
  s.frame = adiabatize(model, s.q, has_previous ? &s.frame : nullptr, gap_floor);
  if (dissipator != nullptr) {
    s.rates = dissipator->rates(s.frame);
    s.grad_omega = dissipator->grad_omega_ls(s.frame, s.rates);
  } else {
    s.rates = RateSet{};
    s.rates.omega_ls = s.frame.gap;
    s.grad_omega = s.frame.grad_gap;
  }
}

SpinGenerator spin_generator(const MashState& s) {
  SpinGenerator g;
  g.omega = s.rates.omega_ls;
  g.tau = s.frame.nac.dot(s.p);
  g.growth = 0.5 * (s.rates.gamma_minus - s.rates.gamma_plus) * sgn(s.spin.z());
  return g;
}

void spin_substep(MashState& s, double h, const MashOptions& opts, HopStats& stats) {
  double remaining = h;
  int crossings = 0;
  while (remaining > 0.0) {
    const SpinGenerator gen = spin_generator(s);
    const SpinVector next = spin_propagator(gen, remaining) * s.spin;
    if (sgn(next.z()) == static_cast<double>(s.active)) {
      s.spin = next;
      return;
    }
    if (++crossings > opts.max_crossings) {
      std::ostringstream msg;
      msg << "more than " << opts.max_crossings << " equator crossings in one step";
      throw StepTooLarge(msg.str());
    }
    const CrossingBracket br = bracket_crossing(s.spin, gen, remaining, opts.bisections);
    const SpinVector before = spin_propagator(gen, br.lo) * s.spin;
    const SpinVector after = spin_propagator(gen, br.hi) * s.spin;
    bool hopped = false;
    s = hop_impulse(std::move(s), &hopped);
    if (hopped) {
      ++stats.hops;
      s.spin = after;
      remaining -= br.hi;
    } else {
      ++stats.frustrated;
      s.spin = before;
      remaining -= br.lo;
    }
    if (sgn(s.spin.z()) != static_cast<double>(s.active)) {
      // Bisection landed exactly on the equator; keep the spin on the
      // side of the active surface.
      s.spin.z() = s.active * std::numeric_limits<double>::min();
    }
  }
}

void verlet(MashState& s, double dt, const DiabaticModel& model, const Dissipator* dissipator,
            double gap_floor) {
  const double half = 0.5 * static_cast<double>(s.active);
  s.p -= (0.5 * dt) * (s.frame.grad_vbar + half * s.grad_omega);
  s.q += dt * s.p;
  refresh_surface(s, model, dissipator, gap_floor);
  s.p -= (0.5 * dt) * (s.frame.grad_vbar + half * s.grad_omega);
}

}  // namespace detail

MashState make_mash_state(const DiabaticModel& model, Vec q, Vec p, const SpinVector& spin,
                          const Dissipator* dissipator, double gap_floor) {
  if (static_cast<std::size_t>(q.size()) != model.dof() || q.size() != p.size()) {
    throw Error("make_mash_state: phase point does not match the model");
  }
  if (spin.z() == 0.0) throw EquatorUndefined("initial spin on the equator");
  MashState s;
  s.q = std::move(q);
  s.p = std::move(p);
  s.spin = spin;
  s.active = spin.z() > 0.0 ? 1 : -1;
  detail::refresh_surface(s, model, dissipator, gap_floor);
  return s;
}

double mash_energy(const MashState& s) {
  return 0.5 * s.p.squaredNorm() + s.frame.vbar + 0.5 * s.active * s.rates.omega_ls;
}

MashState mash_step(MashState state, const DiabaticModel& model, double dt, const MashOptions& opts,
                    HopStats* stats) {
  HopStats local;
  HopStats& st = stats != nullptr ? *stats : local;
  detail::spin_substep(state, 0.5 * dt, opts, st);
  detail::verlet(state, dt, model, nullptr, opts.gap_floor);
  detail::spin_substep(state, 0.5 * dt, opts, st);
  return state;
}

HopOutcome hop_momentum(const Vec& p, const Vec& nac, double gap, int active) {
  const double norm = nac.norm();
  if (norm == 0.0) throw ZeroNac("hop requested where the nonadiabatic coupling vanishes");
  const Vec dir = nac / norm;
  const double p_par = p.dot(dir);
  const double disc = p_par * p_par + 2.0 * static_cast<double>(active) * gap;
  HopOutcome out;
  double p_new = -p_par;
  if (disc >= 0.0) {
    p_new = (p_par >= 0.0 ? 1.0 : -1.0) * std::sqrt(disc);
    out.hopped = true;
  }
  out.p = p + (p_new - p_par) * dir;
  return out;
}

MashState hop_impulse(MashState state, bool* hopped) {
  HopOutcome h = hop_momentum(state.p, state.frame.nac, state.rates.omega_ls, state.active);
  state.p = std::move(h.p);
  if (h.hopped) state.active = -state.active;
  if (hopped != nullptr) *hopped = h.hopped;
  return state;
}

CrossingBracket bracket_crossing(const SpinVector& s, const SpinGenerator& gen, double h, int bisections) {
  const double side = sgn(s.z());
  CrossingBracket br{0.0, h};
  for (int i = 0; i < bisections; ++i) {
    const double mid = 0.5 * (br.lo + br.hi);
    const double z = (spin_propagator(gen, mid) * s).z();
    if (sgn(z) == side) {
      br.lo = mid;
    } else {
      br.hi = mid;
    }
  }
  return br;
}

double find_hop_time(const SpinVector& s, const SpinGenerator& gen, double h, int bisections) {
  const double end = (spin_propagator(gen, h) * s).z();
  if (sgn(end) == sgn(s.z())) throw NoCrossing("S_z keeps its sign over the interval");
  const CrossingBracket br = bracket_crossing(s, gen, h, bisections);
  return 0.5 * (br.lo + br.hi);
}

MashState time_reversed(MashState s) {
  s.p = -s.p;
  s.spin.y() = -s.spin.y();
  return s;
}

double correlation_integrand(const PauliExpansion& a0, const SpinVector& s0, const WeightRecord& w,
                             const PauliExpansion& bt, const SpinVector& st) {
  const double a = w.factor * (2.0 * (a0.aI + a0.az * sgn(s0.z())) + 3.0 * (a0.ax * s0.x() + a0.ay * s0.y()));
  const double b = bt.aI * std::abs(st.z()) + bt.az * st.z() + bt.ax * st.x() + bt.ay * st.y();
  return a * b;
}

std::pair<double, double> adiabatic_populations(double mean_signed_weight, double mean_initial_weight) {
  if (mean_initial_weight == 0.0) throw ZeroDenominator("adiabatic populations: zero initial weight");
  const double r = mean_signed_weight / mean_initial_weight;
  return {0.5 * (1.0 - r), 0.5 * (1.0 + r)};
}

double diabatic_population(double c_t, double c_0) {
  if (c_0 == 0.0) throw ZeroDenominator("diabatic population: C(0) = 0");
  return 0.5 * (1.0 + c_t / c_0);
}

}  // namespace redmash
