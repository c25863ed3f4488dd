#include "redmash/hybrid.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "redmash/errors.hpp"
#include "redmash/statistics.hpp"

namespace redmash {

HybridState make_hybrid_state(const DiabaticModel& model, const Dissipator& dissipator, Vec q, Vec p,
                              const SpinVector& spin, double gap_floor) {
  HybridState s;
  static_cast<MashState&>(s) = make_mash_state(model, std::move(q), std::move(p), spin, &dissipator, gap_floor);
  return s;
}

SpinVector hybrid_spin_propagate(const SpinVector& spin, double omega_ls, double tau, double gamma_plus,
                                 double gamma_minus, double dt) {
  SpinGenerator g;
  g.omega = omega_ls;
  g.tau = tau;
  g.growth = 0.5 * (gamma_minus - gamma_plus) * sgn(spin.z());
  return spin_propagator(g, dt) * spin;
}

JumpProbabilities jump_probabilities(const SpinVector& spin, const RateSet& rates) {
  JumpProbabilities p;
  if (spin.z() > 0.0) p.minus = rates.gamma_minus;
  if (spin.z() < 0.0) p.plus = rates.gamma_plus;
  p.z = rates.gamma_z;
  return p;
}

HybridState apply_jump(HybridState s, JumpChannel channel, RandomStream& rng) {
  switch (channel) {
    case JumpChannel::plus:
    case JumpChannel::minus: {
      const bool up = channel == JumpChannel::plus;
      s.weight.factor *= 2.0 * std::abs(s.spin.z());
      s.spin = sample_sphere(rng, up ? Hemisphere::upper : Hemisphere::lower);
      s.bath_energy += (s.active - (up ? 1 : -1)) * 0.5 * s.rates.omega_ls;
      s.active = up ? 1 : -1;
      break;
    }
    case JumpChannel::z:
      s.spin.x() = -s.spin.x();
      s.spin.y() = -s.spin.y();
      break;
  }
  s.jumps.push_back({s.t, channel, s.weight.factor});
  return s;
}

HybridState hybrid_step(HybridState s, const DiabaticModel& model, const Dissipator& dissipator, double dt,
                        RandomStream& rng, const MashOptions& opts, HopStats* stats) {
  const JumpProbabilities rate = jump_probabilities(s.spin, s.rates);
  const double p_plus = rate.plus * dt;
  const double p_minus = rate.minus * dt;
  const double p_total = rate.total() * dt;
  if (p_total > kMaxJumpProbability) {
    std::ostringstream msg;
    msg << "jump probability " << p_total << " per step exceeds " << kMaxJumpProbability;
    throw StepTooLarge(msg.str());
  }
  const double u = rng.uniform();
  if (u < p_plus) {
    s = apply_jump(std::move(s), JumpChannel::plus, rng);
  } else if (u < p_plus + p_minus) {
    s = apply_jump(std::move(s), JumpChannel::minus, rng);
  } else if (u < p_total) {
    s = apply_jump(std::move(s), JumpChannel::z, rng);
  }
  HopStats local;
  HopStats& st = stats != nullptr ? *stats : local;
  detail::spin_substep(s, 0.5 * dt, opts, st);
  detail::verlet(s, dt, model, &dissipator, opts.gap_floor);
  detail::spin_substep(s, 0.5 * dt, opts, st);
  s.t += dt;
  return s;
}

namespace {

struct PrescribedStep {
  double t = 0.0;
  double h = 0.0;
  SchedulePoint start;
  SpinGenerator upper;
  SpinGenerator lower;
  Eigen::Matrix3d prop_upper;
  Eigen::Matrix3d prop_lower;
};

SpinGenerator prescribed_generator(const SchedulePoint& c, double side) {
  SpinGenerator g;
  g.omega = c.omega_ls;
  g.tau = c.tau;
  g.growth = 0.5 * (c.gamma_minus - c.gamma_plus) * side;
  return g;
}

}  // namespace

PrescribedResult run_prescribed_hybrid(const DrivenSchedule& schedule, const BlochState& rho0,
                                       std::span<const double> tgrid, std::size_t n_traj, std::uint64_t seed,
                                       double dt, int bisections) {
  if (tgrid.empty() || n_traj < 2 || !(dt > 0.0)) throw Error("run_prescribed_hybrid: bad arguments");
  schedule.at(tgrid.front());
  schedule.at(tgrid.back());

  // Steps are shared by all trajectories, so their propagators are built once.
  std::vector<PrescribedStep> steps;
  std::vector<std::size_t> output_after;  // number of steps completed at each output time
  output_after.push_back(0);
  for (std::size_t i = 1; i < tgrid.size(); ++i) {
    const double span = tgrid[i] - tgrid[i - 1];
    const auto n = static_cast<std::size_t>(std::ceil(span / dt - 1e-9));
    const double h = span / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
      PrescribedStep st;
      st.t = tgrid[i - 1] + static_cast<double>(k) * h;
      st.h = h;
      st.start = schedule.at(st.t);
      const SchedulePoint mid = schedule.at(st.t + 0.5 * h);
      st.upper = prescribed_generator(mid, 1.0);
      st.lower = prescribed_generator(mid, -1.0);
      st.prop_upper = spin_propagator(st.upper, h);
      st.prop_lower = spin_propagator(st.lower, h);
      const double p = (st.start.gamma_plus + st.start.gamma_minus + st.start.gamma_z) * h;
      if (p > kMaxJumpProbability) {
        std::ostringstream msg;
        msg << "jump probability " << p << " per step exceeds " << kMaxJumpProbability << " at t = " << st.t;
        throw StepTooLarge(msg.str());
      }
      steps.push_back(st);
    }
    output_after.push_back(steps.size());
  }

  const PauliExpansion a0{0.5, 0.5 * rho0.rx, 0.5 * rho0.ry, 0.5 * rho0.rz};
  const PauliExpansion bx{0.0, 1.0, 0.0, 0.0};
  const PauliExpansion by{0.0, 0.0, 1.0, 0.0};
  const PauliExpansion bz{0.0, 0.0, 0.0, 1.0};
  const PauliExpansion bi{1.0, 0.0, 0.0, 0.0};
  const std::size_t n_out = tgrid.size();
  std::vector<Accumulator> acc(4 * n_out);

  for (std::size_t n = 0; n < n_traj; ++n) {
    RandomStream init(seed, n, RandomStream::Purpose::initial);
    RandomStream rng(seed, n, RandomStream::Purpose::jumps);
    const SpinVector s0 = sample_sphere(init, Hemisphere::full);
    SpinVector s = s0;
    WeightRecord w;
    auto record = [&](std::size_t i) {
      // Sphere measure 2 for full-sphere sampling.
      acc[4 * i + 0].add(2.0 * correlation_integrand(a0, s0, w, bx, s));
      acc[4 * i + 1].add(2.0 * correlation_integrand(a0, s0, w, by, s));
      acc[4 * i + 2].add(2.0 * correlation_integrand(a0, s0, w, bz, s));
      acc[4 * i + 3].add(2.0 * correlation_integrand(a0, s0, w, bi, s));
    };
    record(0);
    std::size_t out = 1;
    for (std::size_t k = 0; k < steps.size(); ++k) {
      const PrescribedStep& st = steps[k];
      const double side = sgn(s.z());
      const double p_plus = side < 0.0 ? st.start.gamma_plus * st.h : 0.0;
      const double p_minus = side > 0.0 ? st.start.gamma_minus * st.h : 0.0;
      const double p_z = st.start.gamma_z * st.h;
      const double u = rng.uniform();
      if (u < p_plus + p_minus) {
        w.factor *= 2.0 * std::abs(s.z());
        s = sample_sphere(rng, u < p_plus ? Hemisphere::upper : Hemisphere::lower);
      } else if (u < p_plus + p_minus + p_z) {
        s.x() = -s.x();
        s.y() = -s.y();
      }
      const double now = sgn(s.z());
      SpinVector next = (now > 0.0 ? st.prop_upper : st.prop_lower) * s;
      if (sgn(next.z()) != now) {
        // The damping sign flips at the equator: split the step there.
        double remaining = st.h;
        int crossings = 0;
        while (true) {
          const SpinGenerator& gen = sgn(s.z()) > 0.0 ? st.upper : st.lower;
          next = spin_propagator(gen, remaining) * s;
          if (sgn(next.z()) == sgn(s.z()) || ++crossings > 8) break;
          const CrossingBracket br = bracket_crossing(s, gen, remaining, bisections);
          s = spin_propagator(gen, br.hi) * s;
          remaining -= br.hi;
          if (s.z() == 0.0) s.z() = sgn(next.z()) * std::numeric_limits<double>::min();
          if (remaining <= 0.0) {
            next = s;
            break;
          }
        }
      }
      s = next;
      while (out < n_out && output_after[out] == k + 1) record(out++);
    }
  }

  PrescribedResult res;
  res.t.assign(tgrid.begin(), tgrid.end());
  for (std::size_t i = 0; i < n_out; ++i) {
    BlochEstimate e;
    for (int c = 0; c < 3; ++c) {
      e.mean[c] = acc[4 * i + static_cast<std::size_t>(c)].mean();
      e.sem[c] = acc[4 * i + static_cast<std::size_t>(c)].stderr_of_mean();
    }
    res.bloch.push_back(e);
    res.identity.push_back(acc[4 * i + 3].mean());
    res.identity_sem.push_back(acc[4 * i + 3].stderr_of_mean());
  }
  return res;
}

}  // namespace redmash
