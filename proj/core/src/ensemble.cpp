#include "redmash/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <thread>

#include "redmash/errors.hpp"
#include "redmash/hybrid.hpp"
#include "redmash/mash.hpp"
#include "redmash/redfield.hpp"
#include "redmash/statistics.hpp"
#include "redmash/unravel.hpp"

namespace redmash {

const EstimatorSeries& EnsembleResult::estimator(const std::string& name) const {
  for (const auto& e : estimators) {
    if (e.name == name) return e;
  }
  throw Error("no estimator named " + name);
}

bool EnsembleResult::has_estimator(const std::string& name) const {
  return std::any_of(estimators.begin(), estimators.end(), [&](const auto& e) { return e.name == name; });
}

std::vector<std::size_t> output_steps(std::size_t n_steps, std::size_t requested) {
  if (requested < 2) throw ConfigInvalid("at least two output points are required");
  const std::size_t n_out = std::min(requested, n_steps + 1);
  std::vector<std::size_t> k(n_out);
  for (std::size_t i = 0; i < n_out; ++i) {
    k[i] = static_cast<std::size_t>(
        std::llround(static_cast<double>(i) * static_cast<double>(n_steps) / static_cast<double>(n_out - 1)));
  }
  return k;
}

std::size_t worker_count(std::size_t requested) {
  if (const char* env = std::getenv("REDMASH_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1) {
      throw ConfigInvalid(std::string("REDMASH_WORKERS must be a positive integer, got '") + env + "'");
    }
    return static_cast<std::size_t>(v);
  }
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

namespace {

using Clock = std::chrono::steady_clock;

const PauliExpansion kIdentity{1.0, 0.0, 0.0, 0.0};
const PauliExpansion kSigmaX{0.0, 1.0, 0.0, 0.0};
const PauliExpansion kSigmaY{0.0, 0.0, 1.0, 0.0};
const PauliExpansion kSigmaZ{0.0, 0.0, 0.0, 1.0};
const PauliExpansion kUpper{0.5, 0.0, 0.0, 0.5};

// Partial statistics of one chunk of trajectories. Every series is paired
// with the trajectory's C_{A,I}(0) integrand so that normalised estimators
// come out as ratios of means.
struct Partial {
  explicit Partial(std::size_t n_out, bool diabatic, bool emission)
      : x(n_out), y(n_out), z(n_out), identity(n_out) {
    if (diabatic) pa.resize(n_out);
    if (emission) {
      emitted.resize(n_out);
      expected.resize(n_out);
    }
  }

  void merge(const Partial& o) {
    auto m = [](std::vector<PairAccumulator>& a, const std::vector<PairAccumulator>& b) {
      for (std::size_t i = 0; i < a.size(); ++i) a[i].merge(b[i]);
    };
    m(x, o.x);
    m(y, o.y);
    m(z, o.z);
    m(identity, o.identity);
    m(pa, o.pa);
    m(emitted, o.emitted);
    m(expected, o.expected);
    emission_total.merge(o.emission_total);
    emission_martingale.merge(o.emission_martingale);
    emission_improved.merge(o.emission_improved);
    hops += o.hops;
    frustrated += o.frustrated;
    jumps += o.jumps;
    max_energy_drift = std::max(max_energy_drift, o.max_energy_drift);
  }

  std::vector<PairAccumulator> x, y, z, identity, pa, emitted, expected;
  PairAccumulator emission_total;
  Accumulator emission_martingale;
  PairAccumulator emission_improved;
  double hops = 0.0;
  double frustrated = 0.0;
  double jumps = 0.0;
  double max_energy_drift = 0.0;
};

struct TrajectoryPlan {
  const TrajectorySetup* setup = nullptr;
  Method method = Method::mash;
  std::uint64_t seed = 0;
  std::size_t n_steps = 0;
  double h = 0.0;
  std::vector<std::size_t> out_steps;
  MashOptions opts;
};

template <class State>
void run_trajectory(const TrajectoryPlan& plan, std::size_t n, Partial& part) {
  const TrajectorySetup& setup = *plan.setup;
  RandomStream init(plan.seed, n, RandomStream::Purpose::initial);
  RandomStream jumps(plan.seed, n, RandomStream::Purpose::jumps);
  auto [q0, p0] = setup.sample_nuclei(init);
  const SpinVector s0 = sample_sphere(init, setup.hemisphere);
  State s;
  if constexpr (std::is_same_v<State, HybridState>) {
    s = make_hybrid_state(*setup.model, *setup.dissipator, std::move(q0), std::move(p0), s0, plan.opts.gap_floor);
  } else {
    s = make_mash_state(*setup.model, std::move(q0), std::move(p0), s0, nullptr, plan.opts.gap_floor);
  }
  const PauliExpansion a0 = setup.initial_diabatic ? expand_diabatic_operator(s.frame, *setup.initial_diabatic)
                                                   : *setup.initial_adiabatic;
  const double measure = setup.sphere_measure;
  WeightRecord unit;
  const double c0 = measure * correlation_integrand(a0, s0, unit, kIdentity, s0);
  const double e0 = mash_energy(s);

  auto weight = [&]() -> const WeightRecord& {
    if constexpr (std::is_same_v<State, HybridState>) {
      return s.weight;
    } else {
      return unit;
    }
  };
  auto integrand = [&](const PauliExpansion& b) {
    return measure * correlation_integrand(a0, s0, weight(), b, s.spin);
  };

  double emitted_bin = 0.0, expected_bin = 0.0;
  double emitted_total = 0.0, expected_total = 0.0, improved_total = 0.0;
  double bin_start = 0.0;
  HopStats stats;
  std::size_t out = 0;
  auto record = [&](std::size_t step) {
    part.x[out].add(integrand(kSigmaX), c0);
    part.y[out].add(integrand(kSigmaY), c0);
    part.z[out].add(integrand(kSigmaZ), c0);
    part.identity[out].add(integrand(kIdentity), c0);
    if (!part.pa.empty()) {
      part.pa[out].add(integrand(expand_diabatic_operator(s.frame, diabatic_sigma_z())), c0);
    }
    if (!part.emitted.empty()) {
      const double width = (static_cast<double>(step) - bin_start) * plan.h;
      part.emitted[out].add(width > 0.0 ? emitted_bin / width : 0.0, c0);
      part.expected[out].add(width > 0.0 ? expected_bin / width : 0.0, c0);
      emitted_bin = expected_bin = 0.0;
      bin_start = static_cast<double>(step);
    }
    ++out;
  };

  record(0);
  for (std::size_t k = 1; k <= plan.n_steps; ++k) {
    try {
      if constexpr (std::is_same_v<State, HybridState>) {
        const std::size_t n_jumps = s.jumps.size();
        double upper_weight = 0.0;
        if (setup.emission) {
          // Expected weight of a sigma- jump drawn now, and the same
          // quantity integrated against the rate.
          upper_weight = integrand(kUpper);
          const double gm = s.rates.gamma_minus * plan.h;
          expected_bin += gm * upper_weight;
          expected_total += gm * upper_weight;
          improved_total += gm * 0.5 * (c0 + integrand(kSigmaZ));
        }
        s = hybrid_step(std::move(s), *setup.model, *setup.dissipator, plan.h, jumps, plan.opts, &stats);
        if (s.jumps.size() > n_jumps) {
          part.jumps += 1.0;
          if (setup.emission && s.jumps.back().channel == JumpChannel::minus) {
            emitted_bin += upper_weight;
            emitted_total += upper_weight;
          }
        }
      } else {
        s = mash_step(std::move(s), *setup.model, plan.h, plan.opts, &stats);
      }
    } catch (const StepTooLarge& e) {
      throw StepTooLarge("trajectory " + std::to_string(n) + ": " + e.what());
    }
    if constexpr (!std::is_same_v<State, HybridState>) {
      part.max_energy_drift = std::max(part.max_energy_drift, std::abs(mash_energy(s) - e0));
    }
    while (out < plan.out_steps.size() && plan.out_steps[out] == k) record(k);
  }
  part.hops += stats.hops;
  part.frustrated += stats.frustrated;
  if (setup.emission) {
    part.emission_total.add(emitted_total, c0);
    part.emission_martingale.add(emitted_total - expected_total);
    part.emission_improved.add(improved_total, c0);
  }
}

EstimatorSeries ratio_series(const std::string& name, const std::vector<PairAccumulator>& acc, double scale,
                             double offset) {
  EstimatorSeries e{name, {}, {}};
  for (const auto& a : acc) {
    e.mean.push_back(offset + scale * a.ratio());
    e.sem.push_back(std::abs(scale) * a.ratio_stderr());
  }
  return e;
}

EnsembleResult run_trajectories(const Config& cfg, std::size_t workers) {
  const TrajectorySetup setup = cfg.model == ModelKind::spin_boson ? spin_boson_setup(cfg.spin_boson, cfg.run.method)
                                                                   : cavity_setup(cfg.cavity, cfg.run.method);
  TrajectoryPlan plan;
  plan.setup = &setup;
  plan.method = cfg.run.method;
  plan.seed = cfg.run.seed;
  plan.n_steps = static_cast<std::size_t>(std::ceil(cfg.t_max() / cfg.dt() - 1e-9));
  plan.h = cfg.t_max() / static_cast<double>(plan.n_steps);
  plan.out_steps = output_steps(plan.n_steps, cfg.run.n_output);
  plan.opts.bisections = cfg.run.bisections;
  const std::size_t n_out = plan.out_steps.size();
  const bool hybrid = cfg.run.method == Method::hybrid;

  const std::size_t n_traj = cfg.run.n_traj;
  const std::size_t chunk = std::max<std::size_t>(1000, n_traj / 64);
  const std::size_t n_chunks = (n_traj + chunk - 1) / chunk;
  std::vector<Partial> partials(n_chunks, Partial(n_out, setup.diabatic_population, setup.emission));
  std::vector<std::exception_ptr> errors(n_chunks);
  std::atomic<std::size_t> next{0};

  auto work = [&]() {
    for (std::size_t c = next++; c < n_chunks; c = next++) {
      try {
        const std::size_t end = std::min(n_traj, (c + 1) * chunk);
        for (std::size_t n = c * chunk; n < end; ++n) {
          if (hybrid) {
            run_trajectory<HybridState>(plan, n, partials[c]);
          } else {
            run_trajectory<MashState>(plan, n, partials[c]);
          }
        }
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  const std::size_t n_workers = std::min(worker_count(workers), n_chunks);
  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(work);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  Partial total = partials.front();
  for (std::size_t c = 1; c < n_chunks; ++c) total.merge(partials[c]);

  EnsembleResult r;
  r.dt = plan.h;
  for (std::size_t k : plan.out_steps) r.t.push_back(static_cast<double>(k) * plan.h);
  if (setup.diabatic_population) r.estimators.push_back(ratio_series("P_a", total.pa, 0.5, 0.5));
  r.estimators.push_back(ratio_series("P0", total.z, -0.5, 0.5));
  r.estimators.push_back(ratio_series("P1", total.z, 0.5, 0.5));
  r.estimators.push_back(ratio_series("naive_sum", total.identity, 1.0, 0.0));
  r.estimators.push_back(ratio_series("rho_x", total.x, 1.0, 0.0));
  r.estimators.push_back(ratio_series("rho_y", total.y, 1.0, 0.0));
  r.estimators.push_back(ratio_series("rho_z", total.z, 1.0, 0.0));
  if (setup.emission) {
    r.estimators.push_back(ratio_series("emission_rate", total.emitted, 1.0, 0.0));
    r.estimators.push_back(ratio_series("emission_rate_expected", total.expected, 1.0, 0.0));
    r.diagnostics["emission_probability"] = total.emission_total.ratio();
    r.diagnostics["emission_probability_stderr"] = total.emission_total.ratio_stderr();
    r.diagnostics["emission_minus_expected"] = total.emission_martingale.mean();
    r.diagnostics["emission_minus_expected_stderr"] = total.emission_martingale.stderr_of_mean();
    r.diagnostics["emission_expected_from_P1"] = total.emission_improved.ratio();
    r.diagnostics["emission_expected_from_P1_stderr"] = total.emission_improved.ratio_stderr();
  }
  r.diagnostics["hops_per_trajectory"] = total.hops / static_cast<double>(n_traj);
  r.diagnostics["frustrated_per_trajectory"] = total.frustrated / static_cast<double>(n_traj);
  if (hybrid) {
    r.diagnostics["jumps_per_trajectory"] = total.jumps / static_cast<double>(n_traj);
  } else {
    r.diagnostics["max_energy_drift"] = total.max_energy_drift;
  }
  return r;
}

EnsembleResult run_master_equation(const Config& cfg) {
  if (cfg.model != ModelKind::spin_boson) {
    throw ConfigInvalid("redfield and unravel runs need the spin-boson model");
  }
  const RateSet rates = spin_boson_static_rates(cfg.spin_boson);
  const AdiabaticFrame frame = spin_boson_system_frame(cfg.spin_boson);
  const PauliExpansion sz = expand_diabatic_operator(frame, diabatic_sigma_z());
  const BlochState rho0{sz.ax, sz.ay, sz.az};

  std::vector<double> grid;
  std::vector<BlochEstimate> bloch;
  EnsembleResult r;
  if (cfg.run.method == Method::redfield) {
    grid = uniform_grid(0.0, cfg.t_max(), cfg.run.n_output);
    for (const BlochState& b : propagate_static(rates, rho0, grid)) {
      BlochEstimate e;
      e.mean = b.vec();
      bloch.push_back(e);
    }
    r.dt = grid[1] - grid[0];
  } else {
    const auto n_steps = static_cast<std::size_t>(std::ceil(cfg.t_max() / cfg.dt() - 1e-9));
    const double h = cfg.t_max() / static_cast<double>(n_steps);
    for (std::size_t k : output_steps(n_steps, cfg.run.n_output)) grid.push_back(static_cast<double>(k) * h);
    const DrivenSchedule schedule({0.0, cfg.t_max()},
                                  {SchedulePoint::from_rates(rates), SchedulePoint::from_rates(rates)});
    UnravelResult u = run_unravel(schedule, rho0, grid, cfg.run.n_traj, cfg.run.seed, h);
    bloch = std::move(u.bloch);
    r.dt = h;
  }
  r.t = grid;
  EstimatorSeries pa{"P_a", {}, {}}, p0{"P0", {}, {}}, p1{"P1", {}, {}}, naive{"naive_sum", {}, {}};
  EstimatorSeries rx{"rho_x", {}, {}}, ry{"rho_y", {}, {}}, rz{"rho_z", {}, {}};
  for (const BlochEstimate& b : bloch) {
    const Eigen::Vector3d a(sz.ax, sz.ay, sz.az);
    pa.mean.push_back(0.5 * (1.0 + a.dot(b.mean)));
    pa.sem.push_back(0.5 * std::sqrt(a.cwiseAbs2().dot(b.sem.cwiseAbs2())));
    p0.mean.push_back(0.5 * (1.0 - b.mean.z()));
    p1.mean.push_back(0.5 * (1.0 + b.mean.z()));
    p0.sem.push_back(0.5 * b.sem.z());
    p1.sem.push_back(0.5 * b.sem.z());
    naive.mean.push_back(1.0);
    naive.sem.push_back(0.0);
    rx.mean.push_back(b.mean.x());
    ry.mean.push_back(b.mean.y());
    rz.mean.push_back(b.mean.z());
    rx.sem.push_back(b.sem.x());
    ry.sem.push_back(b.sem.y());
    rz.sem.push_back(b.sem.z());
  }
  r.estimators = {pa, p0, p1, naive, rx, ry, rz};
  r.diagnostics["omega_ls"] = rates.omega_ls;
  r.diagnostics["gamma_plus"] = rates.gamma_plus;
  r.diagnostics["gamma_minus"] = rates.gamma_minus;
  r.diagnostics["gamma_z"] = rates.gamma_z;
  return r;
}

}  // namespace

EnsembleResult run_ensemble(const Config& cfg, std::size_t workers) {
  cfg.validate();
  const auto start = Clock::now();
  EnsembleResult r = cfg.run.method == Method::redfield || cfg.run.method == Method::unravel
                         ? run_master_equation(cfg)
                         : run_trajectories(cfg, workers);
  r.method = cfg.run.method;
  r.model = cfg.model;
  r.seed = cfg.run.seed;
  r.n_traj = cfg.run.method == Method::redfield ? 0 : cfg.run.n_traj;
  double worst = 0.0, naive = 0.0;
  const auto& p0 = r.estimator("P0");
  const auto& p1 = r.estimator("P1");
  const auto& ns = r.estimator("naive_sum");
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    worst = std::max(worst, std::abs(p0.mean[i] + p1.mean[i] - 1.0));
    naive = std::max(naive, std::abs(ns.mean[i] - 1.0));
  }
  r.diagnostics["max_population_sum_error"] = worst;
  r.diagnostics["max_naive_sum_deviation"] = naive;
  r.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

void write_csv(const EnsembleResult& r, std::ostream& out, double k_sigma, std::size_t effective_n) {
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf;
  };
  out << "# method=" << to_string(r.method) << ", model=" << to_string(r.model) << ", seed=" << r.seed
      << ", n_traj=" << r.n_traj << "\n";
  out << "t";
  for (const auto& e : r.estimators) out << ',' << e.name << ',' << e.name << "_stderr";
  out << "\n";
  const bool rescale = k_sigma > 0.0 && r.n_traj > 0;
  const std::size_t n_eff = effective_n > 0 ? effective_n : r.n_traj;
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    put(r.t[i]);
    for (const auto& e : r.estimators) {
      out << ',';
      put(e.mean[i]);
      out << ',';
      put(rescale ? rescale_error(e.sem[i], r.n_traj, n_eff, k_sigma) : e.sem[i]);
    }
    out << "\n";
  }
}

}  // namespace redmash
