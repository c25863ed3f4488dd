#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "redmash/bath.hpp"
#include "redmash/config.hpp"
#include "redmash/ensemble.hpp"
#include "redmash/errors.hpp"
#include "redmash/models.hpp"
#include "redmash/units.hpp"
#include "redmash/validation.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidationFailed = 1;
constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

redmash::Config load_or_default(const std::string& path) {
  return path.empty() ? redmash::Config{} : redmash::load_config(path);
}

int cmd_run(const std::string& config_path, const std::optional<std::string>& method,
            const std::optional<std::size_t>& n_traj, const std::optional<double>& dt,
            const std::optional<double>& t_max, const std::optional<std::uint64_t>& seed,
            const std::optional<std::size_t>& n_output, const std::string& output, std::size_t workers,
            double k_sigma, std::size_t effective_n) {
  redmash::Config cfg = load_or_default(config_path);
  if (method) cfg.run.method = redmash::parse_method(*method);
  if (n_traj) cfg.run.n_traj = *n_traj;
  if (dt) cfg.run.dt = *dt;
  if (t_max) cfg.run.t_max = *t_max;
  if (seed) cfg.run.seed = *seed;
  if (n_output) cfg.run.n_output = *n_output;
  cfg.validate();
  const redmash::EnsembleResult result = redmash::run_ensemble(cfg, workers);
  if (output.empty() || output == "-") {
    redmash::write_csv(result, std::cout, k_sigma, effective_n);
  } else {
    std::ofstream out(output);
    if (!out) throw redmash::Error("cannot write " + output);
    redmash::write_csv(result, out, k_sigma, effective_n);
  }
  std::cerr << "method=" << redmash::to_string(result.method) << " model=" << redmash::to_string(result.model)
            << " n_traj=" << result.n_traj << " dt=" << result.dt << " wall=" << result.wall_seconds << "s\n";
  for (const auto& [name, value] : result.diagnostics) std::cerr << "  " << name << " = " << value << "\n";
  return kOk;
}

int cmd_validate(const std::string& suite, double effort, std::uint64_t seed) {
  redmash::ValidationOptions opts;
  opts.effort = effort;
  opts.seed = seed;
  std::vector<std::string> suites = suite == "all" ? redmash::validation_suites() : std::vector<std::string>{suite};
  bool ok = true;
  for (const auto& s : suites) {
    for (const auto& r : redmash::run_validation_suite(s, opts)) {
      std::cout << (r.passed ? "PASS" : "FAIL") << "  [" << s << "] " << r.name << " (" << r.seconds << " s): "
                << r.detail << "\n";
      ok = ok && r.passed;
    }
  }
  return ok ? kOk : kValidationFailed;
}

int cmd_rates(const std::string& config_path, double qmin, double qmax, std::size_t n) {
  using namespace redmash;
  const Config cfg = load_or_default(config_path);
  if (n < 2) throw ConfigInvalid("--n must be at least 2");
  std::cout << "# model=" << to_string(cfg.model) << "\n";
  if (cfg.model == ModelKind::cavity) {
    const TrajectorySetup setup = cavity_setup(cfg.cavity, Method::hybrid);
    const double to_x = units::angstrom * std::sqrt(cfg.cavity.mass());
    std::cout << "q_angstrom,gap_ev,omega_ls_ev,gamma_minus_au,nac_per_angstrom\n";
    AdiabaticFrame prev;
    for (std::size_t i = 0; i < n; ++i) {
      const double q = qmin + (qmax - qmin) * static_cast<double>(i) / static_cast<double>(n - 1);
      Vec x(1);
      x << q * to_x;
      const AdiabaticFrame f = adiabatize(*setup.model, x, i == 0 ? nullptr : &prev);
      prev = f;
      const RateSet r = setup.dissipator->rates(f);
      std::cout << number(q) << ',' << number(f.gap / units::ev) << ',' << number(r.omega_ls / units::ev) << ','
                << number(r.gamma_minus) << ',' << number(f.nac[0] * to_x) << "\n";
    }
  } else {
    // q shifts the diabatic bias, the collective coordinate of the baths.
    const SpinBosonConfig& sb = cfg.spin_boson;
    const DebyeCorrelation classical(sb.classical_bath());
    const DebyeCorrelation quantum(sb.quantum_bath());
    const BathCorrelation* baths[] = {&classical, &quantum};
    std::cout << "q,gap,omega_ls,gamma_plus,gamma_minus,gamma_z,nac\n";
    for (std::size_t i = 0; i < n; ++i) {
      const double q = qmin + (qmax - qmin) * static_cast<double>(i) / static_cast<double>(n - 1);
      Vec one(1), slope(1);
      one << 1.0;
      slope << 1.0;
      const LinearCouplingModel model(sb.eps, sb.delta, one, slope);
      Vec x(1);
      x << q;
      const AdiabaticFrame f = adiabatize(model, x);
      const RateSet r = redfield_rates(f, expand_diabatic_operator(f, diabatic_sigma_z()), baths);
      std::cout << number(q) << ',' << number(f.gap) << ',' << number(r.omega_ls) << ',' << number(r.gamma_plus)
                << ',' << number(r.gamma_minus) << ',' << number(r.gamma_z) << ',' << number(f.nac[0]) << "\n";
    }
  }
  return kOk;
}

int cmd_discretize(double lambda, double omega_c, std::size_t n) {
  const redmash::DiscretizedBath d = redmash::discretize_debye({lambda, omega_c, 1.0}, n);
  std::cout << "omega,c\n";
  for (Eigen::Index j = 0; j < d.omegas.size(); ++j) {
    std::cout << number(d.omegas[j]) << ',' << number(d.couplings[j]) << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid Redfield/MASH trajectory simulations of dissipative two-level systems"};
  app.require_subcommand(1);

  std::string config_path, output;
  std::optional<std::string> method;
  std::optional<std::size_t> n_traj, n_output;
  std::optional<double> dt, t_max;
  std::optional<std::uint64_t> seed;
  std::size_t workers = 0, effective_n = 0;
  double k_sigma = 0.0;
  auto* run = app.add_subcommand("run", "run an ensemble and write estimators as CSV");
  run->add_option("--config", config_path, "JSON config file (defaults when omitted)");
  run->add_option("--method", method, "mash, redfield, unravel or hybrid");
  run->add_option("--trajectories", n_traj, "number of trajectories");
  run->add_option("--dt", dt, "time step (1/delta for spin-boson, a.u. for cavity)");
  run->add_option("--t-max", t_max, "final time, same units as --dt");
  run->add_option("--seed", seed, "random seed");
  run->add_option("--n-output", n_output, "number of output times");
  run->add_option("--output", output, "CSV file, '-' or empty for stdout");
  run->add_option("--workers", workers, "worker threads (REDMASH_WORKERS overrides)");
  run->add_option("--error-bars", k_sigma, "report k-sigma bars instead of standard errors");
  run->add_option("--effective-n", effective_n, "trajectory count the error bars are rescaled to");

  std::string suite = "all";
  double effort = 1.0;
  std::uint64_t vseed = redmash::ValidationOptions{}.seed;
  auto* validate = app.add_subcommand("validate", "run oracle suites; exit 1 on failure");
  validate->add_option("--suite", suite, "static, driven, equilibrium, reduction, mechanics, cavity or all")
      ->check(CLI::IsMember({"all", "static", "driven", "equilibrium", "reduction", "mechanics", "cavity"}));
  validate->add_option("--effort", effort, "scales trajectory counts")->check(CLI::PositiveNumber);
  validate->add_option("--seed", vseed, "random seed");

  double qmin = -2.0, qmax = 1.5;
  std::size_t n_points = 351;
  auto* rates = app.add_subcommand("rates", "rate, Lamb-shifted gap and NAC profiles along q");
  rates->add_option("--config", config_path, "JSON config file");
  rates->add_option("--qmin", qmin, "first q (angstrom for cavity, bias shift for spin-boson)");
  rates->add_option("--qmax", qmax, "last q");
  rates->add_option("--n", n_points, "number of points");

  double lambda = 0.5, omega_c = 1.0;
  std::size_t n_modes = 200;
  auto* disc = app.add_subcommand("discretize", "Debye bath modes and couplings");
  disc->add_option("--lambda", lambda, "reorganisation energy");
  disc->add_option("--omega", omega_c, "cutoff frequency");
  disc->add_option("--n", n_modes, "number of modes");

  auto* defaults = app.add_subcommand("defaults", "print the default config with every field");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*run) {
      return cmd_run(config_path, method, n_traj, dt, t_max, seed, n_output, output, workers, k_sigma, effective_n);
    }
    if (*validate) return cmd_validate(suite, effort, vseed);
    if (*rates) return cmd_rates(config_path, qmin, qmax, n_points);
    if (*disc) return cmd_discretize(lambda, omega_c, n_modes);
    if (*defaults) {
      std::cout << redmash::dump_config(redmash::Config{});
      return kOk;
    }
  } catch (const redmash::ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const redmash::UnknownUnit& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kOk;
}
