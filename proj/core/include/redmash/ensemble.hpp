#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "redmash/config.hpp"

namespace redmash {

struct EstimatorSeries {
  std::string name;
  std::vector<double> mean;
  std::vector<double> sem;
};

struct EnsembleResult {
  Method method = Method::mash;
  ModelKind model = ModelKind::spin_boson;
  std::uint64_t seed = 0;
  std::size_t n_traj = 0;
  double dt = 0.0;
  std::vector<double> t;
  std::vector<EstimatorSeries> estimators;
  // Scalar side results (hop counts, identity checks, emission totals, ...).
  std::map<std::string, double> diagnostics;
  double wall_seconds = 0.0;

  const EstimatorSeries& estimator(const std::string& name) const;
  bool has_estimator(const std::string& name) const;
};

// Output step indices k_i = round(i n_steps / (n_out - 1)) with
// n_out = min(requested, n_steps + 1).
std::vector<std::size_t> output_steps(std::size_t n_steps, std::size_t requested);

// REDMASH_WORKERS overrides `requested`; 0 means one per hardware thread.
std::size_t worker_count(std::size_t requested = 0);

// Trajectories are processed in fixed-size chunks whose partial statistics
// are merged in chunk order, so the result does not depend on `workers`.
EnsembleResult run_ensemble(const Config& cfg, std::size_t workers = 0);

// Header `# method=..., model=..., seed=..., n_traj=...`, then
// `t,<name>,<name>_stderr,...` with every value printed round-trip exact.
// With k_sigma > 0 the stderr columns hold k_sigma * sem rescaled to
// `effective_n` trajectories instead.
void write_csv(const EnsembleResult& result, std::ostream& out, double k_sigma = 0.0,
               std::size_t effective_n = 0);

}  // namespace redmash
