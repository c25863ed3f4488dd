#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace redmash {

struct CheckResult {
  std::string name;
  bool passed = false;
  // Gated numbers first, then any extra diagnostics.
  std::string detail;
  double seconds = 0.0;
};

struct ValidationOptions {
  std::uint64_t seed = 20240611;
  // Multiplies the trajectory counts of the stochastic checks.
  double effort = 1.0;
};

CheckResult check_detailed_balance(const ValidationOptions& opts = {});
CheckResult check_master_equation(const ValidationOptions& opts = {});
CheckResult check_unravelling(const ValidationOptions& opts = {});
CheckResult check_hybrid_equivalence(const ValidationOptions& opts = {});
CheckResult check_reduction(const ValidationOptions& opts = {});
CheckResult check_equilibrium(const ValidationOptions& opts = {});
CheckResult check_population_identity(const ValidationOptions& opts = {});
CheckResult check_mash_mechanics(const ValidationOptions& opts = {});
// Four results: rate profile, MASH population drops, emission peaks and
// emission bookkeeping.
std::vector<CheckResult> check_cavity(const ValidationOptions& opts = {});
CheckResult check_weighting_theorem(const ValidationOptions& opts = {});

// static, driven, equilibrium, reduction, mechanics, cavity.
std::vector<std::string> validation_suites();
std::vector<CheckResult> run_validation_suite(const std::string& suite, const ValidationOptions& opts = {});

// Indices of local maxima ranked by prominence, most prominent first.
std::vector<std::size_t> find_peaks(std::span<const double> y);
std::vector<double> moving_average(std::span<const double> y, std::size_t half_width);

}  // namespace redmash
