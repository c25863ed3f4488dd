#pragma once

#include <span>
#include <vector>

#include "redmash/bath.hpp"
#include "redmash/two_level.hpp"

namespace redmash {

// Instantaneous coefficients of the driven Bloch equations.
struct SchedulePoint {
  double omega_ls = 0.0;
  double tau = 0.0;  // time-derivative coupling <upper| d/dt |lower>
  double gamma_plus = 0.0;
  double gamma_minus = 0.0;
  double gamma_z = 0.0;

  static SchedulePoint from_rates(const RateSet& r, double tau = 0.0) {
    return {r.omega_ls, tau, r.gamma_plus, r.gamma_minus, r.gamma_z};
  }
};

// Tabulated (omega_ls, tau, rates) on a strictly increasing time grid,
// linearly interpolated in between.
class DrivenSchedule {
 public:
  DrivenSchedule(std::vector<double> times, std::vector<SchedulePoint> points);

  SchedulePoint at(double t) const;
  double t_begin() const { return times_.front(); }
  double t_end() const { return times_.back(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<SchedulePoint>& points() const { return points_; }

 private:
  std::vector<double> times_;
  std::vector<SchedulePoint> points_;
};

// Right-hand side of the Bloch equations in the adiabatic frame.
Eigen::Vector3d bloch_rhs(const SchedulePoint& c, const Eigen::Vector3d& r);

struct BlochOptions {
  // Upper bound on the internal step; 0 selects min(grid spacing, 1e-3 / rate).
  double max_step = 0.0;
  // Local error per unit time above which StepTooLarge is raised.
  double error_per_time = 1e-8;
};

std::vector<BlochState> propagate_static(const RateSet& rates, const BlochState& rho0,
                                         std::span<const double> tgrid, const BlochOptions& opts = {});
std::vector<BlochState> propagate_static(const SchedulePoint& coeffs, const BlochState& rho0,
                                         std::span<const double> tgrid, const BlochOptions& opts = {});

std::vector<BlochState> propagate_driven(const DrivenSchedule& schedule, const BlochState& rho0,
                                         std::span<const double> tgrid, const BlochOptions& opts = {});

// Fixed point of the undriven equations: (0, 0, -(g- - g+)/(g- + g+)).
BlochState redfield_equilibrium(const RateSet& rates);

std::vector<double> uniform_grid(double t0, double t1, std::size_t n_points);

}  // namespace redmash
