#include "redmash/redfield.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "redmash/errors.hpp"

namespace redmash {

DrivenSchedule::DrivenSchedule(std::vector<double> times, std::vector<SchedulePoint> points)
    : times_(std::move(times)), points_(std::move(points)) {
  if (times_.size() < 2 || times_.size() != points_.size()) {
    throw Error("DrivenSchedule: need at least two points and matching lengths");
  }
  for (std::size_t i = 1; i < times_.size(); ++i) {
    if (!(times_[i] > times_[i - 1])) throw Error("DrivenSchedule: time grid must increase strictly");
  }
  for (const auto& p : points_) {
    if (p.gamma_plus < 0.0 || p.gamma_minus < 0.0 || p.gamma_z < 0.0) {
      throw Error("DrivenSchedule: negative rate");
    }
  }
}

SchedulePoint DrivenSchedule::at(double t) const {
  const double slack = 1e-12 * std::max(1.0, std::abs(t_end() - t_begin()));
  if (t < t_begin() - slack || t > t_end() + slack) {
    std::ostringstream msg;
    msg << "time " << t << " outside schedule [" << t_begin() << ", " << t_end() << "]";
    throw ScheduleGap(msg.str());
  }
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t hi = static_cast<std::size_t>(it - times_.begin());
  hi = std::clamp<std::size_t>(hi, 1, times_.size() - 1);
  const std::size_t lo = hi - 1;
  const double f = std::clamp((t - times_[lo]) / (times_[hi] - times_[lo]), 0.0, 1.0);
  const SchedulePoint& a = points_[lo];
  const SchedulePoint& b = points_[hi];
  auto lerp = [f](double x, double y) { return x + f * (y - x); };
  return {lerp(a.omega_ls, b.omega_ls), lerp(a.tau, b.tau), lerp(a.gamma_plus, b.gamma_plus),
          lerp(a.gamma_minus, b.gamma_minus), lerp(a.gamma_z, b.gamma_z)};
}

Eigen::Vector3d bloch_rhs(const SchedulePoint& c, const Eigen::Vector3d& r) {
  const double relax = c.gamma_plus + c.gamma_minus;
  const double dephase = 0.5 * relax + 2.0 * c.gamma_z;
  return {-c.omega_ls * r.y() + 2.0 * c.tau * r.z() - dephase * r.x(),
          c.omega_ls * r.x() - dephase * r.y(),
          -2.0 * c.tau * r.x() - (c.gamma_minus - c.gamma_plus) - relax * r.z()};
}

namespace {

using Coefficients = std::function<SchedulePoint(double)>;

Eigen::Vector3d rk4(const Coefficients& coeffs, double t, const Eigen::Vector3d& r, double h) {
  const SchedulePoint c0 = coeffs(t);
  const SchedulePoint cm = coeffs(t + 0.5 * h);
  const SchedulePoint c1 = coeffs(t + h);
  const Eigen::Vector3d k1 = bloch_rhs(c0, r);
  const Eigen::Vector3d k2 = bloch_rhs(cm, r + 0.5 * h * k1);
  const Eigen::Vector3d k3 = bloch_rhs(cm, r + 0.5 * h * k2);
  const Eigen::Vector3d k4 = bloch_rhs(c1, r + h * k3);
  return r + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double max_rate(const SchedulePoint& c) {
  return std::max({std::abs(c.omega_ls), 2.0 * std::abs(c.tau),
                   c.gamma_plus + c.gamma_minus + c.gamma_z});
}

std::vector<BlochState> integrate(const Coefficients& coeffs, double rate_bound, const BlochState& rho0,
                                  std::span<const double> tgrid, const BlochOptions& opts) {
  std::vector<BlochState> out;
  if (tgrid.empty()) return out;
  out.reserve(tgrid.size());
  Eigen::Vector3d r = rho0.vec();
  out.push_back(rho0);
  for (std::size_t i = 1; i < tgrid.size(); ++i) {
    const double t0 = tgrid[i - 1];
    const double span = tgrid[i] - t0;
    if (!(span > 0.0)) throw Error("Bloch propagation: time grid must increase strictly");
    double h = span;
    if (rate_bound > 0.0) h = std::min(h, 1e-3 / rate_bound);
    if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
    const auto n = static_cast<std::size_t>(std::ceil(span / h - 1e-9));
    h = span / static_cast<double>(n);
    // Step-doubling estimate on the first sub-step of each interval.
    {
      const Eigen::Vector3d full = rk4(coeffs, t0, r, h);
      const Eigen::Vector3d half = rk4(coeffs, t0 + 0.5 * h, rk4(coeffs, t0, r, 0.5 * h), 0.5 * h);
      const double err = (full - half).norm() * 16.0 / 15.0;
      if (err > opts.error_per_time * h) {
        std::ostringstream msg;
        msg << "Bloch step " << h << " has local error " << err << " at t = " << t0;
        throw StepTooLarge(msg.str());
      }
    }
    double t = t0;
    for (std::size_t k = 0; k < n; ++k) {
      r = rk4(coeffs, t, r, h);
      t = t0 + static_cast<double>(k + 1) * h;
    }
    out.push_back(BlochState::from(r));
  }
  return out;
}

}  // namespace

std::vector<BlochState> propagate_static(const SchedulePoint& coeffs, const BlochState& rho0,
                                         std::span<const double> tgrid, const BlochOptions& opts) {
  return integrate([&](double) { return coeffs; }, max_rate(coeffs), rho0, tgrid, opts);
}

std::vector<BlochState> propagate_static(const RateSet& rates, const BlochState& rho0,
                                         std::span<const double> tgrid, const BlochOptions& opts) {
  return propagate_static(SchedulePoint::from_rates(rates), rho0, tgrid, opts);
}

std::vector<BlochState> propagate_driven(const DrivenSchedule& schedule, const BlochState& rho0,
                                         std::span<const double> tgrid, const BlochOptions& opts) {
  if (!tgrid.empty()) {
    schedule.at(tgrid.front());
    schedule.at(tgrid.back());
  }
  double bound = 0.0;
  for (const auto& p : schedule.points()) bound = std::max(bound, max_rate(p));
  return integrate([&](double t) { return schedule.at(t); }, bound, rho0, tgrid, opts);
}

BlochState redfield_equilibrium(const RateSet& rates) {
  const double total = rates.gamma_minus + rates.gamma_plus;
  if (total == 0.0) throw ZeroDenominator("equilibrium undefined without population relaxation");
  return {0.0, 0.0, -(rates.gamma_minus - rates.gamma_plus) / total};
}

std::vector<double> uniform_grid(double t0, double t1, std::size_t n_points) {
  std::vector<double> g(n_points);
  if (n_points == 1) {
    g[0] = t0;
    return g;
  }
  for (std::size_t i = 0; i < n_points; ++i) {
    g[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n_points - 1);
  }
  return g;
}

}  // namespace redmash
