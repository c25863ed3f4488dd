#include "redmash/statistics.hpp"

#include <cmath>

#include "redmash/errors.hpp"

namespace redmash {

void Accumulator::add(double x) {
  ++n_;
  const double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

void Accumulator::merge(const Accumulator& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(o.n_);
  const double n = na + nb;
  const double d = o.mean_ - mean_;
  mean_ += d * nb / n;
  m2_ += o.m2_ + d * d * na * nb / n;
  n_ += o.n_;
}

double Accumulator::variance() const {
  return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0;
}

double Accumulator::stderr_of_mean() const {
  return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0;
}

void PairAccumulator::add(double x, double y) {
  ++n_;
  const double n = static_cast<double>(n_);
  const double dx = x - mx_;
  const double dy = y - my_;
  mx_ += dx / n;
  my_ += dy / n;
  m2x_ += dx * (x - mx_);
  m2y_ += dy * (y - my_);
  cxy_ += dx * (y - my_);
}

void PairAccumulator::merge(const PairAccumulator& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(o.n_);
  const double n = na + nb;
  const double dx = o.mx_ - mx_;
  const double dy = o.my_ - my_;
  mx_ += dx * nb / n;
  my_ += dy * nb / n;
  m2x_ += o.m2x_ + dx * dx * na * nb / n;
  m2y_ += o.m2y_ + dy * dy * na * nb / n;
  cxy_ += o.cxy_ + dx * dy * na * nb / n;
  n_ += o.n_;
}

double PairAccumulator::var_x() const { return n_ > 1 ? m2x_ / static_cast<double>(n_ - 1) : 0.0; }
double PairAccumulator::var_y() const { return n_ > 1 ? m2y_ / static_cast<double>(n_ - 1) : 0.0; }
double PairAccumulator::covariance() const {
  return n_ > 1 ? cxy_ / static_cast<double>(n_ - 1) : 0.0;
}

double PairAccumulator::ratio() const {
  if (my_ == 0.0) throw ZeroDenominator("ratio estimator with zero mean denominator");
  return mx_ / my_;
}

double PairAccumulator::ratio_stderr() const {
  if (n_ < 2) return 0.0;
  const double r = ratio();
  const double v = var_x() - 2.0 * r * covariance() + r * r * var_y();
  return std::sqrt(std::max(0.0, v) / static_cast<double>(n_)) / std::abs(my_);
}

MeanAndError statistics_reduce(std::span<const Accumulator> partials) {
  Accumulator total;
  for (const auto& p : partials) total.merge(p);
  return {total.mean(), total.stderr_of_mean()};
}

double rescale_error(double stderr_of_mean, std::size_t n_actual, std::size_t n_effective, double k_sigma) {
  if (n_effective == 0) throw Error("rescale_error: effective count must be positive");
  return k_sigma * stderr_of_mean *
         std::sqrt(static_cast<double>(n_actual) / static_cast<double>(n_effective));
}

}  // namespace redmash
