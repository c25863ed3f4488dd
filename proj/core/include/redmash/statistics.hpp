#pragma once

#include <cstddef>
#include <span>

namespace redmash {

// Running mean and second central moment; partial accumulators merge
// exactly as if the samples had been added to one of them.
class Accumulator {
 public:
  void add(double x);
  void merge(const Accumulator& other);

  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  double variance() const;  // unbiased sample variance
  double stderr_of_mean() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Joint moments of two quantities, for ratio estimators.
class PairAccumulator {
 public:
  void add(double x, double y);
  void merge(const PairAccumulator& other);

  std::size_t count() const { return n_; }
  double mean_x() const { return mx_; }
  double mean_y() const { return my_; }
  double var_x() const;
  double var_y() const;
  double covariance() const;

  // mean(x) / mean(y) and its delta-method standard error.
  double ratio() const;
  double ratio_stderr() const;

 private:
  std::size_t n_ = 0;
  double mx_ = 0.0;
  double my_ = 0.0;
  double m2x_ = 0.0;
  double m2y_ = 0.0;
  double cxy_ = 0.0;
};

struct MeanAndError {
  double mean = 0.0;
  double stderr_of_mean = 0.0;
};

// Reduction of already-merged partial accumulators in index order.
MeanAndError statistics_reduce(std::span<const Accumulator> partials);

// Error bars rescaled to an effective trajectory count (k sigma scaled by
// sqrt(n_actual / n_effective)).
double rescale_error(double stderr_of_mean, std::size_t n_actual, std::size_t n_effective, double k_sigma);

}  // namespace redmash
