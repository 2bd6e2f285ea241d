// Copyright 2026 The rrsgld Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rrsgld/model.hpp"

namespace rrsgld {

/// Streaming count / mean / second central moment (Welford), mergeable with
/// the Chan et al. pairwise update.
class RunningMoments {
 public:
  void add(double x) {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }

  void merge(const RunningMoments& other);

  std::size_t count() const { return count_; }
  double mean() const { return mean_; }
  /// Sum of squared deviations from the mean.
  double m2() const { return m2_; }
  /// Unbiased sample variance; throws if count < 2.
  double variance() const;
  /// Standard error of the mean, sqrt(variance / count).
  double standard_error() const;

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Coordinate-wise RunningMoments for d-dimensional samples.
class VectorMoments {
 public:
  VectorMoments() = default;
  explicit VectorMoments(std::size_t dim)
      : mean_(Vector::Zero(static_cast<Eigen::Index>(dim))),
        m2_(Vector::Zero(static_cast<Eigen::Index>(dim))) {}

  void add(const Vector& x);
  void merge(const VectorMoments& other);

  std::size_t count() const { return count_; }
  const Vector& mean() const { return mean_; }
  Vector variance() const;

 private:
  std::size_t count_ = 0;
  Vector mean_;
  Vector m2_;
};

/// One accumulator per slot, e.g. per iteration of a window or per phase
/// r = k mod R. Merging is slot-wise.
class SlottedMoments {
 public:
  SlottedMoments() = default;
  explicit SlottedMoments(std::size_t slots) : slots_(slots) {}

  void add(std::size_t slot, double x) { slots_.at(slot).add(x); }
  void merge(const SlottedMoments& other);

  std::size_t size() const { return slots_.size(); }
  const RunningMoments& operator[](std::size_t slot) const { return slots_[slot]; }
  /// All slots merged into one accumulator (in slot order).
  RunningMoments combined() const;

 private:
  std::vector<RunningMoments> slots_;
};

/// N * variance / sigma^2 - 1, with the variance taken from `moments`.
/// Throws std::invalid_argument for fewer than two samples.
double relative_variance_error(const RunningMoments& moments, double N, double sigma2);
/// Same, from a variance value.
double relative_variance_error(double variance, double N, double sigma2);

/// ||running_mean - reference|| / ||reference||; throws for a zero reference.
double relative_mean_error(const Vector& running_mean, const Vector& reference);

/// W2 between the empirical measures of two samples, integrating the squared
/// difference of their quantile functions over the merged breakpoints (equal
/// sizes reduce to pairing sorted samples). Throws for empty input.
double empirical_w2_1d(std::span<const double> a, std::span<const double> b);

/// Least-squares slope of log(y) against log(x). Needs >= 2 strictly
/// positive points.
double loglog_slope(std::span<const double> xs, std::span<const double> ys);

/// Sample autocorrelation at lags 0..max_lag (acf[0] == 1).
std::vector<double> autocorrelation(std::span<const double> series, std::size_t max_lag);

struct LagPeak {
  double acf_at_lag = 0.0;
  /// 2 / sqrt(length): the white-noise significance level.
  double threshold = 0.0;
  bool local_maximum = false;
  bool detected = false;
};

/// Whether the autocorrelation has a significant local maximum at `lag`.
LagPeak lag_peak(std::span<const double> series, std::size_t lag);

/// Variance of x along a single chain after discarding `burn_in` samples
/// (the time-average estimator, as opposed to the ensemble one).
double time_variance(std::span<const double> chain, std::size_t burn_in);

}  // namespace rrsgld
