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

#include "rrsgld/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rrsgld {

void RunningMoments::merge(const RunningMoments& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  const double delta = other.mean_ - mean_;
  mean_ += delta * nb / n;
  m2_ += other.m2_ + delta * delta * na * nb / n;
  count_ += other.count_;
}

double RunningMoments::variance() const {
  if (count_ < 2) throw std::invalid_argument("variance needs at least two samples");
  return m2_ / static_cast<double>(count_ - 1);
}

double RunningMoments::standard_error() const {
  return std::sqrt(variance() / static_cast<double>(count_));
}

void VectorMoments::add(const Vector& x) {
  if (count_ == 0 && mean_.size() == 0) {
    mean_ = Vector::Zero(x.size());
    m2_ = Vector::Zero(x.size());
  }
  ++count_;
  const Vector delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_.array() += delta.array() * (x - mean_).array();
}

void VectorMoments::merge(const VectorMoments& other) {
  if (other.count_ == 0) return;
  if (count_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(count_);
  const double nb = static_cast<double>(other.count_);
  const double n = na + nb;
  const Vector delta = other.mean_ - mean_;
  mean_ += delta * (nb / n);
  m2_ += other.m2_ + delta.cwiseProduct(delta) * (na * nb / n);
  count_ += other.count_;
}

Vector VectorMoments::variance() const {
  if (count_ < 2) throw std::invalid_argument("variance needs at least two samples");
  return m2_ / static_cast<double>(count_ - 1);
}

void SlottedMoments::merge(const SlottedMoments& other) {
  if (slots_.empty()) {
    slots_ = other.slots_;
    return;
  }
  if (other.slots_.size() != slots_.size()) {
    throw std::invalid_argument("SlottedMoments: slot count mismatch");
  }
  for (std::size_t s = 0; s < slots_.size(); ++s) slots_[s].merge(other.slots_[s]);
}

RunningMoments SlottedMoments::combined() const {
  RunningMoments all;
  for (const auto& s : slots_) all.merge(s);
  return all;
}

double relative_variance_error(const RunningMoments& moments, double N, double sigma2) {
  if (moments.count() < 2) {
    throw std::invalid_argument("relative_variance_error: degenerate ensemble");
  }
  return relative_variance_error(moments.variance(), N, sigma2);
}

double relative_variance_error(double variance, double N, double sigma2) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("relative_variance_error: sigma^2 <= 0");
  return N * variance / sigma2 - 1.0;
}

double relative_mean_error(const Vector& running_mean, const Vector& reference) {
  const double ref = reference.norm();
  if (!(ref > 0.0)) throw std::invalid_argument("relative_mean_error: zero-norm reference");
  if (running_mean.size() != reference.size()) {
    throw std::invalid_argument("relative_mean_error: dimension mismatch");
  }
  return (running_mean - reference).norm() / ref;
}

double empirical_w2_1d(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("empirical_w2_1d: empty sample set");
  std::vector<double> sa(a.begin(), a.end());
  std::vector<double> sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  const double na = static_cast<double>(sa.size());
  const double nb = static_cast<double>(sb.size());
  if (sa.size() == sb.size()) {
    double s = 0.0;
    for (std::size_t i = 0; i < sa.size(); ++i) s += (sa[i] - sb[i]) * (sa[i] - sb[i]);
    return std::sqrt(s / na);
  }
  // Both quantile functions are piecewise constant; walk the union of their
  // breakpoints i/na and j/nb. Compare i*nb with j*na to stay in integers.
  std::size_t i = 0, j = 0;
  double s = 0.0;
  double u = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double next_a = static_cast<double>(i + 1) / na;
    const double next_b = static_cast<double>(j + 1) / nb;
    const double diff = sa[i] - sb[j];
    const auto lhs = (i + 1) * sb.size();
    const auto rhs = (j + 1) * sa.size();
    const double next = lhs <= rhs ? next_a : next_b;
    s += diff * diff * (next - u);
    u = next;
    if (lhs <= rhs) ++i;
    if (rhs <= lhs) ++j;
  }
  return std::sqrt(s);
}

double loglog_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("loglog_slope: size mismatch");
  if (xs.size() < 2) throw std::invalid_argument("loglog_slope: need at least two points");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
      throw std::invalid_argument("loglog_slope: values must be strictly positive");
    }
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  const double n = static_cast<double>(xs.size());
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = std::log(xs[i]) - mx;
    sxy += dx * (std::log(ys[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw std::invalid_argument("loglog_slope: all x values coincide");
  return sxy / sxx;
}

std::vector<double> autocorrelation(std::span<const double> series, std::size_t max_lag) {
  const std::size_t n = series.size();
  if (n < 2 || max_lag >= n) throw std::invalid_argument("autocorrelation: series too short");
  const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(n);
  double c0 = 0.0;
  for (double v : series) c0 += (v - mean) * (v - mean);
  std::vector<double> acf(max_lag + 1, 0.0);
  if (c0 == 0.0) {
    acf[0] = 1.0;
    return acf;
  }
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    double c = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) c += (series[t] - mean) * (series[t + lag] - mean);
    acf[lag] = c / c0;
  }
  return acf;
}

LagPeak lag_peak(std::span<const double> series, std::size_t lag) {
  if (lag < 2) throw std::invalid_argument("lag_peak: lag must be at least 2");
  const auto acf = autocorrelation(series, lag + 1);
  LagPeak p;
  p.acf_at_lag = acf[lag];
  p.threshold = 2.0 / std::sqrt(static_cast<double>(series.size()));
  p.local_maximum = acf[lag] > acf[lag - 1] && acf[lag] > acf[lag + 1];
  p.detected = p.local_maximum && p.acf_at_lag > p.threshold;
  return p;
}

double time_variance(std::span<const double> chain, std::size_t burn_in) {
  if (chain.size() < burn_in + 2) throw std::invalid_argument("time_variance: chain too short");
  RunningMoments m;
  for (std::size_t k = burn_in; k < chain.size(); ++k) m.add(chain[k]);
  return m.variance();
}

}  // namespace rrsgld
