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
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "rrsgld/model.hpp"
#include "rrsgld/rng.hpp"

namespace rrsgld {

/// How minibatches are drawn.
///  - kRobbinsMonro: an independent without-replacement batch every step.
///  - kRandomReshuffling: shuffle once per epoch, then cycle through the R
///    disjoint batches of the resulting partition.
///  - kFullBatch: every step uses all N terms (ULA / GD).
enum class Policy { kRobbinsMonro, kRandomReshuffling, kFullBatch };

std::string_view to_string(Policy policy);
/// Accepts "rm", "rr" and "ula"/"full" (case-sensitive).
Policy parse_policy(std::string_view name);

/// m x n matrix of distinct indices in [0, N), stored row-major. Row i is the
/// i-th batch.
class OmegaMatrix {
 public:
  OmegaMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<const std::size_t> row(std::size_t i) const {
    return {entries_.data() + i * cols_, cols_};
  }
  std::span<const std::size_t> entries() const { return entries_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::size_t> entries_;
};

/// Uniform draw of m*n distinct indices from [0, N) without replacement,
/// arranged row-wise. Throws std::invalid_argument if m*n > N.
OmegaMatrix sample_omega(std::size_t m, std::size_t n, std::size_t N, Engine& rng);

/// Seeded stream of batches under a policy. Single-owner mutable state.
class BatchSchedule {
 public:
  BatchSchedule(Policy policy, std::size_t N, std::size_t n, std::uint64_t seed);

  /// Returns the batch for iteration k and advances k. The span stays valid
  /// until the next call.
  std::span<const std::size_t> next_batch();

  Policy policy() const { return policy_; }
  std::size_t dataset_size() const { return N_; }
  std::size_t batch_size() const { return n_; }
  /// R = N / n (floor for Robbins-Monro; exact for reshuffling).
  std::size_t epoch_length() const { return R_; }
  /// Number of batches handed out so far.
  std::size_t iteration() const { return k_; }
  /// Phase r = k mod R of the next batch.
  std::size_t phase() const { return k_ % R_; }
  std::uint64_t seed() const { return seed_; }

  /// {policy, N, n, seed, k}; from_json replays the stream up to k.
  nlohmann::json to_json() const;
  static BatchSchedule from_json(const nlohmann::json& j);

 private:
  void draw_prefix(std::size_t count);

  Policy policy_;
  std::size_t N_;
  std::size_t n_;
  std::size_t R_;
  std::uint64_t seed_;
  std::size_t k_ = 0;
  Engine rng_;
  std::vector<std::size_t> pool_;
};

/// (1/n) sum_{j in batch} grad g_j(x).
Vector stochastic_gradient(const FiniteSumModel& model, std::span<const std::size_t> batch,
                           const Vector& x);

/// Calls fn(span) once for every n-subset of [0, N) in lexicographic order.
template <class Fn>
void for_each_subset(std::size_t N, std::size_t n, Fn&& fn) {
  if (n > N) return;
  std::vector<std::size_t> idx(n);
  for (std::size_t j = 0; j < n; ++j) idx[j] = j;
  while (true) {
    fn(std::span<const std::size_t>(idx));
    std::size_t j = n;
    while (j > 0 && idx[j - 1] == N - n + (j - 1)) --j;
    if (j == 0) return;
    ++idx[j - 1];
    for (std::size_t t = j; t < n; ++t) idx[t] = idx[t - 1] + 1;
  }
}

double binomial(std::size_t N, std::size_t k);

struct SigmaStar {
  /// C_G = N^-1 sum_i E_q ||grad g_i - grad F||^2.
  double c_g = 0.0;
  /// sigma*^2 = ((N - n) / (n (N - 1))) C_G, i.e. ((R-1)/(N-1)) C_G for n | N.
  double sigma_star_sq = 0.0;
};

/// Variance of the stochastic gradient from the closed form, with the
/// expectation over q replaced by the average over `q_samples`.
SigmaStar sigma_star_exact(const FiniteSumModel& model, std::span<const Vector> q_samples,
                           std::size_t n);

/// The same quantity by brute force: the mean over all C(N, n) batches of
/// ||grad f_batch - grad F||^2, averaged over q_samples. Refuses more than
/// `max_batches` subsets.
double sigma_star_enumerated(const FiniteSumModel& model, std::span<const Vector> q_samples,
                             std::size_t n, double max_batches = 5e6);

struct MonteCarloEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Monte Carlo version of sigma_star_enumerated with `draws` random batches
/// per q-sample, for N too large to enumerate.
MonteCarloEstimate sigma_star_monte_carlo(const FiniteSumModel& model,
                                          std::span<const Vector> q_samples, std::size_t n,
                                          std::size_t draws, std::uint64_t seed);

/// Without-replacement variance of a size-n batch mean:
/// (N - n) / (n N (N - 1)) * sum_i (y_i - ybar)^2.
double batch_mean_variance(std::span<const double> y, std::size_t n);

struct CovarianceCheck {
  /// Covariance of two distinct batch means from the same reshuffled epoch.
  double covariance = 0.0;
  /// -V / (R - 1).
  double predicted = 0.0;
  /// Variance of a single batch mean (enumerated or sampled).
  double batch_variance = 0.0;
  /// batch_mean_variance(y, n).
  double batch_variance_closed_form = 0.0;
  bool enumerated = false;
  /// Monte Carlo standard errors (0 when enumerated).
  double covariance_se = 0.0;
  double batch_variance_se = 0.0;
};

/// Exact enumeration over ordered pairs of disjoint batches when N <= 12,
/// Monte Carlo with `mc_epochs` reshuffles otherwise. Requires n | N, R >= 2.
CovarianceCheck within_epoch_covariance(std::span<const double> y, std::size_t n,
                                        std::uint64_t seed = 0, std::size_t mc_epochs = 200000);

}  // namespace rrsgld
