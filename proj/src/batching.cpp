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

#include "rrsgld/batching.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace rrsgld {
namespace {

// Moves a uniform ordered selection of `count` elements of `pool` to its
// front (partial Fisher-Yates). Uniform whatever the current order of pool.
void partial_shuffle(std::vector<std::size_t>& pool, std::size_t count, Engine& rng) {
  const std::size_t N = pool.size();
  for (std::size_t j = 0; j < count; ++j) {
    std::uniform_int_distribution<std::size_t> pick(j, N - 1);
    std::swap(pool[j], pool[pick(rng)]);
  }
}

}  // namespace

std::string_view to_string(Policy policy) {
  switch (policy) {
    case Policy::kRobbinsMonro:
      return "rm";
    case Policy::kRandomReshuffling:
      return "rr";
    case Policy::kFullBatch:
      return "ula";
  }
  return "?";
}

Policy parse_policy(std::string_view name) {
  if (name == "rm") return Policy::kRobbinsMonro;
  if (name == "rr") return Policy::kRandomReshuffling;
  if (name == "ula" || name == "full") return Policy::kFullBatch;
  throw std::invalid_argument("unknown batching policy '" + std::string(name) +
                              "' (expected rm, rr or ula)");
}

OmegaMatrix::OmegaMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
  if (entries_.size() != rows_ * cols_) throw std::invalid_argument("OmegaMatrix: size mismatch");
}

OmegaMatrix sample_omega(std::size_t m, std::size_t n, std::size_t N, Engine& rng) {
  if (m == 0 || n == 0) throw std::invalid_argument("sample_omega: m and n must be positive");
  if (m * n > N) {
    throw std::invalid_argument("sample_omega: m*n = " + std::to_string(m * n) +
                                " exceeds N = " + std::to_string(N));
  }
  std::vector<std::size_t> pool(N);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  partial_shuffle(pool, m * n, rng);
  pool.resize(m * n);
  return OmegaMatrix(m, n, std::move(pool));
}

// ---------------------------------------------------------------------------

BatchSchedule::BatchSchedule(Policy policy, std::size_t N, std::size_t n, std::uint64_t seed)
    : policy_(policy), N_(N), n_(policy == Policy::kFullBatch ? N : n), seed_(seed), rng_(seed) {
  if (N_ == 0) throw std::invalid_argument("BatchSchedule: empty dataset");
  if (n_ == 0 || n_ > N_) {
    throw std::invalid_argument("BatchSchedule: batch size " + std::to_string(n_) +
                                " not in [1, " + std::to_string(N_) + "]");
  }
  if (policy_ == Policy::kRandomReshuffling && N_ % n_ != 0) {
    throw std::invalid_argument("BatchSchedule: reshuffling needs n | N (N = " +
                                std::to_string(N_) + ", n = " + std::to_string(n_) + ")");
  }
  R_ = N_ / n_;
  pool_.resize(N_);
  std::iota(pool_.begin(), pool_.end(), std::size_t{0});
}

std::span<const std::size_t> BatchSchedule::next_batch() {
  std::span<const std::size_t> out;
  switch (policy_) {
    case Policy::kFullBatch:
      out = pool_;
      break;
    case Policy::kRobbinsMonro:
      partial_shuffle(pool_, n_, rng_);
      out = std::span<const std::size_t>(pool_.data(), n_);
      break;
    case Policy::kRandomReshuffling: {
      const std::size_t r = k_ % R_;
      // Omega for the epoch is the shuffled pool; the full permutation is
      // drawn when the epoch starts (n*R == N).
      if (r == 0) partial_shuffle(pool_, N_, rng_);
      out = std::span<const std::size_t>(pool_.data() + r * n_, n_);
      break;
    }
  }
  ++k_;
  return out;
}

void BatchSchedule::draw_prefix(std::size_t count) {
  for (std::size_t i = 0; i < count; ++i) next_batch();
}

nlohmann::json BatchSchedule::to_json() const {
  return {{"policy", std::string(to_string(policy_))},
          {"N", N_},
          {"n", n_},
          {"seed", seed_},
          {"k", k_}};
}

BatchSchedule BatchSchedule::from_json(const nlohmann::json& j) {
  BatchSchedule s(parse_policy(j.at("policy").get<std::string>()), j.at("N").get<std::size_t>(),
                  j.at("n").get<std::size_t>(), j.at("seed").get<std::uint64_t>());
  s.draw_prefix(j.at("k").get<std::size_t>());
  return s;
}

Vector stochastic_gradient(const FiniteSumModel& model, std::span<const std::size_t> batch,
                           const Vector& x) {
  for (std::size_t i : batch) {
    if (i >= model.size()) throw std::out_of_range("batch index out of range");
  }
  return model.batch_gradient(batch, x);
}

double binomial(std::size_t N, std::size_t k) {
  if (k > N) return 0.0;
  k = std::min(k, N - k);
  double b = 1.0;
  for (std::size_t j = 1; j <= k; ++j) {
    b *= static_cast<double>(N - k + j) / static_cast<double>(j);
  }
  return std::round(b);
}

// ---------------------------------------------------------------------------

SigmaStar sigma_star_exact(const FiniteSumModel& model, std::span<const Vector> q_samples,
                           std::size_t n) {
  if (q_samples.empty()) throw std::invalid_argument("sigma_star_exact: no q samples");
  const std::size_t N = model.size();
  if (n == 0 || n > N) throw std::invalid_argument("sigma_star_exact: batch size out of range");
  double c_g = 0.0;
  for (const Vector& x : q_samples) {
    const Vector full = model.gradient(x);
    double s = 0.0;
    for (std::size_t i = 0; i < N; ++i) s += (model.term_gradient(i, x) - full).squaredNorm();
    c_g += s / static_cast<double>(N);
  }
  c_g /= static_cast<double>(q_samples.size());
  SigmaStar out;
  out.c_g = c_g;
  out.sigma_star_sq = N == 1 ? 0.0
                             : static_cast<double>(N - n) /
                                   (static_cast<double>(n) * static_cast<double>(N - 1)) * c_g;
  return out;
}

double sigma_star_enumerated(const FiniteSumModel& model, std::span<const Vector> q_samples,
                             std::size_t n, double max_batches) {
  if (q_samples.empty()) throw std::invalid_argument("sigma_star_enumerated: no q samples");
  const std::size_t N = model.size();
  if (n == 0 || n > N) {
    throw std::invalid_argument("sigma_star_enumerated: batch size out of range");
  }
  if (binomial(N, n) > max_batches) {
    throw std::invalid_argument("sigma_star_enumerated: too many batches to enumerate");
  }
  double total = 0.0;
  for (const Vector& x : q_samples) {
    const Vector full = model.gradient(x);
    double s = 0.0;
    double count = 0.0;
    for_each_subset(N, n, [&](std::span<const std::size_t> batch) {
      s += (model.batch_gradient(batch, x) - full).squaredNorm();
      count += 1.0;
    });
    total += s / count;
  }
  return total / static_cast<double>(q_samples.size());
}

MonteCarloEstimate sigma_star_monte_carlo(const FiniteSumModel& model,
                                          std::span<const Vector> q_samples, std::size_t n,
                                          std::size_t draws, std::uint64_t seed) {
  if (q_samples.empty()) throw std::invalid_argument("sigma_star_monte_carlo: no q samples");
  if (draws < 2) throw std::invalid_argument("sigma_star_monte_carlo: need >= 2 draws");
  const std::size_t N = model.size();
  if (n == 0 || n > N) {
    throw std::invalid_argument("sigma_star_monte_carlo: batch size out of range");
  }
  Engine rng(seed);
  std::vector<std::size_t> pool(N);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  double mean = 0.0, m2 = 0.0;
  std::size_t count = 0;
  for (const Vector& x : q_samples) {
    const Vector full = model.gradient(x);
    for (std::size_t t = 0; t < draws; ++t) {
      partial_shuffle(pool, n, rng);
      const double v =
          (model.batch_gradient(std::span<const std::size_t>(pool.data(), n), x) - full)
              .squaredNorm();
      ++count;
      const double delta = v - mean;
      mean += delta / static_cast<double>(count);
      m2 += delta * (v - mean);
    }
  }
  const double c = static_cast<double>(count);
  return {mean, std::sqrt(m2 / (c - 1.0) / c)};
}

double batch_mean_variance(std::span<const double> y, std::size_t n) {
  const std::size_t N = y.size();
  if (N == 0 || n == 0 || n > N) throw std::invalid_argument("batch_mean_variance: bad sizes");
  if (N == 1) return 0.0;
  const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(N);
  double ss = 0.0;
  for (double v : y) ss += (v - mean) * (v - mean);
  return static_cast<double>(N - n) /
         (static_cast<double>(n) * static_cast<double>(N) * static_cast<double>(N - 1)) * ss;
}

CovarianceCheck within_epoch_covariance(std::span<const double> y, std::size_t n,
                                        std::uint64_t seed, std::size_t mc_epochs) {
  const std::size_t N = y.size();
  if (n == 0 || N == 0 || N % n != 0) {
    throw std::invalid_argument("within_epoch_covariance: n must divide N");
  }
  const std::size_t R = N / n;
  if (R < 2) throw std::invalid_argument("within_epoch_covariance: need R >= 2");

  const double ybar = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(N);
  auto batch_mean = [&](std::span<const std::size_t> b) {
    double s = 0.0;
    for (std::size_t i : b) s += y[i];
    return s / static_cast<double>(b.size());
  };

  CovarianceCheck out;
  out.batch_variance_closed_form = batch_mean_variance(y, n);
  out.predicted = -out.batch_variance_closed_form / static_cast<double>(R - 1);

  if (N <= 12) {
    out.enumerated = true;
    // The first two rows of a uniformly shuffled partition are a uniform
    // ordered pair of disjoint n-subsets.
    double cov = 0.0;
    double pairs = 0.0;
    double var = 0.0;
    double singles = 0.0;
    std::vector<std::size_t> rest;
    for_each_subset(N, n, [&](std::span<const std::size_t> first) {
      const double d1 = batch_mean(first) - ybar;
      var += d1 * d1;
      singles += 1.0;
      rest.clear();
      for (std::size_t i = 0, j = 0; i < N; ++i) {
        if (j < first.size() && first[j] == i) {
          ++j;
        } else {
          rest.push_back(i);
        }
      }
      for_each_subset(rest.size(), n, [&](std::span<const std::size_t> second_local) {
        double s = 0.0;
        for (std::size_t t : second_local) s += y[rest[t]];
        cov += d1 * (s / static_cast<double>(n) - ybar);
        pairs += 1.0;
      });
    });
    out.covariance = cov / pairs;
    out.batch_variance = var / singles;
    return out;
  }

  if (mc_epochs < 2) throw std::invalid_argument("within_epoch_covariance: need >= 2 MC epochs");
  Engine rng(seed);
  std::vector<std::size_t> pool(N);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  double c_mean = 0.0, c_m2 = 0.0, v_mean = 0.0, v_m2 = 0.0;
  for (std::size_t e = 0; e < mc_epochs; ++e) {
    partial_shuffle(pool, 2 * n, rng);
    const double d1 = batch_mean({pool.data(), n}) - ybar;
    const double d2 = batch_mean({pool.data() + n, n}) - ybar;
    const double c = d1 * d2;
    const double v = d1 * d1;
    const double k = static_cast<double>(e + 1);
    const double dc = c - c_mean;
    c_mean += dc / k;
    c_m2 += dc * (c - c_mean);
    const double dv = v - v_mean;
    v_mean += dv / k;
    v_m2 += dv * (v - v_mean);
  }
  const double M = static_cast<double>(mc_epochs);
  out.covariance = c_mean;
  out.batch_variance = v_mean;
  out.covariance_se = std::sqrt(c_m2 / (M - 1.0) / M);
  out.batch_variance_se = std::sqrt(v_m2 / (M - 1.0) / M);
  return out;
}

}  // namespace rrsgld
