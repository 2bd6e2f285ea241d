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
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rrsgld/batching.hpp"
#include "rrsgld/diagnostics.hpp"
#include "rrsgld/model.hpp"
#include "rrsgld/rng.hpp"

namespace rrsgld {

/// x - h * grad_hat + sqrt(2h) * noise  (SGLD; ULA when grad_hat is exact).
Vector sgld_step(const Vector& x, const Vector& grad_hat, double h, const Vector& noise);
/// x - h * grad F(x) + sqrt(2h) * noise.
Vector ula_step(const Vector& x, const FiniteSumModel& model, double h, const Vector& noise);
/// x - h * grad_hat.
Vector sgd_step(const Vector& x, const Vector& grad_hat, double h);
/// x - h * grad F(x).
Vector gd_step(const Vector& x, const FiniteSumModel& model, double h);

inline constexpr std::size_t kDefaultBurnIn = 1000;

struct SamplerConfig {
  double step_size = 0.0;
  /// Total number of steps K; for reshuffling a whole number of epochs.
  std::size_t iterations = 0;
  std::size_t burn_in = 0;
  Policy policy = Policy::kRobbinsMonro;
  std::size_t batch_size = 1;
  std::uint64_t seed = 0;
  std::size_t realizations = 1;
  /// false turns SGLD/ULA into SGD/GD.
  bool langevin = true;
  /// Keep every thin-th iterate in a ChainTrace.
  std::size_t thin = 1;

  /// Throws std::invalid_argument naming the violated constraint.
  void validate(std::size_t dataset_size) const;
  /// R = N / n (1 for full batch).
  std::size_t epoch_length(std::size_t dataset_size) const;

  nlohmann::json to_json() const;
};

/// Raised when an iterate has a NaN or infinite coordinate.
class NonFiniteIterate : public std::runtime_error {
 public:
  NonFiniteIterate(std::size_t step, const std::string& what)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

/// Iterates x_0..x_K (every thin-th kept) with their phases r = k mod R.
struct ChainTrace {
  std::size_t epoch_length = 1;
  std::size_t thin = 1;
  std::vector<std::size_t> steps;
  std::vector<Vector> iterates;

  std::size_t size() const { return iterates.size(); }
  std::size_t phase(std::size_t i) const { return steps[i] % epoch_length; }
};

/// Writes "k,phase,x0,x1,..." rows for every kept iterate, with a header.
void write_trace_csv(std::ostream& out, const ChainTrace& trace);

/// Per-phase count, coordinate means and variances of the kept iterates with
/// step k >= burn_in.
nlohmann::json trace_summary(const ChainTrace& trace, std::size_t burn_in = 0);

/// Called with (k, r, x_k) for k = 0..K.
using StepObserver = std::function<void(std::size_t, std::size_t, const Vector&)>;

/// Runs K steps of the configured rule with batches from `schedule` and noise
/// from `noise`. The schedule must match the config's policy and batch size.
void run_chain(const FiniteSumModel& model, const SamplerConfig& config, BatchSchedule& schedule,
               NoiseStream& noise, const Vector& x0, const StepObserver& observer);

ChainTrace run_chain(const FiniteSumModel& model, const SamplerConfig& config,
                     BatchSchedule& schedule, NoiseStream& noise, const Vector& x0);

/// Schedule and noise stream of realization j, derived from config.seed.
BatchSchedule realization_schedule(const SamplerConfig& config, std::size_t dataset_size,
                                   std::size_t realization);
NoiseStream realization_noise(const SamplerConfig& config, std::size_t realization);

/// Two chains from x0_a and x0_b sharing every batch and every noise draw.
/// Returns ||u_k - v_k|| for k = 0..K.
std::vector<double> run_coupled_pair(const FiniteSumModel& model, const SamplerConfig& config,
                                     BatchSchedule& schedule, NoiseStream& noise,
                                     const Vector& x0_a, const Vector& x0_b);

struct CoupledDistances {
  /// Squared distance ||u_k - v_k||^2 per step over the ensemble.
  SlottedMoments squared;

  void merge(const CoupledDistances& other) { squared.merge(other.squared); }

  /// sqrt(E ||u_k - v_k||^2), i.e. the L2 distance of the coupling.
  double rms(std::size_t k) const;
  /// Delta-method standard error of rms(k).
  double rms_standard_error(std::size_t k) const;
};

/// run_coupled_pair over config.realizations independent (batch, noise)
/// streams.
CoupledDistances run_coupled_ensemble(const FiniteSumModel& model, const SamplerConfig& config,
                                      const Vector& x0_a, const Vector& x0_b);

}  // namespace rrsgld
