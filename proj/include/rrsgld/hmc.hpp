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
#include <vector>

#include "rrsgld/diagnostics.hpp"
#include "rrsgld/model.hpp"

namespace rrsgld {

/// Hamiltonian Monte Carlo with identity mass matrix targeting exp(-F), used
/// to establish reference posterior means.
struct HmcConfig {
  double step_size = 0.1;
  std::size_t leapfrog_steps = 10;
  std::size_t samples = 10000;
  std::size_t burn_in = 1000;
  std::uint64_t seed = 0;
  bool keep_samples = false;
  /// Trajectories whose energy error exceeds this are rejected and counted.
  double divergence_threshold = 1000.0;
};

struct HmcResult {
  VectorMoments moments;
  std::vector<Vector> samples;
  double acceptance_rate = 0.0;
  std::size_t divergences = 0;
  std::size_t proposals = 0;
};

/// H(q, p) = F(q) + |p|^2 / 2.
double hamiltonian(const FiniteSumModel& model, const Vector& q, const Vector& p);

/// In-place leapfrog integration of (q, p) for `steps` steps.
void leapfrog(const FiniteSumModel& model, Vector& q, Vector& p, double step_size,
              std::size_t steps);

/// Runs burn_in + samples transitions from x0; the moments (and optionally the
/// samples) cover the post-burn-in draws.
HmcResult hmc_run(const FiniteSumModel& model, const Vector& x0, const HmcConfig& config);

struct HmcTuning {
  double step_size = 0.0;
  double acceptance_rate = 0.0;
};

/// Coarse search over step sizes (halving from `initial`) for a trial
/// acceptance rate in [low, high]; returns the first step that qualifies, or
/// the one closest to the middle of the band.
HmcTuning tune_hmc_step(const FiniteSumModel& model, const Vector& x0, std::size_t leapfrog_steps,
                        double initial, std::uint64_t seed, std::size_t trial_samples = 400,
                        double low = 0.65, double high = 0.85);

}  // namespace rrsgld
