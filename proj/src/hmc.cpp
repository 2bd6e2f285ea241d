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

#include "rrsgld/hmc.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "rrsgld/rng.hpp"

namespace rrsgld {

double hamiltonian(const FiniteSumModel& model, const Vector& q, const Vector& p) {
  return model.potential(q) + 0.5 * p.squaredNorm();
}

void leapfrog(const FiniteSumModel& model, Vector& q, Vector& p, double step_size,
              std::size_t steps) {
  p -= 0.5 * step_size * model.gradient(q);
  for (std::size_t s = 0; s < steps; ++s) {
    q += step_size * p;
    if (s + 1 < steps) p -= step_size * model.gradient(q);
  }
  p -= 0.5 * step_size * model.gradient(q);
}

HmcResult hmc_run(const FiniteSumModel& model, const Vector& x0, const HmcConfig& config) {
  if (!(config.step_size > 0.0)) throw std::invalid_argument("hmc_run: step size must be positive");
  if (config.leapfrog_steps == 0) throw std::invalid_argument("hmc_run: need >= 1 leapfrog step");
  if (static_cast<std::size_t>(x0.size()) != model.dimension()) {
    throw std::invalid_argument("hmc_run: x0 has the wrong dimension");
  }
  Engine rng(derive_seed(config.seed, {stream::kHmc}));
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  HmcResult result;
  result.moments = VectorMoments(model.dimension());
  if (config.keep_samples) result.samples.reserve(config.samples);

  Vector q = x0;
  double potential = model.potential(q);
  std::size_t accepted = 0;
  const std::size_t total = config.burn_in + config.samples;
  for (std::size_t t = 0; t < total; ++t) {
    Vector p(q.size());
    for (Eigen::Index j = 0; j < p.size(); ++j) p[j] = normal(rng);
    const double h0 = potential + 0.5 * p.squaredNorm();
    Vector q_new = q;
    leapfrog(model, q_new, p, config.step_size, config.leapfrog_steps);
    const double u_new = model.potential(q_new);
    const double h1 = u_new + 0.5 * p.squaredNorm();
    const double delta = h1 - h0;
    ++result.proposals;
    const double u = unit(rng);
    if (!std::isfinite(delta) || delta > config.divergence_threshold) {
      ++result.divergences;
    } else if (std::log(u) < -delta) {
      q = std::move(q_new);
      potential = u_new;
      ++accepted;
    }
    if (t >= config.burn_in) {
      result.moments.add(q);
      if (config.keep_samples) result.samples.push_back(q);
    }
  }
  result.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(total);
  return result;
}

HmcTuning tune_hmc_step(const FiniteSumModel& model, const Vector& x0, std::size_t leapfrog_steps,
                        double initial, std::uint64_t seed, std::size_t trial_samples, double low,
                        double high) {
  if (!(initial > 0.0)) throw std::invalid_argument("tune_hmc_step: initial step must be positive");
  HmcTuning best{initial, -1.0};
  const double target = 0.5 * (low + high);
  double step = initial;
  int direction = 0;
  for (int attempt = 0; attempt < 40; ++attempt) {
    HmcConfig cfg;
    cfg.step_size = step;
    cfg.leapfrog_steps = leapfrog_steps;
    cfg.samples = trial_samples;
    cfg.burn_in = trial_samples / 4;
    cfg.seed = derive_seed(seed, {static_cast<std::uint64_t>(attempt)});
    const double rate = hmc_run(model, x0, cfg).acceptance_rate;
    if (best.acceptance_rate < 0.0 ||
        std::abs(rate - target) < std::abs(best.acceptance_rate - target)) {
      best = {step, rate};
    }
    if (rate >= low && rate <= high) return {step, rate};
    const int wanted = rate > high ? 1 : -1;
    // A change of direction means the band lies between two grid points;
    // refine with a smaller factor.
    const double factor = (direction != 0 && wanted != direction) ? 1.25 : 2.0;
    direction = wanted;
    step = wanted > 0 ? step * factor : step / factor;
  }
  return best;
}

}  // namespace rrsgld
