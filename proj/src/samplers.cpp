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

#include "rrsgld/samplers.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "rrsgld/ensemble.hpp"

namespace rrsgld {

Vector sgld_step(const Vector& x, const Vector& grad_hat, double h, const Vector& noise) {
  return x - h * grad_hat + std::sqrt(2.0 * h) * noise;
}

Vector ula_step(const Vector& x, const FiniteSumModel& model, double h, const Vector& noise) {
  return sgld_step(x, model.gradient(x), h, noise);
}

Vector sgd_step(const Vector& x, const Vector& grad_hat, double h) { return x - h * grad_hat; }

Vector gd_step(const Vector& x, const FiniteSumModel& model, double h) {
  return sgd_step(x, model.gradient(x), h);
}

// ---------------------------------------------------------------------------

std::size_t SamplerConfig::epoch_length(std::size_t dataset_size) const {
  if (policy == Policy::kFullBatch) return 1;
  return batch_size == 0 ? 0 : dataset_size / batch_size;
}

void SamplerConfig::validate(std::size_t dataset_size) const {
  if (!(step_size > 0.0) || !std::isfinite(step_size)) {
    throw std::invalid_argument("sampler config: step size must be positive and finite");
  }
  if (policy != Policy::kFullBatch && (batch_size == 0 || batch_size > dataset_size)) {
    throw std::invalid_argument("sampler config: batch size " + std::to_string(batch_size) +
                                " not in [1, N = " + std::to_string(dataset_size) + "]");
  }
  if (policy == Policy::kRandomReshuffling) {
    if (dataset_size % batch_size != 0) {
      throw std::invalid_argument("sampler config: reshuffling needs n | N");
    }
    const std::size_t R = dataset_size / batch_size;
    if (iterations % R != 0) {
      throw std::invalid_argument("sampler config: K = " + std::to_string(iterations) +
                                  " is not a whole number of epochs of R = " + std::to_string(R));
    }
  }
  if (iterations > 0 && burn_in >= iterations) {
    throw std::invalid_argument("sampler config: burn-in " + std::to_string(burn_in) +
                                " must be below K = " + std::to_string(iterations));
  }
  if (realizations == 0) throw std::invalid_argument("sampler config: zero realizations");
  if (thin == 0) throw std::invalid_argument("sampler config: thin must be positive");
}

void write_trace_csv(std::ostream& out, const ChainTrace& trace) {
  const Eigen::Index d = trace.iterates.empty() ? 0 : trace.iterates.front().size();
  out << "k,phase";
  for (Eigen::Index j = 0; j < d; ++j) out << ",x" << j;
  out << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    out << trace.steps[i] << ',' << trace.phase(i);
    for (Eigen::Index j = 0; j < d; ++j) out << ',' << trace.iterates[i][j];
    out << '\n';
  }
}

nlohmann::json trace_summary(const ChainTrace& trace, std::size_t burn_in) {
  const std::size_t d = trace.iterates.empty() ? 0 : static_cast<std::size_t>(trace.iterates.front().size());
  std::vector<VectorMoments> phases(trace.epoch_length, VectorMoments(d));
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (trace.steps[i] >= burn_in) phases[trace.phase(i)].add(trace.iterates[i]);
  }
  auto as_list = [](const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); };
  nlohmann::json out;
  out["epoch_length"] = trace.epoch_length;
  out["thin"] = trace.thin;
  out["burn_in"] = burn_in;
  out["phases"] = nlohmann::json::array();
  for (std::size_t r = 0; r < phases.size(); ++r) {
    nlohmann::json p{{"phase", r}, {"count", phases[r].count()}};
    if (phases[r].count() > 0) p["mean"] = as_list(phases[r].mean());
    if (phases[r].count() > 1) p["variance"] = as_list(phases[r].variance());
    out["phases"].push_back(std::move(p));
  }
  return out;
}

nlohmann::json SamplerConfig::to_json() const {
  return {{"step_size", step_size},     {"iterations", iterations},
          {"burn_in", burn_in},         {"policy", std::string(to_string(policy))},
          {"batch_size", batch_size},   {"seed", seed},
          {"realizations", realizations}, {"langevin", langevin},
          {"thin", thin}};
}

namespace {

void check_schedule(const FiniteSumModel& model, const SamplerConfig& config,
                    const BatchSchedule& schedule) {
  if (schedule.policy() != config.policy) {
    throw std::invalid_argument("run_chain: schedule policy does not match the config");
  }
  if (schedule.dataset_size() != model.size()) {
    throw std::invalid_argument("run_chain: schedule dataset size does not match the model");
  }
  if (config.policy != Policy::kFullBatch && schedule.batch_size() != config.batch_size) {
    throw std::invalid_argument("run_chain: schedule batch size does not match the config");
  }
}

[[noreturn]] void non_finite(std::size_t k, const Vector& x) {
  std::ostringstream msg;
  msg << "non-finite iterate at step " << k << ": [" << x.transpose() << "]";
  throw NonFiniteIterate(k, msg.str());
}

Vector step_gradient(const FiniteSumModel& model, Policy policy,
                     std::span<const std::size_t> batch, const Vector& x) {
  return policy == Policy::kFullBatch ? model.gradient(x) : model.batch_gradient(batch, x);
}

}  // namespace

void run_chain(const FiniteSumModel& model, const SamplerConfig& config, BatchSchedule& schedule,
               NoiseStream& noise, const Vector& x0, const StepObserver& observer) {
  config.validate(model.size());
  check_schedule(model, config, schedule);
  if (static_cast<std::size_t>(x0.size()) != model.dimension()) {
    throw std::invalid_argument("run_chain: x0 has the wrong dimension");
  }
  const std::size_t R = schedule.epoch_length();
  const double h = config.step_size;
  Vector x = x0;
  Vector z = Vector::Zero(x.size());
  if (observer) observer(0, 0, x);
  for (std::size_t k = 0; k < config.iterations; ++k) {
    const auto batch = schedule.next_batch();
    const Vector g = step_gradient(model, config.policy, batch, x);
    if (config.langevin) {
      noise.fill({z.data(), static_cast<std::size_t>(z.size())});
      x = sgld_step(x, g, h, z);
    } else {
      x = sgd_step(x, g, h);
    }
    if (!x.allFinite()) non_finite(k + 1, x);
    if (observer) observer(k + 1, (k + 1) % R, x);
  }
}

ChainTrace run_chain(const FiniteSumModel& model, const SamplerConfig& config,
                     BatchSchedule& schedule, NoiseStream& noise, const Vector& x0) {
  ChainTrace trace;
  trace.epoch_length = schedule.epoch_length();
  trace.thin = config.thin;
  run_chain(model, config, schedule, noise, x0,
            [&](std::size_t k, std::size_t, const Vector& x) {
              if (k % config.thin == 0) {
                trace.steps.push_back(k);
                trace.iterates.push_back(x);
              }
            });
  return trace;
}

BatchSchedule realization_schedule(const SamplerConfig& config, std::size_t dataset_size,
                                   std::size_t realization) {
  return BatchSchedule(config.policy, dataset_size, config.batch_size,
                       derive_seed(config.seed, {stream::kBatch, realization}));
}

NoiseStream realization_noise(const SamplerConfig& config, std::size_t realization) {
  return NoiseStream(derive_seed(config.seed, {stream::kNoise, realization}));
}

// ---------------------------------------------------------------------------

std::vector<double> run_coupled_pair(const FiniteSumModel& model, const SamplerConfig& config,
                                     BatchSchedule& schedule, NoiseStream& noise,
                                     const Vector& x0_a, const Vector& x0_b) {
  config.validate(model.size());
  check_schedule(model, config, schedule);
  if (x0_a.size() != x0_b.size() || static_cast<std::size_t>(x0_a.size()) != model.dimension()) {
    throw std::invalid_argument("run_coupled_pair: starting points have the wrong dimension");
  }
  const double h = config.step_size;
  Vector u = x0_a;
  Vector v = x0_b;
  Vector z = Vector::Zero(u.size());
  std::vector<double> dist;
  dist.reserve(config.iterations + 1);
  dist.push_back((u - v).norm());
  for (std::size_t k = 0; k < config.iterations; ++k) {
    const auto batch = schedule.next_batch();
    const Vector gu = step_gradient(model, config.policy, batch, u);
    const Vector gv = step_gradient(model, config.policy, batch, v);
    if (config.langevin) {
      noise.fill({z.data(), static_cast<std::size_t>(z.size())});
      u = sgld_step(u, gu, h, z);
      v = sgld_step(v, gv, h, z);
    } else {
      u = sgd_step(u, gu, h);
      v = sgd_step(v, gv, h);
    }
    if (!u.allFinite()) non_finite(k + 1, u);
    if (!v.allFinite()) non_finite(k + 1, v);
    dist.push_back((u - v).norm());
  }
  return dist;
}

double CoupledDistances::rms(std::size_t k) const { return std::sqrt(squared[k].mean()); }

double CoupledDistances::rms_standard_error(std::size_t k) const {
  const double r = rms(k);
  if (squared[k].count() < 2) return 0.0;
  const double se = squared[k].standard_error();
  if (r == 0.0) return std::sqrt(se);
  return se / (2.0 * r);
}

CoupledDistances run_coupled_ensemble(const FiniteSumModel& model, const SamplerConfig& config,
                                      const Vector& x0_a, const Vector& x0_b) {
  config.validate(model.size());
  const std::size_t steps = config.iterations + 1;
  return parallel_reduce<CoupledDistances>(
      config.realizations, [&] { return CoupledDistances{SlottedMoments(steps)}; },
      [&](std::size_t j, CoupledDistances& acc) {
        auto schedule = realization_schedule(config, model.size(), j);
        auto noise = realization_noise(config, j);
        const auto d = run_coupled_pair(model, config, schedule, noise, x0_a, x0_b);
        for (std::size_t k = 0; k < d.size(); ++k) acc.squared.add(k, d[k] * d[k]);
      });
}

}  // namespace rrsgld
