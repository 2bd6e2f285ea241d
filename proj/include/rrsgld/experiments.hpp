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
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "rrsgld/batching.hpp"
#include "rrsgld/bounds.hpp"
#include "rrsgld/diagnostics.hpp"
#include "rrsgld/model.hpp"

namespace rrsgld {

enum class ExperimentKind { kModelProblem, kLogreg, kBounds, kVarianceCheck };

std::string_view to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view name);

/// Declarative run configuration shared by all experiment kinds; fields a
/// kind does not use are ignored. Zero-valued sizes mean "derive".
struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::kModelProblem;

  std::vector<double> h = {0.1, 0.2, 0.4};
  std::size_t R = 8;
  /// Dataset size; 0 derives 20 R (model problem) or uses the dataset.
  std::size_t N = 0;
  /// Batch size; 0 derives N / R.
  std::size_t n = 0;
  double sigma2 = 1.0;
  std::vector<Policy> policies = {Policy::kFullBatch, Policy::kRobbinsMonro,
                                  Policy::kRandomReshuffling};
  std::size_t realizations = 1000;
  std::uint64_t seed = 20240601;
  std::size_t burn_in = 1000;
  /// Sampling epochs n_e; 0 uses ceil(100 + 20 (hR)^-3).
  std::size_t epochs = 0;
  /// Cap on burn-in + n_e R per chain.
  std::size_t max_iterations = 1'000'000;
  /// Length of the trailing window recorded per iteration, in epochs.
  std::size_t window_epochs = 10;
  std::string out;
  unsigned threads = 0;

  // Logistic regression.
  std::string dataset;
  std::size_t label_column = 0;
  bool has_header = false;
  bool standardize = false;
  std::size_t sim_rows = 256;
  std::size_t sim_features = 10;
  std::size_t hmc_samples = 100000;
  std::size_t hmc_burn_in = 2000;
  std::size_t hmc_leapfrog = 10;
  /// 0 tunes the step for acceptance in [0.65, 0.85].
  double hmc_step = 0.0;

  // Bounds sweep. Non-positive mu/L derive the constants from the Gaussian
  // model problem in preconditioned time (mu = L = 1, L1 = 0, d = 1).
  double mu = 0.0;
  double L = 0.0;
  double L1 = 0.0;
  double d = 1.0;
  /// Negative derives sigma* from the model problem data.
  double sigma_star = -1.0;
  double initial_distance = 1.0;
  std::vector<double> K_grid = {10, 100, 1000, 10000, std::numeric_limits<double>::infinity()};
  std::vector<double> R_grid = {};
  std::vector<double> eps_grid = {1e-5, 1e-6, 1e-7, 1e-8};

  // Variance check.
  std::size_t mc_draws = 200000;

  void validate() const;
  nlohmann::json to_json() const;
  /// Unknown keys are rejected.
  static ExperimentSpec from_json(const nlohmann::json& j);
};

/// ceil(100 + 20 (h R)^-3).
std::size_t default_epochs(double h, std::size_t R);

/// Burn-in rounded up to whole epochs plus n_e epochs, with n_e reduced to
/// respect max_iterations.
struct RunLength {
  std::size_t burn_in = 0;
  std::size_t epochs = 0;
  std::size_t iterations = 0;
  bool capped = false;
};
RunLength run_length(const ExperimentSpec& spec, double h, std::size_t R);

// --- model problem ---------------------------------------------------------

struct PhaseEstimate {
  double rel_error = 0.0;
  double standard_error = 0.0;
  double predicted = 0.0;
};

struct ModelProblemRun {
  Policy policy = Policy::kFullBatch;
  double h = 0.0;
  RunLength length;
  std::uint64_t seed = 0;
  /// Ensemble estimate per phase r = k mod R from post-burn-in iterates,
  /// with the closed-form prediction.
  std::vector<PhaseEstimate> phases;
  PhaseEstimate average;
  /// Time-average estimator (within-chain variance), averaged over chains.
  double time_rel_error = 0.0;
  /// Ensemble relative variance error at each iterate of the last window.
  std::vector<std::size_t> window_steps;
  std::vector<double> window_rel_error;
  LagPeak window_peak;
};

struct ModelProblemResult {
  std::size_t N = 0;
  std::size_t n = 0;
  std::size_t R = 0;
  double V = 0.0;
  double ybar = 0.0;
  std::vector<ModelProblemRun> runs;

  const ModelProblemRun& find(Policy policy, double h) const;
};

/// Gaussian model problem: data y_i ~ N(0, 1), preconditioned step h, and
/// ULA / RM / RR ensembles started from x_0 = 0.
ModelProblemResult run_model_problem(const ExperimentSpec& spec);

// --- logistic regression ---------------------------------------------------

struct LogregRun {
  Policy policy = Policy::kFullBatch;
  double h = 0.0;
  RunLength length;
  std::uint64_t seed = 0;
  /// ||E[running mean] - mu|| / ||mu|| at the end of the run, and the
  /// Monte Carlo standard error of that estimate.
  double final_rel_error = 0.0;
  double final_standard_error = 0.0;
  /// (post-burn-in sample count, relative error) checkpoints.
  std::vector<std::size_t> trajectory_samples;
  std::vector<double> trajectory_rel_error;
  /// Relative error of the ensemble mean of the per-phase time averages.
  std::vector<double> phase_rel_error;
  /// Relative error of the ensemble mean of x_k over the last window.
  std::vector<std::size_t> window_steps;
  std::vector<double> window_rel_error;
  LagPeak window_peak;
};

struct LogregResult {
  std::size_t N = 0;
  std::size_t d = 0;
  std::size_t n = 0;
  std::size_t R = 0;
  Vector mode;
  /// Largest Hessian eigenvalue at the mode.
  double curvature_at_mode = 0.0;
  Vector reference_mean;
  double hmc_step = 0.0;
  std::size_t hmc_leapfrog = 0;
  double hmc_acceptance = 0.0;
  std::size_t hmc_divergences = 0;
  bool hmc_acceptance_flagged = false;
  std::vector<LogregRun> runs;

  const LogregRun& find(Policy policy, double h) const;
};

/// Builds the dataset (SimData or CSV), establishes the reference posterior
/// mean by HMC from the mode, then runs the configured schemes from the mode.
LogregResult run_logreg(const ExperimentSpec& spec);

// --- bounds ----------------------------------------------------------------

struct BoundCell {
  Theorem theorem;
  double h = 0.0;
  double R = 0.0;
  double K = 0.0;
  bool admissible = false;
  double value = 0.0;
};

struct EpsilonRow {
  Theorem theorem;
  double eps = 0.0;
  double h = 0.0;
  double K = 0.0;
};

struct BoundsResult {
  BoundParams base;
  std::vector<BoundCell> cells;
  std::vector<EpsilonRow> epsilon;
  /// Log-log slope of K against eps per theorem (NaN when not computable).
  std::vector<std::pair<Theorem, double>> epsilon_slopes;
};

BoundsResult run_bounds_sweep(const ExperimentSpec& spec);

// --- variance identities ---------------------------------------------------

struct IdentityCheck {
  std::string name;
  double measured = 0.0;
  double predicted = 0.0;
  /// Monte Carlo standard error; 0 for exact enumeration.
  double standard_error = 0.0;
  bool enumerated = false;
  bool passed = false;
};

struct VarianceCheckResult {
  std::size_t N = 0;
  std::size_t n = 0;
  std::vector<IdentityCheck> checks;
  bool all_passed() const;
};

/// Compares sigma*^2, the within-epoch covariance and the batch-mean
/// variance against their closed forms on Gaussian data: enumeration with
/// tolerance 1e-10 when feasible, otherwise Monte Carlo within 4 standard
/// errors.
VarianceCheckResult run_variance_check(const ExperimentSpec& spec);

/// Version string embedded at build time.
std::string version_string();

}  // namespace rrsgld
