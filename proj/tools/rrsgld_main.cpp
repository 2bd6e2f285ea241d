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

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rrsgld/experiments.hpp"

namespace {

using rrsgld::ExperimentKind;
using rrsgld::ExperimentSpec;

struct Flags {
  std::string config;
  std::vector<double> h;
  std::size_t R = 0;
  std::size_t N = 0;
  std::size_t n = 0;
  std::vector<std::string> policy;
  std::size_t realizations = 0;
  std::uint64_t seed = 0;
  std::size_t burnin = 0;
  std::size_t epochs = 0;
  std::size_t max_iterations = 0;
  std::string out;
  std::string dataset;
  bool standardize = false;
  bool header = false;
  std::size_t label_column = 0;
  std::size_t hmc_samples = 0;
  unsigned threads = 0;
  double mu = 0, L = 0, L1 = 0, d = 0, sigma_star = 0;
  std::size_t mc_draws = 0;
};

struct Bound {
  CLI::App* app;
  ExperimentKind kind;
  std::vector<CLI::Option*> opts;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON file mirroring these flags")->check(CLI::ExistingFile);
  sub->add_option("--R", f.R, "batches per epoch")->check(CLI::PositiveNumber);
  sub->add_option("--N", f.N, "dataset size (model problem)");
  sub->add_option("--n", f.n, "batch size");
  sub->add_option("--seed", f.seed, "root seed");
  sub->add_option("--out", f.out, "output directory for CSV series and manifest.json");
  sub->add_option("--threads", f.threads, "worker threads (0 = hardware)");
}

void add_sampling(CLI::App* sub, Flags& f) {
  sub->add_option("--h", f.h, "step size (repeatable)");
  sub->add_option("--policy", f.policy, "rm, rr or ula (repeatable)")
      ->check(CLI::IsMember({"rm", "rr", "ula", "full"}));
  sub->add_option("--realizations", f.realizations, "ensemble size");
  sub->add_option("--burnin", f.burnin, "burn-in iterations");
  sub->add_option("--epochs", f.epochs, "sampling epochs (default from the step-size rule)");
  sub->add_option("--max-iterations", f.max_iterations, "cap on iterations per chain");
}

void apply(const CLI::App& sub, const Flags& f, ExperimentSpec& s) {
  auto given = [&](const char* name) {
    try {
      return sub.get_option(name)->count() > 0;
    } catch (const CLI::OptionNotFound&) {
      return false;
    }
  };
  if (given("--h")) s.h = f.h;
  if (given("--R")) s.R = f.R;
  if (given("--N")) s.N = f.N;
  if (given("--n")) s.n = f.n;
  if (given("--policy")) {
    s.policies.clear();
    for (const auto& p : f.policy) s.policies.push_back(rrsgld::parse_policy(p));
  }
  if (given("--realizations")) s.realizations = f.realizations;
  if (given("--seed")) s.seed = f.seed;
  if (given("--burnin")) s.burn_in = f.burnin;
  if (given("--epochs")) s.epochs = f.epochs;
  if (given("--max-iterations")) s.max_iterations = f.max_iterations;
  if (given("--out")) s.out = f.out;
  if (given("--threads")) s.threads = f.threads;
  if (given("--dataset")) s.dataset = f.dataset;
  if (given("--standardize")) s.standardize = f.standardize;
  if (given("--header")) s.has_header = f.header;
  if (given("--label-column")) s.label_column = f.label_column;
  if (given("--hmc-samples")) s.hmc_samples = f.hmc_samples;
  if (given("--mu")) s.mu = f.mu;
  if (given("--L")) s.L = f.L;
  if (given("--L1")) s.L1 = f.L1;
  if (given("--d")) s.d = f.d;
  if (given("--sigma-star")) s.sigma_star = f.sigma_star;
  if (given("--mc-draws")) s.mc_draws = f.mc_draws;
}

ExperimentSpec load_spec(const Flags& f, ExperimentKind kind) {
  ExperimentSpec s;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    s = ExperimentSpec::from_json(nlohmann::json::parse(in));
  }
  s.kind = kind;
  return s;
}

void report(const rrsgld::ModelProblemResult& r) {
  std::cout << "N=" << r.N << " n=" << r.n << " R=" << r.R << " V=" << r.V << '\n';
  for (const auto& run : r.runs) {
    std::cout << std::setw(4) << to_string(run.policy) << " h=" << run.h
              << "  rel_var_error=" << run.average.rel_error << " +- "
              << run.average.standard_error << "  predicted=" << run.average.predicted;
    if (run.length.capped) std::cout << "  [capped]";
    std::cout << '\n';
  }
}

void report(const rrsgld::LogregResult& r) {
  std::cout << "N=" << r.N << " d=" << r.d << " n=" << r.n << " R=" << r.R
            << " hmc_acceptance=" << r.hmc_acceptance << '\n';
  for (const auto& run : r.runs) {
    std::cout << std::setw(4) << to_string(run.policy) << " h=" << run.h
              << "  rel_mean_error=" << run.final_rel_error << " +- " << run.final_standard_error
              << "  lag_R_acf=" << run.window_peak.acf_at_lag << '\n';
  }
}

void report(const rrsgld::BoundsResult& r) {
  std::cout << "mu=" << r.base.mu << " L=" << r.base.L << " L1=" << r.base.L1
            << " d=" << r.base.d << " sigma*=" << r.base.sigma_star << '\n';
  for (const auto& [t, slope] : r.epsilon_slopes) {
    std::cout << std::setw(10) << to_string(t) << "  steps-to-eps slope=" << slope << '\n';
  }
}

void report(const rrsgld::VarianceCheckResult& r) {
  std::cout << "N=" << r.N << " n=" << r.n << '\n';
  for (const auto& c : r.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  measured=" << c.measured
              << "  predicted=" << c.predicted;
    if (!c.enumerated) std::cout << "  se=" << c.standard_error;
    std::cout << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic gradient Langevin experiments with random reshuffling"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", rrsgld::version_string());
  app.require_subcommand(1);
  Flags f;

  auto* mp = app.add_subcommand("model-problem", "Gaussian mean model: variance error per phase");
  add_common(mp, f);
  add_sampling(mp, f);

  auto* lr = app.add_subcommand("logreg", "Bayesian logistic regression against an HMC reference");
  add_common(lr, f);
  add_sampling(lr, f);
  lr->add_option("--dataset", f.dataset, "CSV with a binary label column (default: SimData)")
      ->check(CLI::ExistingFile);
  lr->add_flag("--standardize", f.standardize, "standardize feature columns on load");
  lr->add_flag("--header", f.header, "skip a header row");
  lr->add_option("--label-column", f.label_column, "0-based label column");
  lr->add_option("--hmc-samples", f.hmc_samples, "HMC reference sample count");

  auto* bd = app.add_subcommand("bounds", "Tabulate the non-asymptotic error bounds");
  add_common(bd, f);
  bd->add_option("--h", f.h, "step size (repeatable)");
  bd->add_option("--mu", f.mu, "strong convexity constant");
  bd->add_option("--L", f.L, "smoothness constant");
  bd->add_option("--L1", f.L1, "Hessian Lipschitz constant");
  bd->add_option("--d", f.d, "dimension");
  bd->add_option("--sigma-star", f.sigma_star, "gradient noise level at the target");

  auto* vc = app.add_subcommand("variance-check", "Check the batch variance identities");
  add_common(vc, f);
  vc->add_option("--mc-draws", f.mc_draws, "Monte Carlo draws when enumeration is too large");

  CLI11_PARSE(app, argc, argv);

  try {
    if (mp->parsed()) {
      auto spec = load_spec(f, ExperimentKind::kModelProblem);
      apply(*mp, f, spec);
      report(rrsgld::run_model_problem(spec));
    } else if (lr->parsed()) {
      auto spec = load_spec(f, ExperimentKind::kLogreg);
      apply(*lr, f, spec);
      report(rrsgld::run_logreg(spec));
    } else if (bd->parsed()) {
      auto spec = load_spec(f, ExperimentKind::kBounds);
      apply(*bd, f, spec);
      report(rrsgld::run_bounds_sweep(spec));
    } else if (vc->parsed()) {
      auto spec = load_spec(f, ExperimentKind::kVarianceCheck);
      apply(*vc, f, spec);
      const auto res = rrsgld::run_variance_check(spec);
      report(res);
      return res.all_passed() ? 0 : 3;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
