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

#include "rrsgld/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "rrsgld/dataset.hpp"
#include "rrsgld/ensemble.hpp"
#include "rrsgld/gaussian_analytics.hpp"
#include "rrsgld/hmc.hpp"
#include "rrsgld/rng.hpp"
#include "rrsgld/samplers.hpp"

#ifndef RRSGLD_VERSION
#define RRSGLD_VERSION "unknown"
#endif

namespace rrsgld {

std::string version_string() { return RRSGLD_VERSION; }

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kModelProblem:
      return "model-problem";
    case ExperimentKind::kLogreg:
      return "logreg";
    case ExperimentKind::kBounds:
      return "bounds";
    case ExperimentKind::kVarianceCheck:
      return "variance-check";
  }
  return "?";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  if (name == "model-problem") return ExperimentKind::kModelProblem;
  if (name == "logreg") return ExperimentKind::kLogreg;
  if (name == "bounds" || name == "bounds-sweep") return ExperimentKind::kBounds;
  if (name == "variance-check") return ExperimentKind::kVarianceCheck;
  throw std::invalid_argument("unknown experiment kind '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Spec <-> JSON

namespace {

nlohmann::json number_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double parse_number_or_inf(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    throw std::invalid_argument("expected a number or \"inf\", got \"" + s + "\"");
  }
  return j.get<double>();
}

std::uint64_t policy_id(Policy p) {
  switch (p) {
    case Policy::kFullBatch:
      return 0;
    case Policy::kRobbinsMonro:
      return 1;
    case Policy::kRandomReshuffling:
      return 2;
  }
  return 3;
}

}  // namespace

void ExperimentSpec::validate() const {
  if (kind != ExperimentKind::kVarianceCheck) {
    if (h.empty()) throw std::invalid_argument("spec: empty h grid");
    for (double v : h) {
      if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("spec: h must be positive");
    }
  }
  if (R == 0) throw std::invalid_argument("spec: R must be positive");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("spec: sigma2 must be positive");
  if ((kind == ExperimentKind::kModelProblem || kind == ExperimentKind::kLogreg)) {
    if (realizations < 2) throw std::invalid_argument("spec: need at least two realizations");
    if (policies.empty()) throw std::invalid_argument("spec: no policies selected");
  }
  if (kind == ExperimentKind::kModelProblem) {
    for (double v : h) {
      if (v >= 2.0) throw std::invalid_argument("spec: model-problem h must lie in (0, 2)");
    }
  }
  if (n != 0 && N != 0 && N % n != 0) throw std::invalid_argument("spec: n must divide N");
}

nlohmann::json ExperimentSpec::to_json() const {
  nlohmann::json j;
  j["kind"] = std::string(to_string(kind));
  j["h"] = h;
  j["R"] = R;
  j["N"] = N;
  j["n"] = n;
  j["sigma2"] = sigma2;
  std::vector<std::string> pol;
  for (Policy p : policies) pol.emplace_back(to_string(p));
  j["policies"] = pol;
  j["realizations"] = realizations;
  j["seed"] = seed;
  j["burn_in"] = burn_in;
  j["epochs"] = epochs;
  j["max_iterations"] = max_iterations;
  j["window_epochs"] = window_epochs;
  j["out"] = out;
  j["threads"] = threads;
  j["dataset"] = dataset;
  j["label_column"] = label_column;
  j["has_header"] = has_header;
  j["standardize"] = standardize;
  j["sim_rows"] = sim_rows;
  j["sim_features"] = sim_features;
  j["hmc_samples"] = hmc_samples;
  j["hmc_burn_in"] = hmc_burn_in;
  j["hmc_leapfrog"] = hmc_leapfrog;
  j["hmc_step"] = hmc_step;
  j["mu"] = mu;
  j["L"] = L;
  j["L1"] = L1;
  j["d"] = d;
  j["sigma_star"] = sigma_star;
  j["initial_distance"] = initial_distance;
  auto grid = [](const std::vector<double>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (double x : v) a.push_back(number_or_inf(x));
    return a;
  };
  j["K_grid"] = grid(K_grid);
  j["R_grid"] = grid(R_grid);
  j["eps_grid"] = grid(eps_grid);
  j["mc_draws"] = mc_draws;
  return j;
}

ExperimentSpec ExperimentSpec::from_json(const nlohmann::json& j) {
  ExperimentSpec s;
  auto grid = [](const nlohmann::json& a) {
    std::vector<double> v;
    for (const auto& x : a) v.push_back(parse_number_or_inf(x));
    return v;
  };
  for (const auto& [key, value] : j.items()) {
    if (key == "kind") s.kind = parse_experiment_kind(value.get<std::string>());
    else if (key == "h") s.h = value.is_array() ? value.get<std::vector<double>>()
                                                : std::vector<double>{value.get<double>()};
    else if (key == "R") s.R = value.get<std::size_t>();
    else if (key == "N") s.N = value.get<std::size_t>();
    else if (key == "n") s.n = value.get<std::size_t>();
    else if (key == "sigma2") s.sigma2 = value.get<double>();
    else if (key == "policies" || key == "policy") {
      s.policies.clear();
      if (value.is_array()) {
        for (const auto& p : value) s.policies.push_back(parse_policy(p.get<std::string>()));
      } else {
        s.policies.push_back(parse_policy(value.get<std::string>()));
      }
    }
    else if (key == "realizations") s.realizations = value.get<std::size_t>();
    else if (key == "seed") s.seed = value.get<std::uint64_t>();
    else if (key == "burn_in" || key == "burnin") s.burn_in = value.get<std::size_t>();
    else if (key == "epochs") s.epochs = value.get<std::size_t>();
    else if (key == "max_iterations") s.max_iterations = value.get<std::size_t>();
    else if (key == "window_epochs") s.window_epochs = value.get<std::size_t>();
    else if (key == "out") s.out = value.get<std::string>();
    else if (key == "threads") s.threads = value.get<unsigned>();
    else if (key == "dataset") s.dataset = value.get<std::string>();
    else if (key == "label_column") s.label_column = value.get<std::size_t>();
    else if (key == "has_header") s.has_header = value.get<bool>();
    else if (key == "standardize") s.standardize = value.get<bool>();
    else if (key == "sim_rows") s.sim_rows = value.get<std::size_t>();
    else if (key == "sim_features") s.sim_features = value.get<std::size_t>();
    else if (key == "hmc_samples") s.hmc_samples = value.get<std::size_t>();
    else if (key == "hmc_burn_in") s.hmc_burn_in = value.get<std::size_t>();
    else if (key == "hmc_leapfrog") s.hmc_leapfrog = value.get<std::size_t>();
    else if (key == "hmc_step") s.hmc_step = value.get<double>();
    else if (key == "mu") s.mu = value.get<double>();
    else if (key == "L") s.L = value.get<double>();
    else if (key == "L1") s.L1 = value.get<double>();
    else if (key == "d") s.d = value.get<double>();
    else if (key == "sigma_star") s.sigma_star = value.get<double>();
    else if (key == "initial_distance") s.initial_distance = value.get<double>();
    else if (key == "K_grid") s.K_grid = grid(value);
    else if (key == "R_grid") s.R_grid = grid(value);
    else if (key == "eps_grid") s.eps_grid = grid(value);
    else if (key == "mc_draws") s.mc_draws = value.get<std::size_t>();
    else throw std::invalid_argument("spec: unknown key '" + key + "'");
  }
  return s;
}

std::size_t default_epochs(double h, std::size_t R) {
  const double hr = h * static_cast<double>(R);
  const double ne = 100.0 + 20.0 / (hr * hr * hr);
  if (!std::isfinite(ne) || ne > 1e15) return static_cast<std::size_t>(1e15);
  return static_cast<std::size_t>(std::ceil(ne - 1e-9));
}

RunLength run_length(const ExperimentSpec& spec, double h, std::size_t R) {
  RunLength len;
  len.burn_in = (spec.burn_in + R - 1) / R * R;
  len.epochs = spec.epochs > 0 ? spec.epochs : default_epochs(h, R);
  if (len.burn_in + len.epochs * R > spec.max_iterations) {
    if (spec.max_iterations <= len.burn_in + R) {
      throw std::invalid_argument("spec: max_iterations leaves no room after the burn-in");
    }
    len.epochs = (spec.max_iterations - len.burn_in) / R;
    len.capped = true;
  }
  len.iterations = len.burn_in + len.epochs * R;
  return len;
}

namespace {

// ---------------------------------------------------------------------------
// Artifact helpers

class Artifacts {
 public:
  Artifacts(const ExperimentSpec& spec) : dir_(spec.out), start_(std::chrono::steady_clock::now()) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
    manifest_["version"] = version_string();
    manifest_["experiment"] = std::string(to_string(spec.kind));
    manifest_["spec"] = spec.to_json();
    manifest_["seeds"] = {{"root", spec.seed}, {"runs", nlohmann::json::array()}};
    const std::time_t now = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    manifest_["started_at"] = buf;
  }

  bool enabled() const { return !dir_.empty(); }
  nlohmann::json& manifest() { return manifest_; }

  std::ofstream csv(const std::string& name, const std::string& schema, const std::string& header) {
    std::ofstream out(dir_ / name);
    if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
    out << "#schema=" << schema << '\n' << header << '\n' << std::setprecision(17);
    return out;
  }

  const std::filesystem::path& dir() const { return dir_; }

  void finish() {
    if (!enabled()) return;
    const auto elapsed = std::chrono::steady_clock::now() - start_;
    manifest_["wall_clock_seconds"] = std::chrono::duration<double>(elapsed).count();
    std::ofstream out(dir_ / "manifest.json");
    out << manifest_.dump(2) << '\n';
  }

 private:
  std::filesystem::path dir_;
  std::chrono::steady_clock::time_point start_;
  nlohmann::json manifest_;
};

nlohmann::json length_json(const RunLength& len) {
  return {{"burn_in", len.burn_in},
          {"epochs", len.epochs},
          {"iterations", len.iterations},
          {"capped", len.capped}};
}

// ---------------------------------------------------------------------------
// Model problem

struct ModelProblemAcc {
  SlottedMoments phase;
  RunningMoments overall;
  RunningMoments time_variance;
  SlottedMoments window;

  void merge(const ModelProblemAcc& o) {
    phase.merge(o.phase);
    overall.merge(o.overall);
    time_variance.merge(o.time_variance);
    window.merge(o.window);
  }
};

double predicted_phase_error(Policy policy, double h, std::size_t r, std::size_t R, double N,
                             double V, double sigma2) {
  switch (policy) {
    case Policy::kFullBatch:
      return ula_rel_var_error(h);
    case Policy::kRobbinsMonro:
      return rm_rel_var_error(h, N, V, sigma2);
    case Policy::kRandomReshuffling:
      return rr_rel_var_error_phase(h, r, R, N, V, sigma2);
  }
  return 0.0;
}

Scheme scheme_of(Policy p) {
  switch (p) {
    case Policy::kFullBatch:
      return Scheme::kUla;
    case Policy::kRobbinsMonro:
      return Scheme::kRobbinsMonro;
    case Policy::kRandomReshuffling:
      return Scheme::kRandomReshuffling;
  }
  return Scheme::kUla;
}

}  // namespace

const ModelProblemRun& ModelProblemResult::find(Policy policy, double h) const {
  for (const auto& r : runs) {
    if (r.policy == policy && r.h == h) return r;
  }
  throw std::out_of_range("no model-problem run for that policy and h");
}

ModelProblemResult run_model_problem(const ExperimentSpec& spec) {
  spec.validate();
  ModelProblemResult res;
  res.N = spec.N ? spec.N : 20 * spec.R;
  res.n = spec.n ? spec.n : res.N / spec.R;
  if (res.n == 0 || res.N % res.n != 0) throw std::invalid_argument("model problem: n must divide N");
  res.R = res.N / res.n;
  const std::size_t R = res.R;

  const GaussianMeanModel model(draw_gaussian_data(res.N, spec.seed), spec.sigma2);
  res.V = batch_mean_variance(model.data(), res.n);
  res.ybar = model.mean();
  const double Nd = static_cast<double>(res.N);
  const double ybar = res.ybar;

  Artifacts art(spec);
  art.manifest()["derived"] = {{"N", res.N}, {"n", res.n}, {"R", R}, {"V", res.V},
                               {"ybar", ybar}, {"sigma2", spec.sigma2}};

  for (std::size_t hi = 0; hi < spec.h.size(); ++hi) {
    const double h = spec.h[hi];
    for (Policy policy : spec.policies) {
      ModelProblemRun run;
      run.policy = policy;
      run.h = h;
      run.length = run_length(spec, h, R);
      run.seed = derive_seed(spec.seed, {100 + hi, policy_id(policy)});

      SamplerConfig cfg;
      cfg.step_size = model.unscaled_step(h);
      cfg.iterations = run.length.iterations;
      cfg.burn_in = run.length.burn_in;
      cfg.policy = policy;
      cfg.batch_size = res.n;
      cfg.seed = run.seed;
      cfg.realizations = spec.realizations;
      cfg.validate(model.size());

      const std::size_t K = cfg.iterations;
      const std::size_t W = std::min(spec.window_epochs * R, K - cfg.burn_in);
      const std::size_t window_start = K - W;  // window covers k in (window_start, K]
      const std::size_t burn = cfg.burn_in;

      const auto acc = parallel_reduce<ModelProblemAcc>(
          spec.realizations,
          [&] { return ModelProblemAcc{SlottedMoments(R), {}, {}, SlottedMoments(W)}; },
          [&](std::size_t j, ModelProblemAcc& a) {
            auto schedule = realization_schedule(cfg, model.size(), j);
            auto noise = realization_noise(cfg, j);
            std::vector<double> sums(R, 0.0);
            std::vector<std::size_t> counts(R, 0);
            RunningMoments chain;
            run_chain(model, cfg, schedule, noise, Vector::Zero(1),
                      [&](std::size_t k, std::size_t, const Vector& x) {
                        if (k <= burn) return;
                        const double dev = x[0] - ybar;
                        sums[k % R] += dev * dev;
                        ++counts[k % R];
                        chain.add(x[0]);
                        if (k > window_start) a.window.add(k - window_start - 1, x[0]);
                      });
            double total = 0.0;
            std::size_t count = 0;
            for (std::size_t r = 0; r < R; ++r) {
              a.phase.add(r, sums[r] / static_cast<double>(counts[r]));
              total += sums[r];
              count += counts[r];
            }
            a.overall.add(total / static_cast<double>(count));
            a.time_variance.add(chain.variance());
          },
          spec.threads);

      double predicted_sum = 0.0;
      for (std::size_t r = 0; r < R; ++r) {
        PhaseEstimate e;
        e.rel_error = Nd * acc.phase[r].mean() / spec.sigma2 - 1.0;
        e.standard_error = Nd * acc.phase[r].standard_error() / spec.sigma2;
        e.predicted = predicted_phase_error(policy, h, r, R, Nd, res.V, spec.sigma2);
        predicted_sum += e.predicted;
        run.phases.push_back(e);
      }
      run.average.rel_error = Nd * acc.overall.mean() / spec.sigma2 - 1.0;
      run.average.standard_error = Nd * acc.overall.standard_error() / spec.sigma2;
      run.average.predicted = predicted_sum / static_cast<double>(R);
      run.time_rel_error = relative_variance_error(acc.time_variance.mean(), Nd, spec.sigma2);
      for (std::size_t s = 0; s < W; ++s) {
        run.window_steps.push_back(window_start + 1 + s);
        run.window_rel_error.push_back(relative_variance_error(acc.window[s], Nd, spec.sigma2));
      }
      if (R >= 2 && W > R + 1) run.window_peak = lag_peak(run.window_rel_error, R);

      art.manifest()["seeds"]["runs"].push_back(
          {{"h", h}, {"scheme", std::string(to_string(policy))}, {"seed", run.seed},
           {"length", length_json(run.length)}, {"unscaled_step", cfg.step_size}});
      res.runs.push_back(std::move(run));
    }
  }

  if (art.enabled()) {
    auto phases = art.csv("model_problem_phases.csv", "model-problem-phases/1",
                          "h,scheme,phase,rel_error,standard_error,predicted");
    auto window = art.csv("model_problem_window.csv", "model-problem-window/1",
                          "h,scheme,k,phase,rel_error");
    auto summary = art.csv("model_problem_summary.csv", "model-problem-summary/1",
                           "h,scheme,epochs,iterations,capped,rel_error,standard_error,predicted,"
                           "time_rel_error,w2_predicted,acf_lag_R,lag_R_peak");
    auto closed = art.csv("model_problem_closed_form.csv", "model-problem-closed-form/1",
                          "h,ula,rm,rr_avg,rr_phase_min,rr_phase_max,w2_ula,w2_rm,w2_rr");
    for (int i = 0; i <= 60; ++i) {
      const double h = std::pow(10.0, -3.0 + 3.0 * i / 60.0) * (i == 60 ? 0.999 : 1.0);
      const ModelProblemParams params{h, R, Nd, res.V, spec.sigma2};
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t r = 0; r < R; ++r) {
        const double e = rr_rel_var_error_phase(h, r, R, Nd, res.V, spec.sigma2);
        lo = std::min(lo, e);
        hi = std::max(hi, e);
      }
      closed << h << ',' << ula_rel_var_error(h) << ',' << rm_rel_var_error(h, Nd, res.V, spec.sigma2)
             << ',' << rr_rel_var_error_avg(h, R, Nd, res.V, spec.sigma2) << ',' << lo << ',' << hi
             << ',' << asymptotic_w2(Scheme::kUla, params) << ','
             << asymptotic_w2(Scheme::kRobbinsMonro, params) << ','
             << asymptotic_w2(Scheme::kRandomReshuffling, params) << '\n';
    }
    for (const auto& run : res.runs) {
      const auto name = to_string(run.policy);
      for (std::size_t r = 0; r < run.phases.size(); ++r) {
        phases << run.h << ',' << name << ',' << r << ',' << run.phases[r].rel_error << ','
               << run.phases[r].standard_error << ',' << run.phases[r].predicted << '\n';
      }
      for (std::size_t s = 0; s < run.window_steps.size(); ++s) {
        window << run.h << ',' << name << ',' << run.window_steps[s] << ','
               << run.window_steps[s] % R << ',' << run.window_rel_error[s] << '\n';
      }
      const ModelProblemParams params{run.h, R, Nd, res.V, spec.sigma2};
      summary << run.h << ',' << name << ',' << run.length.epochs << ',' << run.length.iterations
              << ',' << run.length.capped << ',' << run.average.rel_error << ','
              << run.average.standard_error << ',' << run.average.predicted << ','
              << run.time_rel_error << ',' << asymptotic_w2(scheme_of(run.policy), params) << ','
              << run.window_peak.acf_at_lag << ',' << run.window_peak.detected << '\n';
    }
  }
  art.finish();
  return res;
}

// ---------------------------------------------------------------------------
// Logistic regression

namespace {

struct LogregAcc {
  std::vector<VectorMoments> checkpoints;
  std::vector<VectorMoments> window;
  std::vector<VectorMoments> phase;

  void merge(const LogregAcc& o) {
    for (std::size_t c = 0; c < checkpoints.size(); ++c) checkpoints[c].merge(o.checkpoints[c]);
    for (std::size_t r = 0; r < phase.size(); ++r) phase[r].merge(o.phase[r]);
    for (std::size_t s = 0; s < window.size(); ++s) window[s].merge(o.window[s]);
  }
};

std::vector<std::size_t> checkpoint_counts(std::size_t epochs, std::size_t R) {
  std::vector<std::size_t> out;
  const std::size_t points = 40;
  for (std::size_t p = 0; p < points; ++p) {
    const double e = std::pow(static_cast<double>(epochs), static_cast<double>(p) / (points - 1));
    const std::size_t c = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(e))) * R;
    if (out.empty() || c > out.back()) out.push_back(std::min(c, epochs * R));
  }
  if (out.back() != epochs * R) out.push_back(epochs * R);
  return out;
}

LogisticRegressionModel truncate_rows(const LogisticRegressionModel& model, std::size_t keep) {
  std::vector<int> labels(model.labels().begin(), model.labels().begin() + static_cast<long>(keep));
  return LogisticRegressionModel(model.design().leftCols(static_cast<Eigen::Index>(keep)),
                                 std::move(labels), model.prior_variance());
}

}  // namespace

const LogregRun& LogregResult::find(Policy policy, double h) const {
  for (const auto& r : runs) {
    if (r.policy == policy && r.h == h) return r;
  }
  throw std::out_of_range("no logreg run for that policy and h");
}

LogregResult run_logreg(const ExperimentSpec& spec) {
  spec.validate();
  Artifacts art(spec);

  std::optional<LogisticRegressionModel> loaded;
  if (spec.dataset.empty()) {
    SimData sim = generate_simdata(spec.seed, spec.sim_rows, spec.sim_features);
    if (art.enabled()) write_simdata(art.dir() / "simdata.csv", sim);
    art.manifest()["dataset"] = {{"source", "simdata"},
                                 {"rows", spec.sim_rows},
                                 {"features", spec.sim_features},
                                 {"seed", spec.seed}};
    loaded.emplace(std::move(sim.model));
  } else {
    CsvOptions opts;
    opts.label_column = spec.label_column;
    opts.has_header = spec.has_header;
    opts.standardize = spec.standardize;
    auto ds = load_dataset_csv(spec.dataset, opts);
    art.manifest()["dataset"] = {{"source", spec.dataset},
                                 {"rows_read", ds.rows_read},
                                 {"columns", ds.columns},
                                 {"standardized", spec.standardize}};
    loaded.emplace(std::move(ds.model));
  }

  std::size_t n = spec.n ? spec.n : loaded->size() / spec.R;
  if (n == 0) throw std::invalid_argument("logreg: dataset smaller than R");
  const std::size_t keep = loaded->size() / n * n;
  if (keep != loaded->size()) {
    std::cerr << "warning: dropping " << loaded->size() - keep << " of " << loaded->size()
              << " rows so that the batch size " << n << " divides the dataset\n";
    loaded.emplace(truncate_rows(*loaded, keep));
  }
  const LogisticRegressionModel& model = *loaded;

  LogregResult res;
  res.N = model.size();
  res.d = model.dimension();
  res.n = n;
  res.R = res.N / n;
  const std::size_t R = res.R;

  res.mode = find_mode(model);
  {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(model.hessian(res.mode));
    res.curvature_at_mode = eig.eigenvalues().maxCoeff();
  }

  res.hmc_leapfrog = spec.hmc_leapfrog;
  const std::uint64_t hmc_seed = derive_seed(spec.seed, {stream::kHmc});
  res.hmc_step = spec.hmc_step > 0.0
                     ? spec.hmc_step
                     : tune_hmc_step(model, res.mode, spec.hmc_leapfrog,
                                     1.0 / std::sqrt(res.curvature_at_mode), hmc_seed)
                           .step_size;
  HmcConfig hmc;
  hmc.step_size = res.hmc_step;
  hmc.leapfrog_steps = spec.hmc_leapfrog;
  hmc.samples = spec.hmc_samples;
  hmc.burn_in = spec.hmc_burn_in;
  hmc.seed = hmc_seed;
  const HmcResult ref = hmc_run(model, res.mode, hmc);
  res.reference_mean = ref.moments.mean();
  res.hmc_acceptance = ref.acceptance_rate;
  res.hmc_divergences = ref.divergences;
  res.hmc_acceptance_flagged = ref.acceptance_rate < 0.4 || ref.acceptance_rate > 0.95;
  if (res.hmc_acceptance_flagged) {
    std::cerr << "warning: HMC acceptance rate " << ref.acceptance_rate
              << " outside [0.4, 0.95]; the reference mean may be unreliable\n";
  }
  const double ref_norm = res.reference_mean.norm();

  art.manifest()["derived"] = {
      {"N", res.N}, {"d", res.d}, {"n", n}, {"R", R},
      {"curvature_at_mode", res.curvature_at_mode},
      {"hmc", {{"step_size", res.hmc_step},
               {"leapfrog_steps", res.hmc_leapfrog},
               {"samples", spec.hmc_samples},
               {"acceptance_rate", res.hmc_acceptance},
               {"divergences", res.hmc_divergences},
               {"acceptance_flagged", res.hmc_acceptance_flagged},
               {"seed", hmc_seed}}}};

  for (std::size_t hi = 0; hi < spec.h.size(); ++hi) {
    const double h = spec.h[hi];
    for (Policy policy : spec.policies) {
      LogregRun run;
      run.policy = policy;
      run.h = h;
      run.length = run_length(spec, h, R);
      run.seed = derive_seed(spec.seed, {200 + hi, policy_id(policy)});

      SamplerConfig cfg;
      cfg.step_size = h;
      cfg.iterations = run.length.iterations;
      cfg.burn_in = run.length.burn_in;
      cfg.policy = policy;
      cfg.batch_size = n;
      cfg.seed = run.seed;
      cfg.realizations = spec.realizations;
      cfg.validate(model.size());

      const std::size_t K = cfg.iterations;
      const std::size_t W = std::min(spec.window_epochs * R, K - cfg.burn_in);
      const std::size_t window_start = K - W;
      const std::size_t burn = cfg.burn_in;
      const auto checkpoints = checkpoint_counts(run.length.epochs, R);
      const std::size_t d = res.d;

      const auto acc = parallel_reduce<LogregAcc>(
          spec.realizations,
          [&] {
            return LogregAcc{std::vector<VectorMoments>(checkpoints.size(), VectorMoments(d)),
                             std::vector<VectorMoments>(W, VectorMoments(d)),
                             std::vector<VectorMoments>(R, VectorMoments(d))};
          },
          [&](std::size_t j, LogregAcc& a) {
            auto schedule = realization_schedule(cfg, model.size(), j);
            auto noise = realization_noise(cfg, j);
            Vector sum = Vector::Zero(static_cast<Eigen::Index>(d));
            std::vector<Vector> phase_sum(R, Vector::Zero(static_cast<Eigen::Index>(d)));
            std::size_t count = 0;
            std::size_t next_checkpoint = 0;
            run_chain(model, cfg, schedule, noise, res.mode,
                      [&](std::size_t k, std::size_t, const Vector& x) {
                        if (k <= burn) return;
                        sum += x;
                        phase_sum[k % R] += x;
                        ++count;
                        if (next_checkpoint < checkpoints.size() &&
                            count == checkpoints[next_checkpoint]) {
                          a.checkpoints[next_checkpoint++].add(sum / static_cast<double>(count));
                        }
                        if (k > window_start) a.window[k - window_start - 1].add(x);
                      });
            const double per_phase = static_cast<double>(count / R);
            for (std::size_t r = 0; r < R; ++r) a.phase[r].add(phase_sum[r] / per_phase);
          },
          spec.threads);

      for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        run.trajectory_samples.push_back(checkpoints[c]);
        run.trajectory_rel_error.push_back(
            relative_mean_error(acc.checkpoints[c].mean(), res.reference_mean));
      }
      for (std::size_t r = 0; r < R; ++r) {
        run.phase_rel_error.push_back(relative_mean_error(acc.phase[r].mean(), res.reference_mean));
      }
      const auto& last = acc.checkpoints.back();
      run.final_rel_error = relative_mean_error(last.mean(), res.reference_mean);
      run.final_standard_error =
          std::sqrt(last.variance().sum() / static_cast<double>(last.count())) / ref_norm;
      for (std::size_t s = 0; s < W; ++s) {
        run.window_steps.push_back(window_start + 1 + s);
        run.window_rel_error.push_back(relative_mean_error(acc.window[s].mean(), res.reference_mean));
      }
      if (R >= 2 && W > R + 1) run.window_peak = lag_peak(run.window_rel_error, R);

      art.manifest()["seeds"]["runs"].push_back({{"h", h},
                                                 {"scheme", std::string(to_string(policy))},
                                                 {"seed", run.seed},
                                                 {"length", length_json(run.length)}});
      res.runs.push_back(std::move(run));
    }
  }

  if (art.enabled()) {
    auto traj = art.csv("logreg_trajectory.csv", "logreg-trajectory/1", "h,scheme,samples,rel_error");
    auto window = art.csv("logreg_window.csv", "logreg-window/1", "h,scheme,k,phase,rel_error");
    auto phases = art.csv("logreg_phases.csv", "logreg-phases/1", "h,scheme,phase,rel_error");
    auto summary = art.csv("logreg_summary.csv", "logreg-summary/1",
                           "h,scheme,epochs,iterations,capped,final_rel_error,standard_error,"
                           "acf_lag_R,lag_R_peak");
    auto ref_csv = art.csv("logreg_reference.csv", "logreg-reference/1", "coordinate,mode,mean");
    for (Eigen::Index j = 0; j < res.reference_mean.size(); ++j) {
      ref_csv << j << ',' << res.mode[j] << ',' << res.reference_mean[j] << '\n';
    }
    for (const auto& run : res.runs) {
      const auto name = to_string(run.policy);
      for (std::size_t r = 0; r < run.phase_rel_error.size(); ++r) {
        phases << run.h << ',' << name << ',' << r << ',' << run.phase_rel_error[r] << '\n';
      }
      for (std::size_t c = 0; c < run.trajectory_samples.size(); ++c) {
        traj << run.h << ',' << name << ',' << run.trajectory_samples[c] << ','
             << run.trajectory_rel_error[c] << '\n';
      }
      for (std::size_t s = 0; s < run.window_steps.size(); ++s) {
        window << run.h << ',' << name << ',' << run.window_steps[s] << ','
               << run.window_steps[s] % R << ',' << run.window_rel_error[s] << '\n';
      }
      summary << run.h << ',' << name << ',' << run.length.epochs << ',' << run.length.iterations
              << ',' << run.length.capped << ',' << run.final_rel_error << ','
              << run.final_standard_error << ',' << run.window_peak.acf_at_lag << ','
              << run.window_peak.detected << '\n';
    }
  }
  art.finish();
  return res;
}

// ---------------------------------------------------------------------------
// Bounds

namespace {

std::vector<Vector> draw_target_samples(const GaussianMeanModel& model, std::size_t count,
                                        std::uint64_t seed) {
  Engine rng(derive_seed(seed, {stream::kInit}));
  std::normal_distribution<double> normal(model.mean(), std::sqrt(model.target_variance()));
  std::vector<Vector> q;
  for (std::size_t i = 0; i < count; ++i) q.push_back(Vector::Constant(1, normal(rng)));
  return q;
}

}  // namespace

BoundsResult run_bounds_sweep(const ExperimentSpec& spec) {
  spec.validate();
  Artifacts art(spec);
  BoundsResult res;
  BoundParams& base = res.base;
  base.initial_distance = spec.initial_distance;
  base.R = static_cast<double>(spec.R);

  if (spec.mu <= 0.0 || spec.L <= 0.0) {
    // Gaussian model problem in preconditioned time: grad F is scaled by
    // sigma^2 / N, so mu = L = 1 and sigma* shrinks by the same factor.
    const std::size_t N = spec.N ? spec.N : 20 * spec.R;
    const std::size_t n = spec.n ? spec.n : N / spec.R;
    const GaussianMeanModel model(draw_gaussian_data(N, spec.seed), spec.sigma2);
    const auto q = draw_target_samples(model, 16, spec.seed);
    const double s = std::sqrt(sigma_star_exact(model, q, n).sigma_star_sq) / model.curvature();
    base.mu = 1.0;
    base.L = 1.0;
    base.L1 = 0.0;
    base.d = 1.0;
    base.sigma_star = spec.sigma_star >= 0.0 ? spec.sigma_star : s;
    art.manifest()["derived"] = {{"source", "gaussian-model-problem"}, {"N", N}, {"n", n},
                                 {"sigma_star_preconditioned", s}};
  } else {
    base.mu = spec.mu;
    base.L = spec.L;
    base.L1 = spec.L1;
    base.d = spec.d;
    base.sigma_star = std::max(spec.sigma_star, 0.0);
    art.manifest()["derived"] = {{"source", "spec"}};
  }
  art.manifest()["derived"]["constants"] = {{"mu", base.mu}, {"L", base.L}, {"L1", base.L1},
                                            {"d", base.d}, {"sigma_star", base.sigma_star},
                                            {"initial_distance", base.initial_distance}};

  const std::vector<double> Rs =
      spec.R_grid.empty() ? std::vector<double>{static_cast<double>(spec.R)} : spec.R_grid;
  for (Theorem t : kAllTheorems) {
    for (double R : Rs) {
      for (double h : spec.h) {
        for (double K : spec.K_grid) {
          BoundParams p = base;
          p.h = h;
          p.R = R;
          p.K = K;
          BoundCell cell{t, h, R, K, is_admissible(t, p), std::numeric_limits<double>::quiet_NaN()};
          if (cell.admissible) cell.value = theorem_bound(t, p);
          res.cells.push_back(cell);
        }
      }
    }
  }

  for (Theorem t : kAllTheorems) {
    std::vector<double> eps_ok, K_ok;
    for (double eps : spec.eps_grid) {
      try {
        const auto s = steps_to_epsilon(t, base, eps);
        res.epsilon.push_back({t, eps, s.h, s.K});
        if (s.K > 0.0) {
          eps_ok.push_back(eps);
          K_ok.push_back(s.K);
        }
      } catch (const std::domain_error&) {
      }
    }
    double slope = std::numeric_limits<double>::quiet_NaN();
    if (eps_ok.size() >= 2) slope = loglog_slope(eps_ok, K_ok);
    res.epsilon_slopes.emplace_back(t, slope);
  }

  if (art.enabled()) {
    auto cells = art.csv("bounds.csv", "bounds/1", "theorem,h,R,K,admissible,value");
    for (const auto& c : res.cells) {
      cells << to_string(c.theorem) << ',' << c.h << ',' << c.R << ',';
      if (std::isinf(c.K)) cells << "inf"; else cells << c.K;
      cells << ',' << c.admissible << ',';
      if (c.admissible) cells << c.value; else cells << "inadmissible";
      cells << '\n';
    }
    auto eps = art.csv("bounds_epsilon.csv", "bounds-epsilon/1", "theorem,eps,h,K");
    for (const auto& e : res.epsilon) {
      eps << to_string(e.theorem) << ',' << e.eps << ',' << e.h << ',' << e.K << '\n';
    }
    nlohmann::json slopes;
    for (const auto& [t, s] : res.epsilon_slopes) {
      slopes[std::string(to_string(t))] = std::isfinite(s) ? nlohmann::json(s) : nlohmann::json();
    }
    art.manifest()["steps_to_epsilon_slopes"] = slopes;
  }
  art.finish();
  return res;
}

// ---------------------------------------------------------------------------
// Variance identities

bool VarianceCheckResult::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
}

VarianceCheckResult run_variance_check(const ExperimentSpec& spec) {
  spec.validate();
  Artifacts art(spec);
  VarianceCheckResult res;
  res.N = spec.N ? spec.N : 20 * spec.R;
  res.n = spec.n ? spec.n : res.N / spec.R;
  if (res.n == 0 || res.N % res.n != 0) throw std::invalid_argument("variance check: n must divide N");
  const std::size_t R = res.N / res.n;
  constexpr double kTolerance = 1e-10;
  constexpr double kSigmas = 4.0;

  const GaussianMeanModel model(draw_gaussian_data(res.N, spec.seed), spec.sigma2);
  const auto q = draw_target_samples(model, 16, spec.seed);
  auto exact_check = [&](std::string name, double measured, double predicted) {
    IdentityCheck c{std::move(name), measured, predicted, 0.0, true, false};
    c.passed = std::abs(measured - predicted) <= kTolerance * std::max(1.0, std::abs(predicted));
    return c;
  };
  auto mc_check = [&](std::string name, double measured, double predicted, double se) {
    IdentityCheck c{std::move(name), measured, predicted, se, false, false};
    c.passed = std::abs(measured - predicted) <= kSigmas * se ||
               std::abs(measured - predicted) <= kTolerance * std::max(1.0, std::abs(predicted));
    return c;
  };

  const double formula = sigma_star_exact(model, q, res.n).sigma_star_sq;
  if (binomial(res.N, res.n) <= 2e5) {
    res.checks.push_back(exact_check("sigma_star_sq", sigma_star_enumerated(model, q, res.n), formula));
  } else {
    const std::size_t per_q = std::max<std::size_t>(2, spec.mc_draws / q.size());
    const auto mc = sigma_star_monte_carlo(model, q, res.n, per_q, derive_seed(spec.seed, {300}));
    res.checks.push_back(mc_check("sigma_star_sq", mc.mean, formula, mc.standard_error));
  }

  if (R >= 2) {
    const auto cov = within_epoch_covariance(model.data(), res.n, derive_seed(spec.seed, {301}),
                                             spec.mc_draws);
    if (cov.enumerated) {
      res.checks.push_back(exact_check("within_epoch_covariance", cov.covariance, cov.predicted));
      res.checks.push_back(
          exact_check("batch_mean_variance", cov.batch_variance, cov.batch_variance_closed_form));
    } else {
      res.checks.push_back(
          mc_check("within_epoch_covariance", cov.covariance, cov.predicted, cov.covariance_se));
      res.checks.push_back(mc_check("batch_mean_variance", cov.batch_variance,
                                    cov.batch_variance_closed_form, cov.batch_variance_se));
    }
  } else {
    // A single batch per epoch: no distinct same-epoch batches and a batch
    // mean that always equals ybar.
    res.checks.push_back(exact_check("within_epoch_covariance", 0.0, 0.0));
    res.checks.push_back(
        exact_check("batch_mean_variance", 0.0, batch_mean_variance(model.data(), res.n)));
  }

  art.manifest()["derived"] = {{"N", res.N}, {"n", res.n}, {"R", R}, {"q_samples", q.size()}};
  if (art.enabled()) {
    auto out = art.csv("variance_check.csv", "variance-check/1",
                       "identity,measured,predicted,standard_error,mode,passed");
    for (const auto& c : res.checks) {
      out << c.name << ',' << c.measured << ',' << c.predicted << ',' << c.standard_error << ','
          << (c.enumerated ? "enumeration" : "monte-carlo") << ',' << c.passed << '\n';
    }
    art.manifest()["all_passed"] = res.all_passed();
  }
  art.finish();
  return res;
}

}  // namespace rrsgld
