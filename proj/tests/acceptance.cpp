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

// Acceptance report: one PASS/FAIL line per criterion, followed by indented
// detail lines. The exit status is nonzero only when a check could not run.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rrsgld/batching.hpp"
#include "rrsgld/bounds.hpp"
#include "rrsgld/diagnostics.hpp"
#include "rrsgld/experiments.hpp"
#include "rrsgld/gaussian_analytics.hpp"
#include "rrsgld/model.hpp"
#include "rrsgld/rng.hpp"
#include "rrsgld/samplers.hpp"

using namespace rrsgld;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "ok   " : "FAIL ") + what);
  }
  void info(const std::string& what) { details.push_back("info " + what); }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

const std::vector<double> kModelH = {0.1, 0.2, 0.4};

const ModelProblemResult& model_problem(const std::string& out) {
  static const ModelProblemResult result = [&] {
    ExperimentSpec s;
    s.kind = ExperimentKind::kModelProblem;
    s.h = kModelH;
    s.R = 8;
    s.N = 160;
    s.sigma2 = 1.0;
    s.realizations = 1000;
    if (!out.empty()) s.out = out + "/model_problem";
    return run_model_problem(s);
  }();
  return result;
}

Outcome closed_form_vs_simulation(const std::string& out) {
  Outcome o;
  const auto& mp = model_problem(out);
  for (double h : kModelH) {
    for (Policy p : {Policy::kFullBatch, Policy::kRobbinsMonro}) {
      const auto& e = mp.find(p, h).average;
      const double z = (e.rel_error - e.predicted) / e.standard_error;
      o.require(std::abs(z) <= 3.0, fmt("%-4s h=%.2f  sim %.4f +- %.4f  closed form %.4f  z=%+.2f",
                                        std::string(to_string(p)).c_str(), h, e.rel_error,
                                        e.standard_error, e.predicted, z));
    }
    const auto& rr = mp.find(Policy::kRandomReshuffling, h);
    double worst = 0.0;
    std::size_t within = 0;
    for (const auto& e : rr.phases) {
      const double z = (e.rel_error - e.predicted) / e.standard_error;
      worst = std::max(worst, std::abs(z));
      within += std::abs(z) <= 3.0;
    }
    o.require(within == rr.phases.size(),
              fmt("rr   h=%.2f  %zu/%zu phases within 3 SE (max |z| %.2f)", h, within,
                  rr.phases.size(), worst));
  }
  return o;
}

Outcome bias_order(const std::string& out) {
  Outcome o;
  const std::size_t R = 8;
  const double N = 160, sigma2 = 1.0, V = R * sigma2 / N;
  const std::vector<double> hs = {0.025, 0.05, 0.1, 0.2};
  std::vector<double> rm, rr;
  for (double h : hs) {
    rm.push_back(rm_rel_var_error(h, N, V, sigma2) - ula_rel_var_error(h));
    rr.push_back(rr_rel_var_error_avg(h, R, N, V, sigma2) - ula_rel_var_error(h));
  }
  const double s_rm = loglog_slope(hs, rm), s_rr = loglog_slope(hs, rr);
  o.require(std::abs(s_rm - 1.0) <= 0.2, fmt("closed form slope of rm - ula: %.3f (1 +- 0.2)", s_rm));
  o.require(std::abs(s_rr - 2.0) <= 0.2, fmt("closed form slope of rr - ula: %.3f (2 +- 0.2)", s_rr));

  const auto& mp = model_problem(out);
  std::vector<double> sim_h, sim_rm, sim_rr;
  for (double h : {0.1, 0.2}) {
    const auto& ula = mp.find(Policy::kFullBatch, h).average;
    for (Policy p : {Policy::kRobbinsMonro, Policy::kRandomReshuffling}) {
      const auto& e = mp.find(p, h).average;
      const double diff = e.rel_error - ula.rel_error;
      const double pred = e.predicted - ula.predicted;
      const double se = std::hypot(e.standard_error, ula.standard_error);
      o.require(std::abs(diff - pred) <= 3.0 * se,
                fmt("simulated %s - ula at h=%.1f: %.4f +- %.4f vs %.4f",
                    std::string(to_string(p)).c_str(), h, diff, se, pred));
      (p == Policy::kRobbinsMonro ? sim_rm : sim_rr).push_back(diff);
    }
    sim_h.push_back(h);
  }
  if (sim_rm[0] > 0 && sim_rm[1] > 0 && sim_rr[0] > 0 && sim_rr[1] > 0) {
    o.info(fmt("simulated two-point slopes: rm - ula %.2f, rr - ula %.2f",
               loglog_slope(sim_h, sim_rm), loglog_slope(sim_h, sim_rr)));
  }
  return o;
}

Outcome periodicity(const std::string& out) {
  Outcome o;
  const auto& mp = model_problem(out);
  for (double h : kModelH) {
    const auto& rr = mp.find(Policy::kRandomReshuffling, h);
    std::vector<double> pred;
    for (const auto& e : rr.phases) pred.push_back(e.predicted);
    std::sort(pred.begin(), pred.end());
    std::size_t distinct = 1;
    for (std::size_t i = 1; i < pred.size(); ++i) {
      distinct += pred[i] - pred[i - 1] > 1e-12 * std::abs(pred[i]);
    }
    o.require(distinct == mp.R, fmt("h=%.1f: %zu distinct rr phase values for R=%zu", h, distinct, mp.R));
    const auto& pr = rr.window_peak;
    o.require(pr.detected, fmt("h=%.1f: rr window acf at lag R %.3f (threshold %.3f, local max %d)", h,
                               pr.acf_at_lag, pr.threshold, pr.local_maximum));
    const auto& pm = mp.find(Policy::kRobbinsMonro, h).window_peak;
    o.require(!pm.detected, fmt("h=%.1f: rm window acf at lag R %.3f (threshold %.3f, local max %d)", h,
                                pm.acf_at_lag, pm.threshold, pm.local_maximum));
  }
  return o;
}

Outcome variance_identities() {
  Outcome o;
  std::size_t cases = 0, sigma_ok = 0, cov_cases = 0, cov_ok = 0;
  double worst_sigma = 0.0, worst_cov = 0.0;
  for (std::size_t N = 2; N <= 10; ++N) {
    const GaussianMeanModel model(draw_gaussian_data(N, 1000 + N), 1.0);
    std::mt19937_64 rng(N);
    std::normal_distribution<double> q_dist(model.mean(), std::sqrt(model.target_variance()));
    std::vector<Vector> q;
    for (int i = 0; i < 5; ++i) q.push_back(Vector::Constant(1, q_dist(rng)));
    for (std::size_t n = 1; n <= N; ++n) {
      if (N % n) continue;
      ++cases;
      const double exact = sigma_star_exact(model, q, n).sigma_star_sq;
      const double R = static_cast<double>(N / n);
      const double c_g = sigma_star_exact(model, q, n).c_g;
      const double lemma = (R - 1.0) / (static_cast<double>(N) - 1.0) * c_g;
      const double enumerated = sigma_star_enumerated(model, q, n);
      const double err = std::max(std::abs(enumerated - lemma), std::abs(exact - lemma)) /
                         std::max(1.0, std::abs(lemma));
      worst_sigma = std::max(worst_sigma, err);
      sigma_ok += err <= 1e-10;
      if (N <= 8 && N / n >= 2) {
        ++cov_cases;
        const auto cov = within_epoch_covariance(model.data(), n);
        const double cerr = std::abs(cov.covariance - cov.predicted);
        worst_cov = std::max(worst_cov, cerr);
        cov_ok += cov.enumerated && cerr <= 1e-12;
      }
    }
  }
  o.require(sigma_ok == cases,
            fmt("sigma*^2 enumeration = ((R-1)/(N-1)) C_G in %zu/%zu (N, n) cases, max rel error %.2e",
                sigma_ok, cases, worst_sigma));
  o.require(cov_ok == cov_cases,
            fmt("within-epoch covariance = -V/(R-1) in %zu/%zu cases with N <= 8, max error %.2e",
                cov_ok, cov_cases, worst_cov));
  return o;
}

Outcome contraction() {
  Outcome o;
  const std::size_t N = 160, R = 8;
  const GaussianMeanModel model(draw_gaussian_data(N, 5), static_cast<double>(N));
  // sigma^2 = N makes the curvature N / sigma^2 = 1, so mu = L = 1 without rescaling.
  const double h = 0.1;
  SamplerConfig c;
  c.step_size = h;
  c.iterations = 13 * R;
  c.policy = Policy::kRandomReshuffling;
  c.batch_size = N / R;
  c.seed = 77;
  c.realizations = 1000;
  const double d0 = 2.0;
  const auto ens = run_coupled_ensemble(model, c, Vector::Constant(1, model.mean() + 1.0),
                                        Vector::Constant(1, model.mean() - 1.0));
  for (std::size_t k : {10u, 50u, 100u}) {
    const double bound = std::pow(1.0 - h, k / 2.0) * d0;
    const double rms = ens.rms(k), se = ens.rms_standard_error(k);
    const double rel_se = rms > 0.0 ? se / rms : 0.0;
    o.require(rms <= bound * (1.0 + 3.0 * rel_se),
              fmt("k=%3zu  rms distance %.4e (se %.1e) <= %.4e", k, rms, se, bound));
  }

  // Exact Ornstein-Uhlenbeck transitions from stationarity (mu = L = 1, d = 1).
  std::mt19937_64 rng(78);
  std::normal_distribution<double> z;
  for (double t : {0.1, 0.5, 1.0}) {
    RunningMoments sq;
    const double decay = std::exp(-t), spread = std::sqrt(1.0 - decay * decay);
    for (int j = 0; j < 100000; ++j) {
      const double x0 = z(rng);
      const double xt = decay * x0 + spread * z(rng);
      sq.add((xt - x0) * (xt - x0));
    }
    const double analytic = std::sqrt(2.0 * (1.0 - decay));
    const double bound = stationary_increment_bound(t, 1.0, 1.0);
    const double mc = std::sqrt(sq.mean());
    o.require(analytic <= bound && mc <= bound,
              fmt("t=%.1f  increment rms %.4f (exact %.4f) <= %.4f", t, mc, analytic, bound));
  }
  return o;
}

Outcome epoch_average_expansion() {
  Outcome o;
  const std::size_t R = 8;
  const double N = 160, sigma2 = 1.0, V = R * sigma2 / N;
  const std::vector<double> hs = {0.04, 0.02, 0.01};
  std::vector<double> literal, corrected;
  for (double h : hs) {
    const double exact = rr_rel_var_error_avg(h, R, N, V, sigma2);
    const double quarter = h / 2 + h * h / 4 + N * V * h * h * (R + 1.0) / (4.0 * sigma2);
    literal.push_back(std::abs(exact - quarter));
    corrected.push_back(std::abs(exact - rr_rel_var_error_avg_expansion(h, R, N, V, sigma2)));
  }
  const double s = loglog_slope(hs, literal);
  o.require(std::abs(s - 3.0) <= 0.3,
            fmt("residual slope with coefficient (R+1)/4: %.3f (3 +- 0.3)", s));
  o.info(fmt("residual slope with coefficient (R+1)/6: %.3f", loglog_slope(hs, corrected)));
  return o;
}

Outcome logistic_ordering(const std::string& out) {
  Outcome o;
  ExperimentSpec s;
  s.kind = ExperimentKind::kLogreg;
  s.h = {0.001, 0.002};
  s.R = 8;
  s.sim_rows = 256;
  s.sim_features = 10;
  s.realizations = 100;
  s.max_iterations = 100000;
  s.hmc_samples = 100000;
  if (!out.empty()) s.out = out + "/logreg";
  const auto r = run_logreg(s);
  o.info(fmt("N=%zu d=%zu n=%zu R=%zu, hmc step %.4f acceptance %.3f", r.N, r.d, r.n, r.R,
             r.hmc_step, r.hmc_acceptance));
  for (double h : s.h) {
    const auto& ula = r.find(Policy::kFullBatch, h);
    const auto& rm = r.find(Policy::kRobbinsMonro, h);
    const auto& rr = r.find(Policy::kRandomReshuffling, h);
    const std::string line =
        fmt("h=%.3f  ula %.4f  rr %.4f  rm %.4f  (se %.4f / %.4f / %.4f)", h, ula.final_rel_error,
            rr.final_rel_error, rm.final_rel_error, ula.final_standard_error,
            rr.final_standard_error, rm.final_standard_error);
    if (h == s.h.front()) {
      o.require(ula.final_rel_error <= rr.final_rel_error && rr.final_rel_error < rm.final_rel_error,
                "ordering ula <= rr < rm at " + line);
    } else {
      o.info(line);
    }
    const auto& p = rr.window_peak;
    o.require(p.detected, fmt("h=%.3f: rr window acf at lag R %.3f (threshold %.3f, local max %d)", h,
                              p.acf_at_lag, p.threshold, p.local_maximum));
    double lo = rr.phase_rel_error.front(), hi = lo;
    for (double v : rr.phase_rel_error) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    o.info(fmt("h=%.3f: rr per-phase error range [%.5f, %.5f]", h, lo, hi));
  }
  return o;
}

Outcome epsilon_slopes(const std::string& out) {
  Outcome o;
  ExperimentSpec s;
  s.kind = ExperimentKind::kBounds;
  s.h = {0.01};
  if (!out.empty()) s.out = out + "/bounds";
  const auto r = run_bounds_sweep(s);
  o.info(fmt("mu=%.3g L=%.3g d=%.3g R=%.3g sigma*=%.4g", r.base.mu, r.base.L, r.base.d, r.base.R,
             r.base.sigma_star));
  for (const auto& [t, slope] : r.epsilon_slopes) {
    if (t == Theorem::kSgldRmB) {
      o.require(std::abs(slope + 2.0) <= 0.1, fmt("sgld-rm-b steps-to-eps slope %.3f (-2 +- 0.1)", slope));
    } else if (t == Theorem::kSgldRrB) {
      o.require(std::abs(slope + 1.0) <= 0.1, fmt("sgld-rr-b steps-to-eps slope %.3f (-1 +- 0.1)", slope));
    }
  }
  if (o.details.size() < 3) o.require(false, "slopes for both theorems were produced");
  return o;
}

Outcome gradients() {
  Outcome o;
  const auto sim = generate_simdata(31, 256, 10);
  const auto& m = sim.model;
  const std::size_t d = m.dimension();
  std::mt19937_64 rng(32);
  std::normal_distribution<double> z;
  std::uniform_int_distribution<std::size_t> pick(0, m.size() - 1);
  double worst = 0.0;
  for (int point = 0; point < 20; ++point) {
    Vector x(d);
    for (std::size_t j = 0; j < d; ++j) x[j] = z(rng);
    for (int t = 0; t < 5; ++t) {
      const std::size_t i = pick(rng);
      const Vector g = m.term_gradient(i, x);
      Vector fd(d);
      for (std::size_t j = 0; j < d; ++j) {
        const double step = 1e-5 * std::max(1.0, std::abs(x[j]));
        Vector xp = x, xm = x;
        xp[j] += step;
        xm[j] -= step;
        fd[j] = (m.term_potential(i, xp) - m.term_potential(i, xm)) / (2 * step);
      }
      worst = std::max(worst, (g - fd).norm() / g.norm());
    }
  }
  o.require(worst <= 1e-5, fmt("per-term gradients vs central differences at 20 points: max rel error %.2e", worst));

  // Reduction lattice on whole chains driven by identical noise.
  const double h = 1e-3;
  const std::size_t K = 64;
  const Vector x0 = sim.x_true * 0.5;
  SamplerConfig full;
  full.step_size = h;
  full.iterations = K;
  full.policy = Policy::kFullBatch;
  full.batch_size = m.size();
  full.seed = 33;
  auto sched = realization_schedule(full, m.size(), 0);
  auto noise = realization_noise(full, 0);
  const auto sgld = run_chain(m, full, sched, noise, x0);
  auto ula_noise = realization_noise(full, 0);
  Vector x = x0, y = x0;
  bool ula_same = true, gd_same = true, sgd_same = true;
  Vector xi(d);
  for (std::size_t k = 1; k <= K; ++k) {
    ula_noise.fill({xi.data(), d});
    x = ula_step(x, m, h, xi);
    ula_same = ula_same && x == sgld.iterates[k];
    const Vector g = gd_step(y, m, h);
    gd_same = gd_same && g == ula_step(y, m, h, Vector::Zero(d));
    sgd_same = sgd_same && sgd_step(y, m.gradient(y), h) == g;
    y = g;
  }
  o.require(ula_same, "full-batch sgld equals ula step for step");
  o.require(gd_same, "ula with zero noise equals gd step for step");
  o.require(sgd_same, "sgd with the full gradient equals gd step for step");

  SamplerConfig quiet = full;
  quiet.langevin = false;
  auto qs = realization_schedule(quiet, m.size(), 0);
  auto qn = realization_noise(quiet, 0);
  o.require(run_chain(m, quiet, qs, qn, x0).iterates.back() == y,
            "noise-free full-batch chain equals gd");
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rrsgld acceptance report"};
  std::vector<int> only;
  std::string out;
  app.add_option("--only", only, "Criteria to run (default: all)");
  app.add_option("--out", out, "Directory for experiment artifacts (default: none)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"closed-form vs simulation (model problem, R=8, N=160, M=1000)",
       [&] { return closed_form_vs_simulation(out); }},
      {"order of the stochastic-gradient bias in h", [&] { return bias_order(out); }},
      {"phase periodicity of reshuffling", [&] { return periodicity(out); }},
      {"exact batch-variance identities", [] { return variance_identities(); }},
      {"coupled contraction and increment bound", [] { return contraction(); }},
      {"epoch-average expansion residual", [] { return epoch_average_expansion(); }},
      {"logistic regression ordering and periodicity", [&] { return logistic_ordering(out); }},
      {"steps-to-accuracy slopes of the bound evaluators", [&] { return epsilon_slopes(out); }},
      {"gradient correctness and reduction lattice", [] { return gradients(); }},
  };

  int passed = 0, ran = 0, errors = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.require(false, std::string("error: ") + e.what());
      ++errors;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    passed += o.pass;
    std::printf("%s criterion %d: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id,
                criteria[i].first.c_str(), secs);
    for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%d criteria passed\n", passed, ran);
  return errors ? 1 : 0;
}
