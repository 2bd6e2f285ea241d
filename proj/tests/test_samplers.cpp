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

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "rrsgld/bounds.hpp"
#include "rrsgld/ensemble.hpp"
#include "rrsgld/gaussian_analytics.hpp"
#include "rrsgld/samplers.hpp"
#include "test_util.hpp"

using namespace rrsgld;
using rrsgld::testing::random_vector;

namespace {

SamplerConfig config(double h, std::size_t K, Policy p, std::size_t n, std::uint64_t seed = 1) {
  SamplerConfig c;
  c.step_size = h;
  c.iterations = K;
  c.policy = p;
  c.batch_size = n;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_SUITE("samplers") {

TEST_CASE("single step rules") {
  std::mt19937_64 rng(1);
  const Vector x = random_vector(3, rng);
  const Vector g = random_vector(3, rng);
  const Vector z = random_vector(3, rng);
  const Vector zero = Vector::Zero(3);
  CHECK(sgld_step(x, zero, 0.1, zero) == x);
  CHECK(sgld_step(x, g, 0.1, zero) == sgd_step(x, g, 0.1));
  CHECK((sgld_step(x, g, 0.1, z) - (x - 0.1 * g + std::sqrt(0.2) * z)).norm() < 1e-15);

  const auto lr = rrsgld::testing::toy_logistic(8, 2, 3);
  CHECK(sgld_step(x, lr.gradient(x), 0.05, z) == ula_step(x, lr, 0.05, z));
  CHECK(ula_step(x, lr, 0.05, zero) == gd_step(x, lr, 0.05));
  CHECK(ula_step(x, lr, 0.0, zero) == x);
}

TEST_CASE("rescaled gaussian step") {
  const double sigma2 = 2.0;
  const GaussianMeanModel m(draw_gaussian_data(12, 4), sigma2);
  const double h = 0.3;
  const std::vector<std::size_t> batch{1, 4, 9};
  const double yb = (m.data()[1] + m.data()[4] + m.data()[9]) / 3.0;
  const Vector x = Vector::Constant(1, 0.8);
  const Vector xi = Vector::Constant(1, -1.1);
  const Vector next = sgld_step(x, m.batch_gradient(batch, x), m.unscaled_step(h), xi);
  const double expect = (1 - h) * 0.8 + h * yb + std::sqrt(sigma2) * std::sqrt(2 * h / 12.0) * -1.1;
  CHECK(next[0] == doctest::Approx(expect).epsilon(1e-14));

  const Vector at_mean = Vector::Constant(1, m.mean());
  CHECK(ula_step(at_mean, m, m.unscaled_step(h), Vector::Zero(1))[0] ==
        doctest::Approx(m.mean()).epsilon(1e-15));
}

TEST_CASE("config validation") {
  auto c = config(0.1, 10, Policy::kRandomReshuffling, 2);
  CHECK_NOTHROW(c.validate(10));
  c.iterations = 9;
  CHECK_THROWS_AS(c.validate(10), std::invalid_argument);
  c.iterations = 10;
  c.burn_in = 10;
  CHECK_THROWS_AS(c.validate(10), std::invalid_argument);
  c.burn_in = 0;
  c.step_size = 0.0;
  CHECK_THROWS_AS(c.validate(10), std::invalid_argument);
  c.step_size = 0.1;
  c.batch_size = 3;
  CHECK_THROWS_AS(c.validate(10), std::invalid_argument);
  CHECK(config(0.1, 4, Policy::kRandomReshuffling, 2).epoch_length(10) == 5);
  CHECK(config(0.1, 4, Policy::kFullBatch, 2).epoch_length(10) == 1);
}

TEST_CASE("chain bookkeeping") {
  const auto lr = rrsgld::testing::toy_logistic(12, 2, 5);
  auto c = config(0.01, 0, Policy::kRandomReshuffling, 3);
  auto s = realization_schedule(c, 12, 0);
  auto z = realization_noise(c, 0);
  const Vector x0 = Vector::Constant(3, 0.2);
  const auto empty = run_chain(lr, c, s, z, x0);
  CHECK(empty.size() == 1);
  CHECK(empty.iterates[0] == x0);

  c.iterations = 40;
  auto s2 = realization_schedule(c, 12, 0);
  auto z2 = realization_noise(c, 0);
  std::size_t calls = 0;
  run_chain(lr, c, s2, z2, x0, [&](std::size_t k, std::size_t r, const Vector&) {
    CHECK(k == calls);
    CHECK(r == k % 4);
    ++calls;
  });
  CHECK(calls == 41);

  c.thin = 5;
  auto s3 = realization_schedule(c, 12, 0);
  auto z3 = realization_noise(c, 0);
  const auto thinned = run_chain(lr, c, s3, z3, x0);
  CHECK(thinned.size() == 9);
  CHECK(thinned.phase(1) == 1);  // step 5
  CHECK(thinned.phase(4) == 0);  // step 20
}

TEST_CASE("identical seeds give identical traces") {
  const auto lr = rrsgld::testing::toy_logistic(12, 2, 5);
  for (Policy p : {Policy::kRobbinsMonro, Policy::kRandomReshuffling, Policy::kFullBatch}) {
    const auto c = config(0.02, 60, p, 4, 99);
    auto sa = realization_schedule(c, 12, 3);
    auto za = realization_noise(c, 3);
    auto sb = realization_schedule(c, 12, 3);
    auto zb = realization_noise(c, 3);
    const auto a = run_chain(lr, c, sa, za, Vector::Zero(3));
    const auto b = run_chain(lr, c, sb, zb, Vector::Zero(3));
    for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(a.iterates[i] == b.iterates[i]);
    auto sc = realization_schedule(c, 12, 4);
    auto zc = realization_noise(c, 4);
    CHECK(run_chain(lr, c, sc, zc, Vector::Zero(3)).iterates.back() != a.iterates.back());
  }
}

TEST_CASE("reduction lattice on whole chains") {
  const auto lr = rrsgld::testing::toy_logistic(10, 2, 8);
  const Vector x0 = Vector::Constant(3, -0.3);
  const double h = 0.01;
  const std::size_t K = 30;

  // Full-batch SGLD equals ULA driven by the same noise.
  auto full = config(h, K, Policy::kFullBatch, 10, 5);
  auto s = realization_schedule(full, 10, 0);
  auto z = realization_noise(full, 0);
  const auto sgld = run_chain(lr, full, s, z, x0);
  NoiseStream z_ula = realization_noise(full, 0);
  Vector x = x0;
  for (std::size_t k = 1; k <= K; ++k) {
    Vector xi(3);
    z_ula.fill({xi.data(), 3});
    x = ula_step(x, lr, h, xi);
    REQUIRE(x == sgld.iterates[k]);
  }

  // A Robbins-Monro batch of the whole dataset is the full gradient up to summation order.
  auto rm = config(h, K, Policy::kRobbinsMonro, 10, 5);
  auto srm = realization_schedule(rm, 10, 0);
  auto zrm = realization_noise(rm, 0);
  const auto all = run_chain(lr, rm, srm, zrm, x0);
  CHECK((all.iterates.back() - sgld.iterates.back()).norm() < 1e-12);

  // Switching the noise off turns SGLD into SGD and ULA into GD.
  auto sgd = config(h, K, Policy::kRandomReshuffling, 5, 5);
  sgd.langevin = false;
  auto s1 = realization_schedule(sgd, 10, 0);
  auto z1 = realization_noise(sgd, 0);
  const auto sgd_trace = run_chain(lr, sgd, s1, z1, x0);
  auto s2 = realization_schedule(sgd, 10, 0);
  x = x0;
  for (std::size_t k = 1; k <= K; ++k) {
    x = sgd_step(x, lr.batch_gradient(s2.next_batch(), x), h);
    REQUIRE(x == sgd_trace.iterates[k]);
  }
  auto gd = config(h, K, Policy::kFullBatch, 10, 5);
  gd.langevin = false;
  auto s3 = realization_schedule(gd, 10, 0);
  auto z3 = realization_noise(gd, 0);
  const auto gd_trace = run_chain(lr, gd, s3, z3, x0);
  x = x0;
  for (std::size_t k = 1; k <= K; ++k) x = gd_step(x, lr, h);
  CHECK(x == gd_trace.iterates.back());
}

TEST_CASE("ula mean recursion on the gaussian model") {
  const GaussianMeanModel m(draw_gaussian_data(20, 6, 1.5, 1.0), 1.0);
  const double h = 0.2;
  auto c = config(m.unscaled_step(h), 20, Policy::kFullBatch, 20, 2024);
  const std::size_t M = 100000;
  struct Acc {
    SlottedMoments at = SlottedMoments(21);
    void merge(const Acc& o) { at.merge(o.at); }
  };
  const auto acc = parallel_reduce<Acc>(
      M, [] { return Acc{}; },
      [&](std::size_t j, Acc& a) {
        auto s = realization_schedule(c, 20, j);
        auto z = realization_noise(c, j);
        run_chain(m, c, s, z, Vector::Zero(1),
                  [&](std::size_t k, std::size_t, const Vector& x) { a.at.add(k, x[0]); });
      });
  for (std::size_t k : {1u, 3u, 10u, 20u}) {
    const double expect = (1.0 - std::pow(1.0 - h, static_cast<double>(k))) * m.mean();
    CHECK(std::abs(acc.at[k].mean() - expect) <= 5 * acc.at[k].standard_error());
  }
}

TEST_CASE("robbins-monro stationary variance") {
  const std::size_t N = 40, n = 5;
  const GaussianMeanModel m(draw_gaussian_data(N, 12), 1.0);
  const double h = 0.5;
  const double V = batch_mean_variance(m.data(), n);
  auto c = config(m.unscaled_step(h), 60, Policy::kRobbinsMonro, n, 77);
  const std::size_t M = 20000;
  const auto acc = parallel_reduce<RunningMoments>(
      M, [] { return RunningMoments{}; },
      [&](std::size_t j, RunningMoments& a) {
        auto s = realization_schedule(c, N, j);
        auto z = realization_noise(c, j);
        const auto t = run_chain(m, c, s, z, Vector::Zero(1));
        a.add(t.iterates.back()[0]);
      });
  const double predicted_var = V * h / (2 - h) + 1.0 / (N * (1 - h / 2));
  const double se = predicted_var * std::sqrt(2.0 / M);
  CHECK(std::abs(acc.variance() - predicted_var) <= 4 * se);
  CHECK(std::abs(relative_variance_error(acc, N, 1.0) - rm_rel_var_error(h, N, V, 1.0)) <=
        4 * se * N);
}

TEST_CASE("non-finite iterates abort with the step index") {
  const GaussianMeanModel m(draw_gaussian_data(10, 1), 1.0);
  auto c = config(m.unscaled_step(5.0), 2000, Policy::kFullBatch, 10);
  auto s = realization_schedule(c, 10, 0);
  auto z = realization_noise(c, 0);
  try {
    run_chain(m, c, s, z, Vector::Constant(1, 1.0));
    FAIL("expected divergence");
  } catch (const NonFiniteIterate& e) {
    CHECK(e.step() > 10);
    CHECK(e.step() < 2000);
  }
}

TEST_CASE("coupled pairs") {
  const GaussianMeanModel m(draw_gaussian_data(160, 2), 1.0);
  auto c = config(m.unscaled_step(0.1), 104, Policy::kRandomReshuffling, 20, 3);
  auto s = realization_schedule(c, 160, 0);
  auto z = realization_noise(c, 0);
  const auto same = run_coupled_pair(m, c, s, z, Vector::Constant(1, 0.4), Vector::Constant(1, 0.4));
  for (double d : same) CHECK(d == 0.0);

  c.realizations = 200;
  const auto ens = run_coupled_ensemble(m, c, Vector::Constant(1, 1.0), Vector::Constant(1, -1.0));
  for (std::size_t k : {10u, 50u, 100u}) {
    const double bound = std::pow(0.9, k / 2.0) * 2.0;
    CHECK(ens.rms(k) <= bound * (1 + 1e-12) + 3 * ens.rms_standard_error(k));
    CHECK(ens.rms(k) == doctest::Approx(2.0 * std::pow(0.9, double(k))).epsilon(1e-9));
  }
}

TEST_CASE("coupled logistic chains contract") {
  const auto lr = rrsgld::testing::toy_logistic(16, 3, 4);
  const double L = lr.curvature_ceiling();
  auto c = config(0.5 / L, 200, Policy::kRandomReshuffling, 4, 8);
  c.realizations = 50;
  std::mt19937_64 rng(6);
  const auto ens = run_coupled_ensemble(lr, c, random_vector(4, rng, 2.0), random_vector(4, rng, 2.0));
  for (std::size_t k = 1; k <= 200; ++k) CHECK(ens.rms(k) <= ens.rms(k - 1) * (1 + 1e-12));
}

TEST_CASE("stationary increment bound") {
  // N / sigma^2 = 1 so L = 1 and pi* = N(ybar, 1) in the original time scale.
  const GaussianMeanModel m(draw_gaussian_data(10, 3), 10.0);
  const double L = m.curvature();
  const double h = 0.01;
  auto c = config(h, 100, Policy::kFullBatch, 10, 31);
  const std::size_t M = 10000;
  struct Acc {
    SlottedMoments sq = SlottedMoments(101);
    void merge(const Acc& o) { sq.merge(o.sq); }
  };
  const auto acc = parallel_reduce<Acc>(
      M, [] { return Acc{}; },
      [&](std::size_t j, Acc& a) {
        Engine init(derive_seed(c.seed, {stream::kInit, j}));
        std::normal_distribution<double> target(m.mean(), std::sqrt(m.target_variance()));
        const Vector x0 = Vector::Constant(1, target(init));
        auto s = realization_schedule(c, 10, j);
        auto z = realization_noise(c, j);
        run_chain(m, c, s, z, x0, [&](std::size_t k, std::size_t, const Vector& x) {
          a.sq.add(k, (x - x0).squaredNorm());
        });
      });
  for (double t : {0.1, 0.5, 1.0}) {
    const auto k = static_cast<std::size_t>(std::lround(t / h));
    const double rms = std::sqrt(acc.sq[k].mean());
    const double se = acc.sq[k].standard_error() / (2 * rms);
    CHECK(rms <= stationary_increment_bound(t, L, 1.0) + 3 * se);
  }
}

TEST_CASE("trace export") {
  const GaussianMeanModel m(draw_gaussian_data(12, 4), 1.0);
  auto c = config(m.unscaled_step(0.3), 12, Policy::kRandomReshuffling, 4, 2);
  c.thin = 2;
  auto s = realization_schedule(c, 12, 0);
  auto z = realization_noise(c, 0);
  const auto t = run_chain(m, c, s, z, Vector::Zero(1));
  std::ostringstream csv;
  write_trace_csv(csv, t);
  std::istringstream lines(csv.str());
  std::string line;
  std::getline(lines, line);
  CHECK(line == "k,phase,x0");
  std::size_t rows = 0;
  while (std::getline(lines, line)) {
    const auto k = std::stoul(line.substr(0, line.find(',')));
    CHECK(k == t.steps[rows]);
    ++rows;
  }
  CHECK(rows == t.size());

  const auto j = trace_summary(t, 4);
  CHECK(j["phases"].size() == 3);
  std::size_t kept = 0;
  for (const auto& p : j["phases"]) kept += p["count"].get<std::size_t>();
  std::size_t expected = 0;
  for (std::size_t k : t.steps) expected += k >= 4;
  CHECK(kept == expected);
  const auto& p0 = j["phases"][0];
  RunningMoments r0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t.steps[i] >= 4 && t.phase(i) == 0) r0.add(t.iterates[i][0]);
  }
  CHECK(p0["mean"][0].get<double>() == doctest::Approx(r0.mean()));
}

}  // TEST_SUITE
