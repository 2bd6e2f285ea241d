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
#include <limits>
#include <string>
#include <vector>

#include "rrsgld/bounds.hpp"
#include "rrsgld/diagnostics.hpp"

using namespace rrsgld;

namespace {

BoundParams unit_params(double h) {
  BoundParams p;
  p.mu = 1.0;
  p.L = 1.0;
  p.L1 = 0.0;
  p.d = 1.0;
  p.h = h;
  p.R = 8.0;
  p.sigma_star = 1.0;
  p.initial_distance = 1.0;
  return p;
}

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("infinite horizon leaves the remainder") {
  auto p = unit_params(0.01);
  p.K = std::numeric_limits<double>::infinity();
  for (Theorem t : kAllTheorems) CHECK(theorem_bound(t, p) == theorem_remainder(t, p));
  p.K = 0.0;
  CHECK(theorem_bound(Theorem::kSgldRmA, p) ==
        doctest::Approx(1.0 + theorem_remainder(Theorem::kSgldRmA, p)));
  p.K = 50.0;
  p.initial_distance = 3.0;
  CHECK(theorem_bound(Theorem::kSgdRr, p) ==
        doctest::Approx(std::pow(0.99, 50.0) * 9.0 + theorem_remainder(Theorem::kSgdRr, p)));
}

TEST_CASE("closed-form values") {
  auto p = unit_params(0.1);
  p.mu = 0.5;
  p.L = 2.0;
  p.L1 = 0.3;
  p.d = 4.0;
  p.R = 5.0;
  p.sigma_star = 0.7;
  p.h = 0.2;
  const double s = 0.7, h = 0.2;
  CHECK(theorem_remainder(Theorem::kSgdRr, p) == doctest::Approx(h * h * 2 * 5 / 1.0 * s * s));
  CHECK(theorem_remainder(Theorem::kSgldRmA, p) ==
        doctest::Approx(std::sqrt(h) * 1.65 * 2 * 2 / 0.5 + s * std::sqrt(h / 0.5)));
  CHECK(theorem_remainder(Theorem::kSgldRrB, p) ==
        doctest::Approx(240 * h * 4 * (std::sqrt(5.0) * s + 10 * std::sqrt(h * 4) +
                                        std::sqrt(40.0) + std::sqrt(8.0) + 0.15 * 4)));
  p.h = 0.1;
  CHECK(theorem_remainder(Theorem::kSgdRm, p) == doctest::Approx(2 * 0.1 * s * s / 0.5));
}

TEST_CASE("sampler bounds stay positive without gradient noise") {
  auto p = unit_params(0.05);
  p.sigma_star = 0.0;
  for (Theorem t : {Theorem::kSgldRmA, Theorem::kSgldRmB, Theorem::kSgldRrA, Theorem::kSgldRrB}) {
    CHECK(theorem_remainder(t, p) > 0.0);
  }
  CHECK(theorem_remainder(Theorem::kSgdRm, p) == 0.0);
  CHECK(theorem_remainder(Theorem::kSgdRr, p) == 0.0);
}

TEST_CASE("lipschitz-hessian terms vanish at zero") {
  auto p = unit_params(0.05);
  p.d = 3.0;
  const double with_zero = theorem_remainder(Theorem::kSgldRmB, p);
  CHECK(with_zero == doctest::Approx(0.05 * 11.0 * std::sqrt(3.0) / 5.0 + std::sqrt(0.05)));
  p.L1 = 2.0;
  CHECK(theorem_remainder(Theorem::kSgldRmB, p) - with_zero == doctest::Approx(0.05 * 3.0));
}

TEST_CASE("admissible step ranges") {
  CHECK(admissible_step_limit(Theorem::kSgdRm, 0.5, 2.0) == doctest::Approx(0.25));
  CHECK(admissible_step_limit(Theorem::kSgdRr, 0.5, 2.0) == doctest::Approx(0.5));
  CHECK(admissible_step_limit(Theorem::kSgldRmB, 0.5, 2.0) == doctest::Approx(0.8));
  CHECK(admissible_step_limit(Theorem::kSgldRrA, 0.5, 2.0) == doctest::Approx(0.5));
  for (Theorem t : kAllTheorems) {
    const double limit = admissible_step_limit(t, 1.0, 1.0);
    CHECK_NOTHROW(theorem_bound(t, unit_params(limit * 0.999)));
    try {
      theorem_bound(t, unit_params(limit));
      FAIL("expected StepRangeError");
    } catch (const StepRangeError& e) {
      CHECK(e.theorem() == t);
      CHECK(std::string(e.what()).find(std::string(to_string(t))) != std::string::npos);
    }
    CHECK_THROWS_AS(theorem_bound(t, unit_params(-0.1)), StepRangeError);
  }
  auto p = unit_params(0.1);
  p.mu = 2.0;
  CHECK_THROWS_AS(theorem_bound(Theorem::kSgdRm, p), std::invalid_argument);
}

TEST_CASE("iterations to reach a target accuracy") {
  const std::vector<double> eps{1e-5, 1e-6, 1e-7, 1e-8};
  auto slope_for = [&](Theorem t) {
    std::vector<double> K;
    for (double e : eps) {
      const auto s = steps_to_epsilon(t, unit_params(0.1), e);
      auto p = unit_params(s.h);
      p.K = std::numeric_limits<double>::infinity();
      CHECK(theorem_remainder(t, p) <= e / 2 * (1 + 1e-9));
      p.K = s.K;
      CHECK(theorem_bound(t, p) <= e * (1 + 1e-6));
      K.push_back(s.K);
    }
    return loglog_slope(eps, K);
  };
  CHECK(slope_for(Theorem::kSgldRmB) == doctest::Approx(-2.0).epsilon(0.05));
  CHECK(slope_for(Theorem::kSgldRrB) == doctest::Approx(-1.0).epsilon(0.1));
  CHECK_THROWS_AS(steps_to_epsilon(Theorem::kSgdRm, unit_params(0.1), 0.0), std::invalid_argument);
}

TEST_CASE("reshuffling bound wins for small steps at fixed R") {
  auto small = unit_params(1e-9);
  CHECK(theorem_remainder(Theorem::kSgldRrB, small) < theorem_remainder(Theorem::kSgldRmB, small));
  auto large = unit_params(1e-3);
  CHECK(theorem_remainder(Theorem::kSgldRrB, large) > theorem_remainder(Theorem::kSgldRmB, large));
}

TEST_CASE("stationary increment bound") {
  CHECK(stationary_increment_bound(0.0, 1.0, 1.0) == 0.0);
  CHECK(stationary_increment_bound(0.5, 4.0, 2.0) ==
        doctest::Approx(0.5 * std::sqrt(8.0) + std::sqrt(2.0)));
  CHECK_THROWS_AS(stationary_increment_bound(-1.0, 1.0, 1.0), std::invalid_argument);
}

}  // TEST_SUITE
