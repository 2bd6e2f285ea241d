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

#include "rrsgld/bounds.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace rrsgld {
namespace {

std::string range_message(Theorem theorem, double h, double limit) {
  std::ostringstream msg;
  msg << to_string(theorem) << ": step size h = " << h << " outside the admissible range (0, "
      << limit << ")";
  return msg.str();
}

void check_constants(const BoundParams& p) {
  if (!(p.mu > 0.0) || !(p.L > 0.0)) throw std::invalid_argument("bound: mu and L must be positive");
  if (p.mu > p.L) throw std::invalid_argument("bound: mu must not exceed L");
  if (p.L1 < 0.0 || p.d <= 0.0 || p.R < 1.0 || p.sigma_star < 0.0 || p.K < 0.0 ||
      p.initial_distance < 0.0) {
    throw std::invalid_argument("bound: invalid constants");
  }
}

}  // namespace

std::string_view to_string(Theorem theorem) {
  switch (theorem) {
    case Theorem::kSgdRm:
      return "sgd-rm";
    case Theorem::kSgdRr:
      return "sgd-rr";
    case Theorem::kSgldRmA:
      return "sgld-rm-a";
    case Theorem::kSgldRmB:
      return "sgld-rm-b";
    case Theorem::kSgldRrA:
      return "sgld-rr-a";
    case Theorem::kSgldRrB:
      return "sgld-rr-b";
  }
  return "?";
}

StepRangeError::StepRangeError(Theorem theorem, double h, double limit)
    : std::domain_error(range_message(theorem, h, limit)), theorem_(theorem) {}

double admissible_step_limit(Theorem theorem, double mu, double L) {
  switch (theorem) {
    case Theorem::kSgdRm:
      return 1.0 / (2.0 * L);
    case Theorem::kSgdRr:
    case Theorem::kSgldRrA:
    case Theorem::kSgldRrB:
      return 1.0 / L;
    case Theorem::kSgldRmA:
    case Theorem::kSgldRmB:
      return 2.0 / (L + mu);
  }
  return 0.0;
}

bool is_admissible(Theorem theorem, const BoundParams& p) {
  return p.h > 0.0 && p.h < admissible_step_limit(theorem, p.mu, p.L);
}

double theorem_remainder(Theorem theorem, const BoundParams& p) {
  check_constants(p);
  if (!is_admissible(theorem, p)) {
    throw StepRangeError(theorem, p.h, admissible_step_limit(theorem, p.mu, p.L));
  }
  const double h = p.h, mu = p.mu, L = p.L, d = p.d, R = p.R, s = p.sigma_star;
  switch (theorem) {
    case Theorem::kSgdRm:
      return 2.0 * h * s * s / mu;
    case Theorem::kSgdRr:
      return h * h * L * R / (2.0 * mu) * s * s;
    case Theorem::kSgldRmA:
      return std::sqrt(h) * 1.65 * L * std::sqrt(d) / mu + s * std::sqrt(h / mu);
    case Theorem::kSgldRmB:
      return h * (p.L1 * d / (2.0 * mu) + 11.0 * L * std::sqrt(L * d) / (5.0 * mu)) +
             s * std::sqrt(h / mu);
    case Theorem::kSgldRrA:
      return 240.0 * (L / mu) *
             (h * std::sqrt(R) * s + h * (L * R * std::sqrt(h * d) + std::sqrt(L * R * d)) +
              std::sqrt(h * d));
    case Theorem::kSgldRrB:
      return 240.0 * h * (L / mu) *
             (std::sqrt(R) * s + L * R * std::sqrt(h * d) + std::sqrt(L * R * d) +
              std::sqrt(L * d) + (p.L1 / L) * d);
  }
  return 0.0;
}

double theorem_bound(Theorem theorem, const BoundParams& p) {
  const double remainder = theorem_remainder(theorem, p);
  double transient = 0.0;
  if (std::isfinite(p.K) && p.initial_distance > 0.0) {
    const bool squared = theorem == Theorem::kSgdRm || theorem == Theorem::kSgdRr;
    const double w0 = squared ? p.initial_distance * p.initial_distance : p.initial_distance;
    transient = std::exp(p.K * std::log1p(-p.h * p.mu)) * w0;
  }
  return transient + remainder;
}

StepsToEpsilon steps_to_epsilon(Theorem theorem, const BoundParams& params, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("steps_to_epsilon: eps must be positive");
  BoundParams p = params;
  p.K = std::numeric_limits<double>::infinity();
  const double limit = admissible_step_limit(theorem, p.mu, p.L);
  auto remainder_at = [&](double h) {
    p.h = h;
    return theorem_remainder(theorem, p);
  };
  const double target = 0.5 * eps;
  double lo = 0.0;
  double hi = limit * (1.0 - 1e-12);
  if (remainder_at(hi) <= target) {
    lo = hi;
  } else {
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (remainder_at(mid) <= target) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
  }
  if (!(lo > 0.0)) throw std::domain_error("steps_to_epsilon: no admissible step reaches eps");
  const bool squared = theorem == Theorem::kSgdRm || theorem == Theorem::kSgdRr;
  const double w0 = squared ? p.initial_distance * p.initial_distance : p.initial_distance;
  double K = 0.0;
  if (w0 > target) K = std::ceil(std::log(target / w0) / std::log1p(-lo * p.mu));
  return {lo, K};
}

double stationary_increment_bound(double t, double L, double d) {
  if (t < 0.0 || L < 0.0 || d <= 0.0) throw std::invalid_argument("increment bound: bad arguments");
  return t * std::sqrt(L * d) + std::sqrt(2.0 * t * d);
}

}  // namespace rrsgld
