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

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rrsgld {

/// Non-asymptotic convergence bounds for stochastic-gradient optimisers and
/// samplers on a mu-strongly convex, L-smooth potential.
///
///  kSgdRm   E|x_K - X*|^2 <= (1-h mu)^K |x0-X*|^2 + 2 h sigma*^2 / mu,        h < 1/(2L)
///  kSgdRr   E|x_K - X*|^2 <= (1-h mu)^K |x0-X*|^2 + h^2 L R sigma*^2 / (2 mu), h < 1/L
///  kSgldRmA W2 <= (1-h mu)^K W0 + sqrt(h) 1.65 L sqrt(d) / mu + sigma* sqrt(h/mu), h < 2/(L+mu)
///  kSgldRmB W2 <= (1-h mu)^K W0 + h (L1 d / (2 mu) + 11 L sqrt(L d) / (5 mu))
///                 + sigma* sqrt(h/mu)                                         h < 2/(L+mu)
///  kSgldRrA W2 <= (1-h mu)^K W0 + 240 (L/mu) (h sqrt(R) sigma*
///                 + h (L R sqrt(h d) + sqrt(L R d)) + sqrt(h d))              h < 1/L
///  kSgldRrB W2 <= (1-h mu)^K W0 + 240 h (L/mu) (sqrt(R) sigma*
///                 + L R sqrt(h d) + sqrt(L R d) + sqrt(L d) + (L1/L) d)       h < 1/L
///
/// The B variants additionally assume an L1-Lipschitz Hessian.
enum class Theorem { kSgdRm, kSgdRr, kSgldRmA, kSgldRmB, kSgldRrA, kSgldRrB };

inline constexpr std::array<Theorem, 6> kAllTheorems = {
    Theorem::kSgdRm,    Theorem::kSgdRr,    Theorem::kSgldRmA,
    Theorem::kSgldRmB,  Theorem::kSgldRrA,  Theorem::kSgldRrB};

/// Short label, e.g. "sgd-rm" or "sgld-rr-b".
std::string_view to_string(Theorem theorem);

struct BoundParams {
  double mu = 1.0;
  double L = 1.0;
  double L1 = 0.0;
  double d = 1.0;
  double h = 0.01;
  double R = 1.0;
  double sigma_star = 0.0;
  /// K; infinity gives the asymptotic remainder.
  double K = 0.0;
  /// W2(pi_0, pi*) for the samplers, |x0 - X*| for the optimisers.
  double initial_distance = 0.0;
};

/// Step size outside a theorem's admissible range.
class StepRangeError : public std::domain_error {
 public:
  StepRangeError(Theorem theorem, double h, double limit);
  Theorem theorem() const { return theorem_; }

 private:
  Theorem theorem_;
};

/// Supremum of admissible step sizes (the range is open).
double admissible_step_limit(Theorem theorem, double mu, double L);
bool is_admissible(Theorem theorem, const BoundParams& params);

/// Full right-hand side, transient term included. Throws StepRangeError for
/// inadmissible h and std::invalid_argument for invalid constants.
double theorem_bound(Theorem theorem, const BoundParams& params);

/// The K-independent part of the bound.
double theorem_remainder(Theorem theorem, const BoundParams& params);

struct StepsToEpsilon {
  double h = 0.0;
  double K = 0.0;
};

/// Cheapest schedule the bound certifies for accuracy eps: the largest
/// admissible h with remainder <= eps/2 (bisection; the remainder increases
/// with h), then the smallest K with transient <= eps/2. params.h and
/// params.K are ignored.
StepsToEpsilon steps_to_epsilon(Theorem theorem, const BoundParams& params, double eps);

/// Increment bound for the stationary overdamped Langevin diffusion,
/// ||X_t - X_0||_{L2} <= t sqrt(L d) + sqrt(2 t d).
double stationary_increment_bound(double t, double L, double d);

}  // namespace rrsgld
