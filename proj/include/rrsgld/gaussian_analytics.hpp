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
#include <string_view>
#include <vector>

namespace rrsgld {

/// Parameters of the preconditioned 1-D model problem
///   x_{k+1} = (1 - h) x_k + h yhat_k + sigma sqrt(2h / N) xi_k
/// with batch-mean variance V. h is the rescaled step, in (0, 2).
struct ModelProblemParams {
  double h = 0.1;
  std::size_t R = 1;
  double N = 1.0;
  double V = 0.0;
  double sigma2 = 1.0;

  void validate() const;
};

/// Asymptotic relative variance error N V[x_inf] / sigma^2 - 1 of ULA:
/// h / (2 - h).
double ula_rel_var_error(double h);

/// SGLD with independent batches: hNV / (sigma^2 (2 - h)) + 2 / (2 - h) - 1.
double rm_rel_var_error(double h, double N, double V, double sigma2);

/// SGLD with reshuffled batches at phase r = k mod R of the epoch (r = 0 is
/// the iterate right after an epoch completes). R = 1 is the full-batch case
/// and returns the ULA value. Throws for r >= R.
double rr_rel_var_error_phase(double h, std::size_t r, std::size_t R, double N, double V,
                              double sigma2);

/// Mean of the phase errors over one epoch.
double rr_rel_var_error_avg(double h, std::size_t R, double N, double V, double sigma2);

/// Quadratic small-h expansion of rr_rel_var_error_avg,
///   h/2 + h^2/4 + (N V / sigma^2) (R + 1) h^2 / 6,
/// accurate to O(h^3).
double rr_rel_var_error_avg_expansion(double h, std::size_t R, double N, double V, double sigma2);

/// W2 distance between N(m1, s1^2) and N(m2, s2^2); s1, s2 are standard
/// deviations.
double w2_gaussian_1d(double m1, double s1, double m2, double s2);

enum class Scheme { kUla, kRobbinsMonro, kRandomReshuffling };
std::string_view to_string(Scheme scheme);

/// Asymptotic W2 distance to the target N(ybar, sigma^2/N) under the Gaussian
/// approximation of the iterates. For reshuffling, the maximum over phases.
double asymptotic_w2(Scheme scheme, const ModelProblemParams& params);

/// Asymptotic relative variance error of a scheme (phase average for RR).
double asymptotic_rel_var_error(Scheme scheme, const ModelProblemParams& params);

/// Exact variance of x_k for the preconditioned recursion started from a
/// deterministic x_0, through the geometric sums of the RM/ULA recursion.
double rm_variance_at(double h, std::size_t k, double N, double V, double sigma2);

}  // namespace rrsgld
