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

#include "rrsgld/gaussian_analytics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rrsgld {
namespace {

void check_step(double h) {
  if (!(h > 0.0 && h < 2.0)) {
    throw std::domain_error("step size h = " + std::to_string(h) + " outside (0, 2)");
  }
}

}  // namespace

void ModelProblemParams::validate() const {
  check_step(h);
  if (R == 0) throw std::invalid_argument("model problem: R must be positive");
  if (!(N > 0.0)) throw std::invalid_argument("model problem: N must be positive");
  if (!(V >= 0.0)) throw std::invalid_argument("model problem: V must be nonnegative");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("model problem: sigma^2 must be positive");
}

double ula_rel_var_error(double h) {
  check_step(h);
  return h / (2.0 - h);
}

double rm_rel_var_error(double h, double N, double V, double sigma2) {
  check_step(h);
  return h * N * V / (sigma2 * (2.0 - h)) + 2.0 / (2.0 - h) - 1.0;
}

double rr_rel_var_error_phase(double h, std::size_t r, std::size_t R, double N, double V,
                              double sigma2) {
  check_step(h);
  if (R == 0 || r >= R) {
    throw std::invalid_argument("phase r = " + std::to_string(r) + " not in [0, R = " +
                                std::to_string(R) + ")");
  }
  if (R == 1) return ula_rel_var_error(h);
  const double a = 1.0 - h;
  const double Rd = static_cast<double>(R);
  const double aR = std::pow(a, Rd);
  const double a2r = std::pow(a, 2.0 * static_cast<double>(r));
  const double ar = std::pow(a, static_cast<double>(r));
  const double head = a2r * (1.0 - aR) * (1.0 - aR) / (1.0 - aR * aR);
  const double tail = (1.0 - ar) * (1.0 - ar);
  const double bracket = Rd * h / (2.0 - h) - (head + tail);
  return N * V / (sigma2 * (Rd - 1.0)) * bracket + 2.0 / (2.0 - h) - 1.0;
}

double rr_rel_var_error_avg(double h, std::size_t R, double N, double V, double sigma2) {
  if (R == 0) throw std::invalid_argument("R must be positive");
  double s = 0.0;
  for (std::size_t r = 0; r < R; ++r) s += rr_rel_var_error_phase(h, r, R, N, V, sigma2);
  return s / static_cast<double>(R);
}

double rr_rel_var_error_avg_expansion(double h, std::size_t R, double N, double V,
                                      double sigma2) {
  check_step(h);
  if (R == 0) throw std::invalid_argument("R must be positive");
  return h / 2.0 + h * h / 4.0 +
         N * V * h * h * (static_cast<double>(R) + 1.0) / (6.0 * sigma2);
}

double w2_gaussian_1d(double m1, double s1, double m2, double s2) {
  if (s1 < 0.0 || s2 < 0.0) throw std::invalid_argument("w2_gaussian_1d: negative standard deviation");
  return std::hypot(m1 - m2, s1 - s2);
}

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::kUla:
      return "ula";
    case Scheme::kRobbinsMonro:
      return "rm";
    case Scheme::kRandomReshuffling:
      return "rr";
  }
  return "?";
}

double asymptotic_w2(Scheme scheme, const ModelProblemParams& p) {
  p.validate();
  const double target_sd = std::sqrt(p.sigma2 / p.N);
  switch (scheme) {
    case Scheme::kUla:
      return target_sd * std::abs(1.0 - 1.0 / std::sqrt(1.0 - p.h / 2.0));
    case Scheme::kRobbinsMonro:
      return target_sd * std::abs(1.0 - std::sqrt((2.0 + p.h * p.N * p.V / p.sigma2) / (2.0 - p.h)));
    case Scheme::kRandomReshuffling: {
      double worst = 0.0;
      for (std::size_t r = 0; r < p.R; ++r) {
        const double e = rr_rel_var_error_phase(p.h, r, p.R, p.N, p.V, p.sigma2);
        worst = std::max(worst, w2_gaussian_1d(0.0, target_sd, 0.0, target_sd * std::sqrt(1.0 + e)));
      }
      return worst;
    }
  }
  return 0.0;
}

double asymptotic_rel_var_error(Scheme scheme, const ModelProblemParams& p) {
  p.validate();
  switch (scheme) {
    case Scheme::kUla:
      return ula_rel_var_error(p.h);
    case Scheme::kRobbinsMonro:
      return rm_rel_var_error(p.h, p.N, p.V, p.sigma2);
    case Scheme::kRandomReshuffling:
      return rr_rel_var_error_avg(p.h, p.R, p.N, p.V, p.sigma2);
  }
  return 0.0;
}

double rm_variance_at(double h, std::size_t k, double N, double V, double sigma2) {
  check_step(h);
  const double a2 = (1.0 - h) * (1.0 - h);
  const double geom = (1.0 - std::pow(a2, static_cast<double>(k))) / (1.0 - a2);
  return V * h * h * geom + 2.0 * h * sigma2 / N * geom;
}

}  // namespace rrsgld
