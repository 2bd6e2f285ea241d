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

#include "rrsgld/regularity.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <stdexcept>

#include "rrsgld/rng.hpp"

namespace rrsgld {
namespace {

Vector hessian_vector(const FiniteSumModel& model, const Vector& x, const Vector& v, double step) {
  return (model.gradient(x + step * v) - model.gradient(x - step * v)) / (2.0 * step);
}

Vector random_unit(Engine& rng, Eigen::Index d) {
  std::normal_distribution<double> normal;
  Vector v(d);
  do {
    for (Eigen::Index j = 0; j < d; ++j) v[j] = normal(rng);
  } while (v.norm() == 0.0);
  return v.normalized();
}

}  // namespace

double directional_curvature(const FiniteSumModel& model, const Vector& x, const Vector& v,
                             double step) {
  return v.dot(hessian_vector(model, x, v, step));
}

RegularityEstimate probe_regularity(const FiniteSumModel& model, const Vector& center,
                                    const RegularityProbeOptions& options) {
  const auto d = static_cast<Eigen::Index>(model.dimension());
  if (center.size() != d) throw std::invalid_argument("probe_regularity: dimension mismatch");
  if (options.points < 2 || options.directions_per_point == 0) {
    throw std::invalid_argument("probe_regularity: need at least two points and one direction");
  }
  Engine rng(derive_seed(options.seed, {stream::kProbe}));
  std::normal_distribution<double> normal;

  std::vector<Vector> points;
  for (std::size_t p = 0; p < options.points; ++p) {
    Vector x(d);
    for (Eigen::Index j = 0; j < d; ++j) x[j] = center[j] + options.radius * normal(rng);
    points.push_back(std::move(x));
  }

  RegularityEstimate est;
  est.mu = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < points.size(); ++p) {
    const Vector& x = points[p];
    const Vector& y = points[(p + 1) % points.size()];
    for (std::size_t q = 0; q < options.directions_per_point; ++q) {
      const Vector v = random_unit(rng, d);
      const Vector hx = hessian_vector(model, x, v, options.step);
      const double c = v.dot(hx);
      est.mu = std::min(est.mu, c);
      est.L = std::max(est.L, c);
      const double dist = (x - y).norm();
      if (dist > 0.0) {
        const Vector hy = hessian_vector(model, y, v, options.step);
        est.L1 = std::max(est.L1, (hx - hy).norm() / dist);
      }
      ++est.probes;
    }
  }
  return est;
}

}  // namespace rrsgld
