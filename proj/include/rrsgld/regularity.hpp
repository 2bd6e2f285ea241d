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
#include <cstdint>

#include "rrsgld/model.hpp"

namespace rrsgld {

/// Empirical estimates of the regularity constants of F: strong convexity mu,
/// gradient Lipschitz constant L and Hessian Lipschitz constant L1, from
/// finite differences at random points x = center + radius * N(0, I).
///
/// mu and L are the extreme directional curvatures v^T H(x) v seen over the
/// probes, so they bracket the true constants from inside. L1 is the largest
/// ratio ||H(x)v - H(y)v|| / ||x - y|| over random pairs and unit v.
struct RegularityEstimate {
  double mu = 0.0;
  double L = 0.0;
  double L1 = 0.0;
  std::size_t probes = 0;
};

struct RegularityProbeOptions {
  std::size_t points = 20;
  std::size_t directions_per_point = 4;
  double radius = 1.0;
  double step = 1e-4;
  std::uint64_t seed = 0;
};

/// v^T (grad F(x + eps v) - grad F(x - eps v)) / (2 eps) for unit v.
double directional_curvature(const FiniteSumModel& model, const Vector& x, const Vector& v,
                             double step);

RegularityEstimate probe_regularity(const FiniteSumModel& model, const Vector& center,
                                    const RegularityProbeOptions& options = {});

}  // namespace rrsgld
