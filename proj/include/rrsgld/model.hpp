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
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace rrsgld {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// A potential of finite-sum form F(x) = (1/N) sum_i g_i(x), so that the
/// target density is proportional to exp(-F). Term indices are 0-based.
/// Implementations are immutable after construction and may be shared
/// read-only between threads.
class FiniteSumModel {
 public:
  virtual ~FiniteSumModel() = default;

  virtual std::size_t dimension() const = 0;
  virtual std::size_t size() const = 0;

  virtual double potential(const Vector& x) const = 0;
  virtual double term_potential(std::size_t i, const Vector& x) const = 0;

  /// out += grad g_i(x). No range check; callers go through term_gradient.
  virtual void accumulate_term_gradient(std::size_t i, const Vector& x,
                                        Vector& out) const = 0;

  /// grad g_i(x); throws std::out_of_range for i >= size().
  Vector term_gradient(std::size_t i, const Vector& x) const;

  /// grad F(x). The default averages the term gradients.
  virtual Vector gradient(const Vector& x) const;

  /// Mean of grad g_i over the batch. Indices must be < size().
  virtual Vector batch_gradient(std::span<const std::size_t> batch,
                                const Vector& x) const;
};

/// One-dimensional Gaussian mean model with g_i(x) = N (x - y_i)^2 / (2 sigma^2),
/// so that pi* = N(ybar, sigma^2 / N).
class GaussianMeanModel final : public FiniteSumModel {
 public:
  GaussianMeanModel(std::vector<double> data, double sigma2);

  std::size_t dimension() const override { return 1; }
  std::size_t size() const override { return data_.size(); }

  double potential(const Vector& x) const override;
  double term_potential(std::size_t i, const Vector& x) const override;
  void accumulate_term_gradient(std::size_t i, const Vector& x,
                                Vector& out) const override;
  Vector gradient(const Vector& x) const override;
  Vector batch_gradient(std::span<const std::size_t> batch,
                        const Vector& x) const override;

  const std::vector<double>& data() const { return data_; }
  double mean() const { return mean_; }
  double sigma2() const { return sigma2_; }
  /// N / sigma^2; both the strong-convexity and the smoothness constant.
  double curvature() const { return static_cast<double>(data_.size()) / sigma2_; }
  /// Variance of the target, sigma^2 / N.
  double target_variance() const { return sigma2_ / static_cast<double>(data_.size()); }
  /// Step size in the original time scale that corresponds to the
  /// preconditioned step h (h <- sigma^2 h / N).
  double unscaled_step(double h) const { return h / curvature(); }

 private:
  std::vector<double> data_;
  double mean_ = 0.0;
  double sigma2_ = 1.0;
};

/// N sigma^-2 (x - ybar).
double gaussian_full_gradient(const GaussianMeanModel& model, double x);

/// Draws N data points y_i ~ N(mean, sd^2).
std::vector<double> draw_gaussian_data(std::size_t count, std::uint64_t seed,
                                       double mean = 0.0, double sd = 1.0);

double sigmoid(double t);
/// log(1 + exp(t)) without overflow.
double softplus(double t);

/// Bayesian logistic regression with diagonal Gaussian prior D = diag(N lambda^2).
/// Each term is g_i(x) = N (x^T D^-1 x - z_i x^T y_i + softplus(x^T y_i)),
/// so F sums N copies of the prior quadratic.
class LogisticRegressionModel final : public FiniteSumModel {
 public:
  static constexpr double kDefaultPriorVariance = 25.0;

  /// `design` is d x N with one augmented feature vector per column; its
  /// first row must be all ones. Labels must be 0 or 1.
  LogisticRegressionModel(Matrix design, std::vector<int> labels,
                          double prior_variance = kDefaultPriorVariance);

  /// Builds the model from an N x (d-1) feature matrix, prepending the
  /// intercept feature.
  static LogisticRegressionModel from_features(const Matrix& features,
                                               std::vector<int> labels,
                                               double prior_variance = kDefaultPriorVariance);

  std::size_t dimension() const override { return static_cast<std::size_t>(design_.rows()); }
  std::size_t size() const override { return labels_.size(); }

  double potential(const Vector& x) const override;
  double term_potential(std::size_t i, const Vector& x) const override;
  void accumulate_term_gradient(std::size_t i, const Vector& x,
                                Vector& out) const override;
  Vector gradient(const Vector& x) const override;
  Vector batch_gradient(std::span<const std::size_t> batch,
                        const Vector& x) const override;

  const Matrix& design() const { return design_; }
  const std::vector<int>& labels() const { return labels_; }
  double prior_variance() const { return prior_variance_; }
  /// Diagonal of D, i.e. N lambda^2 in every coordinate.
  Vector prior_diagonal() const;

  /// Lower and upper bounds on the Hessian spectrum of F: the prior
  /// curvature 2/lambda^2 and that plus (1/4) sum_i ||y_i||^2.
  double curvature_floor() const { return 2.0 / prior_variance_; }
  double curvature_ceiling() const;

  /// Analytic Hessian of F: (2/lambda^2) I + sum_i s_i (1 - s_i) y_i y_i^T.
  Matrix hessian(const Vector& x) const;

 private:
  Matrix design_;
  std::vector<int> labels_;
  double prior_variance_;
};

/// Maximum a posteriori point (minimiser of F) by damped Newton iteration.
Vector find_mode(const LogisticRegressionModel& model, double tolerance = 1e-10,
                 std::size_t max_iterations = 100);

struct SimData {
  LogisticRegressionModel model;
  Vector x_true;
  std::uint64_t seed;
};

/// Simulated logistic-regression data: features with variances 25 (j <= 5),
/// 1 (5 < j <= 10) and 0.04 beyond, true parameters N(0, 1), and Bernoulli
/// labels through the logistic link. Deterministic in `seed`.
SimData generate_simdata(std::uint64_t seed, std::size_t rows = 1024,
                         std::size_t features = 100);

}  // namespace rrsgld
