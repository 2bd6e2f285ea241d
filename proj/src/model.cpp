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

#include "rrsgld/model.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "rrsgld/rng.hpp"

namespace rrsgld {

Vector FiniteSumModel::term_gradient(std::size_t i, const Vector& x) const {
  if (i >= size()) {
    throw std::out_of_range("term index " + std::to_string(i) +
                            " out of range for model of size " + std::to_string(size()));
  }
  Vector g = Vector::Zero(static_cast<Eigen::Index>(dimension()));
  accumulate_term_gradient(i, x, g);
  return g;
}

Vector FiniteSumModel::gradient(const Vector& x) const {
  Vector g = Vector::Zero(static_cast<Eigen::Index>(dimension()));
  for (std::size_t i = 0; i < size(); ++i) accumulate_term_gradient(i, x, g);
  return g / static_cast<double>(size());
}

Vector FiniteSumModel::batch_gradient(std::span<const std::size_t> batch,
                                      const Vector& x) const {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  Vector g = Vector::Zero(static_cast<Eigen::Index>(dimension()));
  for (std::size_t i : batch) accumulate_term_gradient(i, x, g);
  return g / static_cast<double>(batch.size());
}

// ---------------------------------------------------------------------------

GaussianMeanModel::GaussianMeanModel(std::vector<double> data, double sigma2)
    : data_(std::move(data)), sigma2_(sigma2) {
  if (data_.empty()) throw std::invalid_argument("GaussianMeanModel: empty data");
  if (!(sigma2_ > 0.0) || !std::isfinite(sigma2_)) {
    throw std::invalid_argument("GaussianMeanModel: sigma^2 must be positive");
  }
  mean_ = std::accumulate(data_.begin(), data_.end(), 0.0) /
          static_cast<double>(data_.size());
}

double GaussianMeanModel::potential(const Vector& x) const {
  double s = 0.0;
  for (double y : data_) s += (x[0] - y) * (x[0] - y);
  return s / (2.0 * sigma2_);
}

double GaussianMeanModel::term_potential(std::size_t i, const Vector& x) const {
  const double r = x[0] - data_.at(i);
  return curvature() * r * r / 2.0;
}

void GaussianMeanModel::accumulate_term_gradient(std::size_t i, const Vector& x,
                                                 Vector& out) const {
  out[0] += curvature() * (x[0] - data_[i]);
}

Vector GaussianMeanModel::gradient(const Vector& x) const {
  Vector g(1);
  g[0] = curvature() * (x[0] - mean_);
  return g;
}

Vector GaussianMeanModel::batch_gradient(std::span<const std::size_t> batch,
                                         const Vector& x) const {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  double s = 0.0;
  for (std::size_t i : batch) s += data_[i];
  Vector g(1);
  g[0] = curvature() * (x[0] - s / static_cast<double>(batch.size()));
  return g;
}

double gaussian_full_gradient(const GaussianMeanModel& model, double x) {
  return model.curvature() * (x - model.mean());
}

std::vector<double> draw_gaussian_data(std::size_t count, std::uint64_t seed,
                                       double mean, double sd) {
  Engine rng(derive_seed(seed, {stream::kData}));
  std::normal_distribution<double> normal(mean, sd);
  std::vector<double> y(count);
  for (double& v : y) v = normal(rng);
  return y;
}

// ---------------------------------------------------------------------------

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

LogisticRegressionModel::LogisticRegressionModel(Matrix design, std::vector<int> labels,
                                                 double prior_variance)
    : design_(std::move(design)), labels_(std::move(labels)), prior_variance_(prior_variance) {
  if (design_.cols() == 0 || design_.rows() == 0) {
    throw std::invalid_argument("LogisticRegressionModel: empty design");
  }
  if (static_cast<std::size_t>(design_.cols()) != labels_.size()) {
    throw std::invalid_argument("LogisticRegressionModel: " + std::to_string(design_.cols()) +
                                " feature columns but " + std::to_string(labels_.size()) +
                                " labels");
  }
  if (!(prior_variance_ > 0.0) || !std::isfinite(prior_variance_)) {
    throw std::invalid_argument("LogisticRegressionModel: prior variance must be positive");
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] != 0 && labels_[i] != 1) {
      throw std::invalid_argument("LogisticRegressionModel: label " + std::to_string(labels_[i]) +
                                  " at row " + std::to_string(i) + " is not 0 or 1");
    }
  }
  if (!design_.row(0).isOnes()) {
    throw std::invalid_argument("LogisticRegressionModel: first feature must be the intercept 1");
  }
  if (!design_.allFinite()) {
    throw std::invalid_argument("LogisticRegressionModel: non-finite feature value");
  }
}

LogisticRegressionModel LogisticRegressionModel::from_features(const Matrix& features,
                                                               std::vector<int> labels,
                                                               double prior_variance) {
  Matrix design(features.cols() + 1, features.rows());
  design.row(0).setOnes();
  design.bottomRows(features.cols()) = features.transpose();
  return LogisticRegressionModel(std::move(design), std::move(labels), prior_variance);
}

Vector LogisticRegressionModel::prior_diagonal() const {
  return Vector::Constant(design_.rows(), static_cast<double>(size()) * prior_variance_);
}

double LogisticRegressionModel::curvature_ceiling() const {
  return curvature_floor() + 0.25 * design_.colwise().squaredNorm().sum();
}

// F = sum_i [x^T D^-1 x - z_i t_i + softplus(t_i)] with D^-1 = 1/(N lambda^2),
// so the N prior copies add up to ||x||^2 / lambda^2.
double LogisticRegressionModel::potential(const Vector& x) const {
  const Vector t = design_.transpose() * x;
  double s = x.squaredNorm() / prior_variance_;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const auto ti = t[static_cast<Eigen::Index>(i)];
    s += softplus(ti) - labels_[i] * ti;
  }
  return s;
}

double LogisticRegressionModel::term_potential(std::size_t i, const Vector& x) const {
  if (i >= size()) throw std::out_of_range("term index out of range");
  const double n = static_cast<double>(size());
  const double t = design_.col(static_cast<Eigen::Index>(i)).dot(x);
  return n * (x.squaredNorm() / (n * prior_variance_) - labels_[i] * t + softplus(t));
}

void LogisticRegressionModel::accumulate_term_gradient(std::size_t i, const Vector& x,
                                                       Vector& out) const {
  const double n = static_cast<double>(size());
  const auto col = design_.col(static_cast<Eigen::Index>(i));
  const double t = col.dot(x);
  out.noalias() += (2.0 / prior_variance_) * x;
  out.noalias() += n * (sigmoid(t) - labels_[i]) * col;
}

Vector LogisticRegressionModel::gradient(const Vector& x) const {
  const Vector t = design_.transpose() * x;
  Vector w(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    w[i] = sigmoid(t[i]) - labels_[static_cast<std::size_t>(i)];
  }
  return (2.0 / prior_variance_) * x + design_ * w;
}

Vector LogisticRegressionModel::batch_gradient(std::span<const std::size_t> batch,
                                               const Vector& x) const {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  Vector g = Vector::Zero(design_.rows());
  for (std::size_t i : batch) {
    const auto col = design_.col(static_cast<Eigen::Index>(i));
    g.noalias() += (sigmoid(col.dot(x)) - labels_[i]) * col;
  }
  const double scale = static_cast<double>(size()) / static_cast<double>(batch.size());
  return (2.0 / prior_variance_) * x + scale * g;
}

Matrix LogisticRegressionModel::hessian(const Vector& x) const {
  const Vector t = design_.transpose() * x;
  Vector w(t.size());
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    const double s = sigmoid(t[i]);
    w[i] = s * (1.0 - s);
  }
  Matrix H = design_ * w.asDiagonal() * design_.transpose();
  H.diagonal().array() += 2.0 / prior_variance_;
  return H;
}

Vector find_mode(const LogisticRegressionModel& model, double tolerance,
                 std::size_t max_iterations) {
  Vector x = Vector::Zero(static_cast<Eigen::Index>(model.dimension()));
  double f = model.potential(x);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    const Vector g = model.gradient(x);
    if (g.norm() <= tolerance * std::max(1.0, std::abs(f))) break;
    const Vector step = model.hessian(x).ldlt().solve(g);
    double t = 1.0;
    Vector next = x - step;
    double f_next = model.potential(next);
    while (f_next > f && t > 1e-10) {
      t *= 0.5;
      next = x - t * step;
      f_next = model.potential(next);
    }
    if (f_next > f) break;
    x = std::move(next);
    f = f_next;
  }
  return x;
}

SimData generate_simdata(std::uint64_t seed, std::size_t rows, std::size_t features) {
  if (rows == 0) throw std::invalid_argument("generate_simdata: rows must be positive");
  Engine rng(derive_seed(seed, {stream::kData}));
  std::normal_distribution<double> normal(0.0, 1.0);

  Vector x_true(static_cast<Eigen::Index>(features + 1));
  for (Eigen::Index j = 0; j < x_true.size(); ++j) x_true[j] = normal(rng);

  Matrix design(static_cast<Eigen::Index>(features + 1), static_cast<Eigen::Index>(rows));
  std::vector<int> labels(rows);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < rows; ++i) {
    auto col = design.col(static_cast<Eigen::Index>(i));
    col[0] = 1.0;
    for (std::size_t j = 1; j <= features; ++j) {
      const double sd = j <= 5 ? 5.0 : (j <= 10 ? 1.0 : 0.2);
      col[static_cast<Eigen::Index>(j)] = sd * normal(rng);
    }
    labels[i] = unit(rng) < sigmoid(col.dot(x_true)) ? 1 : 0;
  }
  return SimData{LogisticRegressionModel(std::move(design), std::move(labels)), std::move(x_true),
                 seed};
}

}  // namespace rrsgld
