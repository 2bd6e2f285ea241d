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
#include <filesystem>
#include <stdexcept>
#include <string>

#include "rrsgld/model.hpp"

namespace rrsgld {

/// Malformed CSV content. `row()` is the 1-based line number in the file.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t row)
      : std::runtime_error(what), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

/// Well-formed CSV whose content violates the model contract (e.g. a label
/// that is not 0 or 1).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CsvOptions {
  std::size_t label_column = 0;
  bool has_header = false;
  /// Drop trailing rows so the row count is a multiple of this (0 = keep all).
  std::size_t truncate_to_multiple_of = 0;
  /// Rescale each non-intercept feature to zero mean and unit variance.
  bool standardize = false;
  double prior_variance = LogisticRegressionModel::kDefaultPriorVariance;
};

struct LoadedDataset {
  LogisticRegressionModel model;
  std::size_t rows_read = 0;
  std::size_t columns = 0;
  std::size_t rows_dropped = 0;
};

/// Reads a comma-separated numeric table with binary labels in
/// `options.label_column`; every other column becomes a feature and an
/// intercept feature is prepended.
LoadedDataset load_dataset_csv(const std::filesystem::path& path, const CsvOptions& options = {});

/// Writes `label,f1,...,f{d-1}` with a header row (intercept column omitted),
/// readable back with {label_column = 0, has_header = true}.
void write_dataset_csv(const std::filesystem::path& path, const LogisticRegressionModel& model);

/// Writes `data.csv` plus `data.json` recording the seed and true parameters.
void write_simdata(const std::filesystem::path& csv_path, const SimData& sim);

}  // namespace rrsgld
