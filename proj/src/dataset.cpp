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

#include "rrsgld/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace rrsgld {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<double> parse_row(std::string_view line, std::size_t row) {
  std::vector<double> values;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    const std::string_view field =
        trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                 : comma - start));
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() ||
        !std::isfinite(v)) {
      throw ParseError("row " + std::to_string(row) + ": cannot parse field '" +
                           std::string(field) + "' as a number",
                       row);
    }
    values.push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return values;
}

}  // namespace

LoadedDataset load_dataset_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset " + path.string());

  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (line_no == 1 && options.has_header) continue;
    auto values = parse_row(line, line_no);
    if (columns == 0) {
      columns = values.size();
      if (options.label_column >= columns) {
        throw ParseError("label column " + std::to_string(options.label_column) +
                             " out of range for " + std::to_string(columns) + " columns",
                         line_no);
      }
      if (columns < 2) throw ParseError("need a label and at least one feature", line_no);
    } else if (values.size() != columns) {
      throw ParseError("row " + std::to_string(line_no) + ": expected " +
                           std::to_string(columns) + " fields, found " +
                           std::to_string(values.size()),
                       line_no);
    }
    const double label = values[options.label_column];
    if (label != 0.0 && label != 1.0) {
      throw ValidationError("row " + std::to_string(line_no) + ": label " +
                            std::to_string(label) + " is not 0 or 1");
    }
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw ParseError("no data rows in " + path.string(), line_no);

  const std::size_t rows_read = rows.size();
  std::size_t keep = rows_read;
  if (options.truncate_to_multiple_of > 1) {
    keep -= rows_read % options.truncate_to_multiple_of;
    if (keep == 0) {
      throw ValidationError("dataset of " + std::to_string(rows_read) +
                            " rows has no complete batch of " +
                            std::to_string(options.truncate_to_multiple_of));
    }
    if (keep != rows_read) {
      std::cerr << "warning: dropping " << (rows_read - keep) << " of " << rows_read
                << " rows of " << path.string() << " so that the batch size "
                << options.truncate_to_multiple_of << " divides the dataset\n";
    }
  }

  Matrix features(static_cast<Eigen::Index>(keep), static_cast<Eigen::Index>(columns - 1));
  std::vector<int> labels(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    Eigen::Index c = 0;
    for (std::size_t j = 0; j < columns; ++j) {
      if (j == options.label_column) continue;
      features(static_cast<Eigen::Index>(i), c++) = rows[i][j];
    }
    labels[i] = rows[i][options.label_column] == 1.0 ? 1 : 0;
  }

  if (options.standardize) {
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
      auto col = features.col(j);
      const double mean = col.mean();
      const double sd = std::sqrt((col.array() - mean).square().sum() /
                                  static_cast<double>(std::max<Eigen::Index>(col.size() - 1, 1)));
      col.array() -= mean;
      if (sd > 0.0) col /= sd;
    }
  }

  return LoadedDataset{
      LogisticRegressionModel::from_features(features, std::move(labels), options.prior_variance),
      rows_read, columns, rows_read - keep};
}

void write_dataset_csv(const std::filesystem::path& path, const LogisticRegressionModel& model) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(17);
  const Matrix& design = model.design();
  out << "label";
  for (Eigen::Index j = 1; j < design.rows(); ++j) out << ",f" << j;
  out << '\n';
  for (Eigen::Index i = 0; i < design.cols(); ++i) {
    out << model.labels()[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 1; j < design.rows(); ++j) out << ',' << design(j, i);
    out << '\n';
  }
}

void write_simdata(const std::filesystem::path& csv_path, const SimData& sim) {
  write_dataset_csv(csv_path, sim.model);
  nlohmann::json meta;
  meta["seed"] = sim.seed;
  meta["rows"] = sim.model.size();
  meta["features"] = sim.model.dimension() - 1;
  meta["x_true"] = std::vector<double>(sim.x_true.data(), sim.x_true.data() + sim.x_true.size());
  meta["reload"] = {{"label_column", 0}, {"has_header", true}};
  auto sidecar = csv_path;
  sidecar.replace_extension(".json");
  std::ofstream out(sidecar);
  if (!out) throw std::runtime_error("cannot write " + sidecar.string());
  out << meta.dump(2) << '\n';
}

}  // namespace rrsgld
