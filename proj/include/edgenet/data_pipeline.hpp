// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The EdgeNet Authors

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

namespace edgenet {

enum class ColumnKind { kNumeric, kCategorical, kLabel };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
};

// Columns the pipeline reads, plus the ordered subset fed to the network.
struct FeatureSchema {
  std::vector<ColumnSpec> columns;
  std::vector<std::string> selected_features;

  // Throws Error(kBadSchema) unless there is exactly one label column, names
  // are unique and every selected feature names a non-label column.
  void validate() const;

  const ColumnSpec& column(const std::string& name) const;
  const std::string& label_column() const;
};

using Cell = std::variant<double, std::string>;

struct RawTable {
  // Schema column names, in schema order.
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  // 0-based position of each kept row among the file's data rows.
  std::vector<std::size_t> row_ids;
  // 1-based data-row numbers dropped because a cell was empty.
  std::vector<std::size_t> rejected_rows;

  std::size_t column_index(const std::string& name) const;
  RawTable select_rows(const std::vector<std::size_t>& indices) const;
};

// Categorical value -> code, codes in lexicographic order of the values.
class EncodingMap {
 public:
  void add_column(const std::string& column, std::vector<std::string> sorted_values);

  bool has_column(const std::string& column) const;
  int encode(const std::string& column, const std::string& value) const;
  const std::string& decode(const std::string& column, int code) const;
  const std::map<std::string, std::vector<std::string>>& columns() const { return values_; }

 private:
  std::map<std::string, std::vector<std::string>> values_;
};

struct MinMax {
  double min_x = 0.0;
  double max_x = 0.0;
};

// One MinMax per selected feature, in selected_features order.
struct NormStats {
  std::vector<std::string> features;
  std::vector<MinMax> ranges;
};

struct DatasetSplit {
  // n_rows x n_features, every value in [0, 1]
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> features;
  std::vector<std::uint8_t> labels;
  std::vector<std::size_t> row_ids;

  std::size_t size() const { return labels.size(); }
  DatasetSplit subset(const std::vector<std::size_t>& indices) const;
};

struct SplitRatios {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;
};

RawTable parse_csv(const std::string& text, const FeatureSchema& schema);
RawTable load_csv(const std::filesystem::path& path, const FeatureSchema& schema);

EncodingMap fit_label_encoding(const RawTable& table, const FeatureSchema& schema);
NormStats fit_minmax(const RawTable& train_rows, const EncodingMap& enc, const FeatureSchema& schema);

// Min-max scaling of one value; constant columns map to 0, out-of-range values clamp.
double minmax_scale(double x, const MinMax& range);

DatasetSplit apply_transform(const RawTable& rows, const EncodingMap& enc, const NormStats& stats,
                             const FeatureSchema& schema);

// Seeded shuffle then partition of row positions 0..n-1.
std::array<std::vector<std::size_t>, 3> split_indices(std::size_t n, const SplitRatios& ratios,
                                                      std::uint64_t seed);
std::array<DatasetSplit, 3> split(const DatasetSplit& dataset, const SplitRatios& ratios,
                                  std::uint64_t seed);

// Binary DatasetFile: "EIDD", u16 version, u32 rows, u16 features,
// float32 row-major payload, u8 labels. Little-endian.
void save_dataset(const DatasetSplit& data, const std::filesystem::path& path);
DatasetSplit load_dataset(const std::filesystem::path& path);

}  // namespace edgenet
