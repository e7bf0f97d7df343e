// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The EdgeNet Authors

#include "edgenet/data_pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "bytes.hpp"
#include "edgenet/error.hpp"
#include "edgenet/io.hpp"

namespace edgenet {

namespace {

constexpr char kDatasetMagic[4] = {'E', 'I', 'D', 'D'};
constexpr std::uint16_t kDatasetVersion = 1;

struct CsvRecord {
  std::vector<std::string> fields;
  std::size_t line = 0;
};

// RFC-4180: quoted fields may hold commas, doubled quotes and line breaks.
std::vector<CsvRecord> split_csv(const std::string& text) {
  std::vector<CsvRecord> records;
  CsvRecord current;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;
  current.line = line;

  std::size_t i = 0;
  if (text.size() >= 3 && text.compare(0, 3, "\xEF\xBB\xBF") == 0) i = 3;

  auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (!(current.fields.size() == 1 && current.fields[0].empty())) records.push_back(std::move(current));
    current = CsvRecord{};
    current.line = line;
  };

  for (; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (!field_started && field.empty()) {
          in_quotes = true;
          field_started = true;
        } else {
          field.push_back(ch);
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        ++line;
        end_record();
        break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  if (!field.empty() || !current.fields.empty() || field_started) end_record();
  return records;
}

bool parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\t')) --last;
  if (first < last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && first != last && std::isfinite(out);
}

double cell_value(const Cell& cell, const std::string& column, const EncodingMap& enc) {
  if (const auto* d = std::get_if<double>(&cell)) return *d;
  return enc.encode(column, std::get<std::string>(cell));
}

}  // namespace

void FeatureSchema::validate() const {
  std::set<std::string> names;
  int labels = 0;
  for (const auto& c : columns) {
    if (c.name.empty()) throw Error(ErrorCode::kBadSchema, "empty column name");
    if (!names.insert(c.name).second) throw Error(ErrorCode::kBadSchema, "duplicate column " + c.name);
    if (c.kind == ColumnKind::kLabel) ++labels;
  }
  if (labels != 1) throw Error(ErrorCode::kBadSchema, "schema needs exactly one label column");
  if (selected_features.empty()) throw Error(ErrorCode::kBadSchema, "no selected features");
  std::set<std::string> seen;
  for (const auto& f : selected_features) {
    if (!names.count(f)) throw Error(ErrorCode::kBadSchema, "selected feature " + f + " is not a column");
    if (column(f).kind == ColumnKind::kLabel)
      throw Error(ErrorCode::kBadSchema, "label column " + f + " cannot be a feature");
    if (!seen.insert(f).second) throw Error(ErrorCode::kBadSchema, "feature " + f + " selected twice");
  }
}

const ColumnSpec& FeatureSchema::column(const std::string& name) const {
  for (const auto& c : columns)
    if (c.name == name) return c;
  throw Error(ErrorCode::kMissingColumn, name);
}

const std::string& FeatureSchema::label_column() const {
  for (const auto& c : columns)
    if (c.kind == ColumnKind::kLabel) return c.name;
  throw Error(ErrorCode::kBadSchema, "schema has no label column");
}

std::size_t RawTable::column_index(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw Error(ErrorCode::kMissingColumn, name);
  return static_cast<std::size_t>(it - columns.begin());
}

RawTable RawTable::select_rows(const std::vector<std::size_t>& indices) const {
  RawTable out;
  out.columns = columns;
  out.rows.reserve(indices.size());
  out.row_ids.reserve(indices.size());
  for (auto i : indices) {
    out.rows.push_back(rows.at(i));
    out.row_ids.push_back(row_ids.at(i));
  }
  return out;
}

void EncodingMap::add_column(const std::string& column, std::vector<std::string> sorted_values) {
  values_[column] = std::move(sorted_values);
}

bool EncodingMap::has_column(const std::string& column) const { return values_.count(column) != 0; }

int EncodingMap::encode(const std::string& column, const std::string& value) const {
  auto it = values_.find(column);
  if (it == values_.end()) throw Error(ErrorCode::kUnknownCategory, "column " + column + " was not fitted");
  const auto& v = it->second;
  auto pos = std::lower_bound(v.begin(), v.end(), value);
  if (pos == v.end() || *pos != value)
    throw Error(ErrorCode::kUnknownCategory, "value '" + value + "' in column " + column);
  return static_cast<int>(pos - v.begin());
}

const std::string& EncodingMap::decode(const std::string& column, int code) const {
  const auto& v = values_.at(column);
  if (code < 0 || static_cast<std::size_t>(code) >= v.size())
    throw Error(ErrorCode::kUnknownCategory, "code " + std::to_string(code) + " in column " + column);
  return v[static_cast<std::size_t>(code)];
}

DatasetSplit DatasetSplit::subset(const std::vector<std::size_t>& indices) const {
  DatasetSplit out;
  out.features.resize(static_cast<Eigen::Index>(indices.size()), features.cols());
  out.labels.reserve(indices.size());
  out.row_ids.reserve(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto i = indices[k];
    out.features.row(static_cast<Eigen::Index>(k)) = features.row(static_cast<Eigen::Index>(i));
    out.labels.push_back(labels.at(i));
    out.row_ids.push_back(row_ids.at(i));
  }
  return out;
}

RawTable parse_csv(const std::string& text, const FeatureSchema& schema) {
  auto records = split_csv(text);
  if (records.empty()) throw Error(ErrorCode::kEmptyFile, "no header row");

  const auto& header = records.front().fields;
  RawTable table;
  std::vector<std::size_t> source;  // schema column -> CSV field
  for (const auto& c : schema.columns) {
    auto it = std::find(header.begin(), header.end(), c.name);
    if (it == header.end()) throw Error(ErrorCode::kMissingColumn, c.name);
    table.columns.push_back(c.name);
    source.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  if (records.size() == 1) throw Error(ErrorCode::kEmptyFile, "header only, no data rows");

  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.fields.size() != header.size())
      throw ParseError(r, "*", "expected " + std::to_string(header.size()) + " fields, found " +
                                   std::to_string(rec.fields.size()));
    std::vector<Cell> cells;
    cells.reserve(schema.columns.size());
    bool missing = false;
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
      const auto& raw = rec.fields[source[c]];
      const auto& spec = schema.columns[c];
      if (raw.find_first_not_of(" \t") == std::string::npos) {
        missing = true;
        break;
      }
      if (spec.kind == ColumnKind::kCategorical) {
        cells.emplace_back(raw);
        continue;
      }
      double v = 0.0;
      if (!parse_double(raw, v)) throw ParseError(r, spec.name, "not a number: '" + raw + "'");
      if (spec.kind == ColumnKind::kLabel && v != 0.0 && v != 1.0)
        throw ParseError(r, spec.name, "label must be 0 or 1, found '" + raw + "'");
      cells.emplace_back(v);
    }
    if (missing) {
      table.rejected_rows.push_back(r);
      continue;
    }
    table.rows.push_back(std::move(cells));
    table.row_ids.push_back(r - 1);
  }
  if (table.rows.empty()) throw Error(ErrorCode::kEmptyFile, "every data row was rejected");
  return table;
}

RawTable load_csv(const std::filesystem::path& path, const FeatureSchema& schema) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::kIoError, "no such file " + path.string());
  return parse_csv(read_text(path), schema);
}

EncodingMap fit_label_encoding(const RawTable& table, const FeatureSchema& schema) {
  EncodingMap enc;
  for (const auto& spec : schema.columns) {
    if (spec.kind != ColumnKind::kCategorical) continue;
    const auto col = table.column_index(spec.name);
    std::set<std::string> distinct;
    for (const auto& row : table.rows) distinct.insert(std::get<std::string>(row[col]));
    enc.add_column(spec.name, {distinct.begin(), distinct.end()});
  }
  return enc;
}

NormStats fit_minmax(const RawTable& train_rows, const EncodingMap& enc, const FeatureSchema& schema) {
  NormStats stats;
  for (const auto& name : schema.selected_features) {
    const auto col = train_rows.column_index(name);
    MinMax range{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& row : train_rows.rows) {
      const double v = cell_value(row[col], name, enc);
      range.min_x = std::min(range.min_x, v);
      range.max_x = std::max(range.max_x, v);
    }
    if (train_rows.rows.empty()) range = {};
    stats.features.push_back(name);
    stats.ranges.push_back(range);
  }
  return stats;
}

double minmax_scale(double x, const MinMax& range) {
  if (!(range.max_x > range.min_x)) return 0.0;
  return std::clamp((x - range.min_x) / (range.max_x - range.min_x), 0.0, 1.0);
}

DatasetSplit apply_transform(const RawTable& rows, const EncodingMap& enc, const NormStats& stats,
                             const FeatureSchema& schema) {
  const auto n = static_cast<Eigen::Index>(rows.rows.size());
  const auto f = static_cast<Eigen::Index>(stats.features.size());
  DatasetSplit out;
  out.features.resize(n, f);
  out.labels.reserve(rows.rows.size());
  out.row_ids = rows.row_ids;

  std::vector<std::size_t> cols;
  for (const auto& name : stats.features) cols.push_back(rows.column_index(name));
  const auto label_col = rows.column_index(schema.label_column());

  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = rows.rows[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < f; ++c) {
      const auto k = static_cast<std::size_t>(c);
      out.features(r, c) = minmax_scale(cell_value(row[cols[k]], stats.features[k], enc), stats.ranges[k]);
    }
    out.labels.push_back(std::get<double>(row[label_col]) != 0.0 ? 1 : 0);
  }
  return out;
}

std::array<std::vector<std::size_t>, 3> split_indices(std::size_t n, const SplitRatios& ratios,
                                                      std::uint64_t seed) {
  if (!(ratios.train > 0 && ratios.val > 0 && ratios.test > 0) ||
      std::abs(ratios.train + ratios.val + ratios.test - 1.0) > 1e-9)
    throw Error(ErrorCode::kBadRatios, "ratios must be positive and sum to 1");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const auto n_train = std::min<std::size_t>(n, static_cast<std::size_t>(std::llround(ratios.train * n)));
  const auto n_val =
      std::min<std::size_t>(n - n_train, static_cast<std::size_t>(std::llround(ratios.val * n)));

  std::array<std::vector<std::size_t>, 3> parts;
  parts[0].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  parts[1].assign(order.begin() + static_cast<std::ptrdiff_t>(n_train),
                  order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  parts[2].assign(order.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), order.end());
  return parts;
}

std::array<DatasetSplit, 3> split(const DatasetSplit& dataset, const SplitRatios& ratios, std::uint64_t seed) {
  auto parts = split_indices(dataset.size(), ratios, seed);
  return {dataset.subset(parts[0]), dataset.subset(parts[1]), dataset.subset(parts[2])};
}

void save_dataset(const DatasetSplit& data, const std::filesystem::path& path) {
  detail::ByteWriter w;
  w.put_text({kDatasetMagic, 4});
  w.put<std::uint16_t>(kDatasetVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(data.size()));
  w.put<std::uint16_t>(static_cast<std::uint16_t>(data.features.cols()));
  for (Eigen::Index r = 0; r < data.features.rows(); ++r)
    for (Eigen::Index c = 0; c < data.features.cols(); ++c) w.put<float>(static_cast<float>(data.features(r, c)));
  w.put_bytes(data.labels);
  write_file_atomic(path, w.bytes());
}

DatasetSplit load_dataset(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  detail::ByteReader r(bytes);
  if (r.get_text(4) != std::string(kDatasetMagic, 4)) throw Error(ErrorCode::kBadMagic, path.string());
  if (r.get<std::uint16_t>() != kDatasetVersion) throw Error(ErrorCode::kVersionUnsupported, path.string());
  const auto rows = r.get<std::uint32_t>();
  const auto cols = r.get<std::uint16_t>();
  if (r.remaining() != static_cast<std::size_t>(rows) * cols * 4 + rows)
    throw Error(ErrorCode::kBadFormat, "dataset payload size does not match its header");

  DatasetSplit out;
  out.features.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index c = 0; c < cols; ++c) out.features(i, c) = r.get<float>();
  auto labels = r.get_bytes(rows);
  out.labels.assign(labels.begin(), labels.end());
  for (auto l : out.labels)
    if (l > 1) throw Error(ErrorCode::kBadFormat, "non-binary label in " + path.string());
  out.row_ids.resize(rows);
  std::iota(out.row_ids.begin(), out.row_ids.end(), std::size_t{0});
  return out;
}

}  // namespace edgenet
