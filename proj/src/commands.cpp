// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The EdgeNet Authors

#include "edgenet/commands.hpp"

#include <map>
#include <sstream>

#include <json.hpp>

#include "edgenet/error.hpp"
#include "edgenet/io.hpp"

namespace edgenet {

namespace {

using nlohmann::json;

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIoError, "cannot create " + dir.string() + ": " + ec.message());
}

// Minimal RFC-4180 line splitter for the metrics CSVs this tool writes.
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') out.back() += '"', ++i;
      else if (c == '"') quoted = false;
      else out.back() += c;
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else if (c != '\r') {
      out.back() += c;
    }
  }
  return out;
}

// model name -> Acc% from metrics.csv files.
std::map<std::string, double> read_accuracies(const std::vector<fs::path>& csvs) {
  std::map<std::string, double> acc;
  for (const auto& path : csvs) {
    std::istringstream in(read_text(path));
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::kBadFormat, path.string() + " is empty");
    const auto header = split_csv_line(line);
    std::size_t name_col = header.size(), acc_col = header.size();
    for (std::size_t k = 0; k < header.size(); ++k) {
      if (header[k] == "model") name_col = k;
      if (header[k] == "Acc%") acc_col = k;
    }
    if (name_col == header.size() || acc_col == header.size())
      throw Error(ErrorCode::kBadFormat, path.string() + " lacks model/Acc% columns");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto fields = split_csv_line(line);
      if (fields.size() != header.size()) throw Error(ErrorCode::kBadFormat, "ragged row in " + path.string());
      try {
        acc[fields[name_col]] = std::stod(fields[acc_col]);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kBadFormat, "bad Acc% value in " + path.string());
      }
    }
  }
  return acc;
}

json sidecar(const RunConfig& cfg, const EncodingMap& enc, const NormStats& stats, const RawTable& table,
             const PreprocessSummary& summary) {
  json j;
  j["seed"] = cfg.seed;
  j["split"] = {{"train", cfg.split.train}, {"val", cfg.split.val}, {"test", cfg.split.test}};
  j["rows"] = {{"train", summary.train_rows}, {"val", summary.val_rows}, {"test", summary.test_rows}};
  j["rejected_rows"] = table.rejected_rows;
  j["label"] = cfg.schema.label_column();
  json enc_json = json::object();
  for (const auto& [column, values] : enc.columns()) enc_json[column] = values;
  j["encoding"] = enc_json;
  json norm = json::array();
  for (std::size_t k = 0; k < stats.features.size(); ++k)
    norm.push_back({{"feature", stats.features[k]}, {"min", stats.ranges[k].min_x}, {"max", stats.ranges[k].max_x}});
  j["normalization"] = norm;
  return j;
}

}  // namespace

std::string model_name(const fs::path& path) { return path.stem().string(); }

PreprocessSummary cmd_preprocess(const RunConfig& cfg, const fs::path& csv_in, const fs::path& out_dir) {
  cfg.validate();
  if (cfg.schema.columns.empty()) throw Error(ErrorCode::kBadConfig, "config has no schema");
  cfg.schema.validate();
  const RawTable table = load_csv(csv_in, cfg.schema);

  // Encoder and scaler are fitted on the training rows only.
  const auto parts = split_indices(table.rows.size(), cfg.split, cfg.seed);
  const RawTable train = table.select_rows(parts[0]);
  const EncodingMap enc = fit_label_encoding(train, cfg.schema);
  const NormStats stats = fit_minmax(train, enc, cfg.schema);

  std::array<DatasetSplit, 3> splits;
  for (std::size_t k = 0; k < 3; ++k) splits[k] = apply_transform(table.select_rows(parts[k]), enc, stats, cfg.schema);

  PreprocessSummary summary;
  summary.train_rows = splits[0].size();
  summary.val_rows = splits[1].size();
  summary.test_rows = splits[2].size();
  summary.rejected_rows = table.rejected_rows.size();

  ensure_dir(out_dir);
  save_dataset(splits[0], out_dir / kTrainSplitFile);
  save_dataset(splits[1], out_dir / kValSplitFile);
  save_dataset(splits[2], out_dir / kTestSplitFile);
  write_text_atomic(out_dir / kSidecarFile, sidecar(cfg, enc, stats, table, summary).dump(2) + "\n");
  return summary;
}

TrainRun cmd_train(const RunConfig& cfg, const fs::path& data_dir, const fs::path& out_dir, TrainHooks observer) {
  cfg.validate();
  const DatasetSplit train = load_dataset(data_dir / kTrainSplitFile);
  const DatasetSplit val = load_dataset(data_dir / kValSplitFile);
  const Architecture arch = cfg.architecture(static_cast<int>(train.features.cols()));
  ensure_dir(out_dir);

  TrainHooks hooks;
  hooks.on_step = std::move(observer.on_step);
  hooks.on_phase_end = [&, after = std::move(observer.on_phase_end)](Phase phase, const NetworkParams& net,
                                                                      const SparsityMask* mask) {
    switch (phase) {
      case Phase::kDense: save_dense(net, out_dir / kDenseCheckpointFile); break;
      case Phase::kSparse: save_sparse(net, *mask, out_dir / kPrunedModelFile); break;
      case Phase::kRedense: save_dense(net, out_dir / kBaselineModelFile); break;
    }
    if (after) after(phase, net, mask);
  };
  TrainRun run = train_dsd(cfg.train, arch, train, val, cfg.seed, std::move(hooks));
  write_text_atomic(out_dir / kTrainRunFile, train_run_csv(run.epochs));
  return run;
}

void cmd_quantize(const RunConfig& cfg, const fs::path& model_in, const fs::path& model_out) {
  cfg.validate();
  const LoadedModel model = load_model(model_in);
  if (model.quantized) {
    save_quantized(*model.quantized, model_out);
    return;
  }
  save_quantized(quantize_model(model.params, cfg.quant, model.mask), model_out);
}

std::vector<ModelEvaluation> cmd_evaluate(const std::vector<fs::path>& models, const fs::path& split,
                                          double threshold, const fs::path& out_dir, int sequence_length) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw Error(ErrorCode::kBadConfig, "threshold must lie in [0, 1]");
  const DatasetSplit data = load_dataset(split);
  if (data.size() == 0) throw Error(ErrorCode::kEmptyInput, split.string() + " has no rows");
  ensure_dir(out_dir);

  std::vector<ModelEvaluation> out;
  std::string csv = metrics_csv_header();
  for (const auto& path : models) {
    const LoadedModel model = load_model(path);
    const auto probs = predict_proba(model.params, data, sequence_length, threads_from_env());
    std::vector<std::uint8_t> preds(probs.size());
    for (std::size_t r = 0; r < probs.size(); ++r) preds[r] = static_cast<std::uint8_t>(predict_label(probs[r], threshold));

    ModelEvaluation ev;
    ev.name = model_name(path);
    ev.metrics = metrics_from_confusion(confusion(data.labels, preds));
    try {
      ev.roc = roc_curve(probs, data.labels);
      write_text_atomic(out_dir / (ev.name + "_roc.csv"), roc_csv(*ev.roc));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kSingleClassInput) throw;
    }
    csv += metrics_csv_row(ev.name, ev.metrics);
    out.push_back(std::move(ev));
  }
  write_text_atomic(out_dir / "metrics.csv", csv);
  return out;
}

SizeReport cmd_size_report(const fs::path& baseline, const std::vector<fs::path>& others,
                           const std::vector<fs::path>& eval_csvs) {
  SizeReport report = size_report(others, baseline);
  if (!eval_csvs.empty()) {
    const auto acc = read_accuracies(eval_csvs);
    for (auto& e : report.entries) {
      auto it = acc.find(e.name);
      if (it != acc.end()) e.accuracy = it->second;
    }
  }
  return report;
}

double cmd_predict(const fs::path& model, const std::vector<double>& features, int sequence_length) {
  const LoadedModel m = load_model(model);
  const auto expected = m.params.input_size() * sequence_length;
  if (static_cast<Eigen::Index>(features.size()) != expected)
    throw Error(ErrorCode::kDimensionMismatch, "model expects " + std::to_string(expected) + " features, got " +
                                                   std::to_string(features.size()));
  const Eigen::Map<const Eigen::RowVectorXd> row(features.data(), static_cast<Eigen::Index>(features.size()));
  return forward(m.params, to_sequence(row, sequence_length), Mode::kEval, nullptr);
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadConfig:
    case ErrorCode::kBadSchema:
    case ErrorCode::kBadRatios:
    case ErrorCode::kEpochOutOfRange:
      return 2;
    case ErrorCode::kIoError:
    case ErrorCode::kBadMagic:
    case ErrorCode::kCrcMismatch:
    case ErrorCode::kVersionUnsupported:
    case ErrorCode::kBadFormat:
    case ErrorCode::kMaskViolation:
      return 3;
    case ErrorCode::kMissingColumn:
    case ErrorCode::kParseError:
    case ErrorCode::kEmptyFile:
    case ErrorCode::kUnknownCategory:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kEmptyTensor:
    case ErrorCode::kLengthMismatch:
    case ErrorCode::kEmptyInput:
    case ErrorCode::kSingleClassInput:
      return 4;
    case ErrorCode::kNonFiniteLoss:
      return 5;
    default:
      return 1;
  }
}

}  // namespace edgenet
