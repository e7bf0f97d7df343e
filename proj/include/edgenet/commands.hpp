// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The EdgeNet Authors

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "edgenet/config.hpp"
#include "edgenet/error.hpp"
#include "edgenet/metrics.hpp"
#include "edgenet/model_store.hpp"

namespace edgenet {

namespace fs = std::filesystem;

// Output file names shared by the commands.
inline constexpr const char* kTrainSplitFile = "train.eidd";
inline constexpr const char* kValSplitFile = "val.eidd";
inline constexpr const char* kTestSplitFile = "test.eidd";
inline constexpr const char* kSidecarFile = "preprocess.json";
inline constexpr const char* kBaselineModelFile = "baseline.eidm";
inline constexpr const char* kPrunedModelFile = "pruned.eidm";
inline constexpr const char* kDenseCheckpointFile = "checkpoint_dense.eidm";
inline constexpr const char* kTrainRunFile = "train_run.csv";

struct PreprocessSummary {
  std::size_t train_rows = 0, val_rows = 0, test_rows = 0;
  std::size_t rejected_rows = 0;
};

// CSV -> train/val/test DatasetFiles plus a JSON sidecar (schema, encoding, norm stats).
PreprocessSummary cmd_preprocess(const RunConfig& cfg, const fs::path& csv_in, const fs::path& out_dir);

// Writes baseline.eidm (after reDense), pruned.eidm (end of Sparse, bitmap
// encoded), checkpoint_dense.eidm and train_run.csv. `observer` hooks run
// alongside the checkpoint writers.
TrainRun cmd_train(const RunConfig& cfg, const fs::path& data_dir, const fs::path& out_dir,
                   TrainHooks observer = {});

// Dense float input gives dense int8 output; sparse input keeps its bitmap.
// Already-quantized tensors pass through unchanged.
void cmd_quantize(const RunConfig& cfg, const fs::path& model_in, const fs::path& model_out);

struct ModelEvaluation {
  std::string name;
  MetricReport metrics;
  std::optional<RocCurve> roc;  // empty when the split has a single class
};

// One metrics row per model in <out_dir>/metrics.csv and one
// <out_dir>/<name>_roc.csv per model.
std::vector<ModelEvaluation> cmd_evaluate(const std::vector<fs::path>& models, const fs::path& split,
                                          double threshold, const fs::path& out_dir,
                                          int sequence_length = 1);

// eval_csvs, when given, are metrics.csv files whose Acc% column fills the
// accuracy slot for the model with the same name.
SizeReport cmd_size_report(const fs::path& baseline, const std::vector<fs::path>& others,
                           const std::vector<fs::path>& eval_csvs);

double cmd_predict(const fs::path& model, const std::vector<double>& features, int sequence_length = 1);

std::string model_name(const fs::path& path);

// Process exit code for an error kind: 2 config/usage, 3 I/O and format,
// 4 data, 5 non-finite loss, 1 anything else.
int exit_code_for(ErrorCode code);

}  // namespace edgenet
