// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The EdgeNet Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "edgenet/data_pipeline.hpp"
#include "edgenet/dsd_trainer.hpp"
#include "edgenet/lstm_net.hpp"
#include "edgenet/quantizer.hpp"

namespace edgenet {

// Everything a CLI run needs. Every key in the JSON form is optional and
// falls back to the defaults below; unknown keys are rejected.
struct RunConfig {
  FeatureSchema schema;
  SplitRatios split;
  std::uint64_t seed = 42;
  int layers = 3;
  int hidden = 32;
  double dropout = 0.1;
  bool tied_output_gate = false;
  TrainConfig train;
  QuantOptions quant;
  double threshold = 0.5;

  // Throws Error(kBadConfig) on the first out-of-range field.
  void validate() const;
  // Architecture for a dataset with n_features columns per row.
  Architecture architecture(int n_features) const;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::filesystem::path& path);
std::string to_json(const RunConfig& cfg);

// Reads EDGENET_THREADS; unset or unparsable means 0 (single-threaded).
int threads_from_env();

}  // namespace edgenet
