// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The EdgeNet Authors

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "edgenet/lstm_net.hpp"
#include "edgenet/pruning.hpp"

namespace edgenet {

struct QuantParams {
  double scale = 1.0;
  std::int32_t zero_point = 0;
  std::int32_t q_min = -128;
  std::int32_t q_max = 127;
  double f_min = 0.0;
  double f_max = 0.0;
};

struct QuantizedTensor {
  std::vector<std::int8_t> values;
  Eigen::Index rows = 0;
  Eigen::Index cols = 1;
  QuantParams params;
};

struct QuantizedModel {
  Architecture arch;
  // Weight tensors, keyed by tensor name.
  std::map<std::string, QuantizedTensor> weights;
  // Biases stay in 32-bit float.
  std::map<std::string, std::vector<float>> biases;
  // Present when the source model was pruned; entries outside the mask hold the zero point.
  std::optional<SparsityMask> mask;
};

struct QuantOptions {
  std::int32_t q_min = -128;
  std::int32_t q_max = 127;
  // Use [-1, 1] for weights instead of the calibrated range.
  bool fixed_range = false;
};

// Exact min / max, widened to contain 0.
std::pair<double, double> calibrate(std::span<const double> values);

QuantParams make_quant_params(double f_min, double f_max, std::int32_t q_min = -128,
                              std::int32_t q_max = 127);

std::int32_t quantize_value(double r, const QuantParams& params);
double dequantize_value(std::int32_t q, const QuantParams& params);

QuantizedTensor quantize(const Tensor& tensor, const QuantParams& params);
Tensor dequantize(const QuantizedTensor& qt);

// Per-tensor calibration; scale is rounded to float32 so the model serializes losslessly.
QuantizedModel quantize_model(const NetworkParams& net, const QuantOptions& options = {},
                              const std::optional<SparsityMask>& mask = std::nullopt);

NetworkParams dequantize_model(const QuantizedModel& qm);

// Float-path inference with weights dequantized on use.
double quantized_forward(const QuantizedModel& qm, const Sequence& sequence);

}  // namespace edgenet
