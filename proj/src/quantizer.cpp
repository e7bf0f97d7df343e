// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The EdgeNet Authors

#include "edgenet/quantizer.hpp"

#include <algorithm>
#include <cmath>

#include "edgenet/error.hpp"

namespace edgenet {

std::pair<double, double> calibrate(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::kEmptyTensor, "calibrate");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  return {std::min(*lo, 0.0), std::max(*hi, 0.0)};
}

QuantParams make_quant_params(double f_min, double f_max, std::int32_t q_min, std::int32_t q_max) {
  if (!(f_min <= f_max)) throw Error(ErrorCode::kBadConfig, "f_min must not exceed f_max");
  if (!(q_min < q_max)) throw Error(ErrorCode::kBadConfig, "q_min must be below q_max");
  QuantParams p;
  p.q_min = q_min;
  p.q_max = q_max;
  p.f_min = f_min;
  p.f_max = f_max;
  const double q_span = static_cast<double>(q_max) - static_cast<double>(q_min);
  if (f_max == f_min) {
    p.scale = 1.0;
    p.zero_point = 0;
    return p;
  }
  p.scale = (f_max - f_min) / q_span;
  // q_min - f_min / S, written without the division by S so that halves stay exact.
  const double z_real = static_cast<double>(q_min) - f_min * q_span / (f_max - f_min);
  p.zero_point = static_cast<std::int32_t>(std::clamp(std::nearbyint(z_real), static_cast<double>(q_min),
                                                      static_cast<double>(q_max)));
  return p;
}

std::int32_t quantize_value(double r, const QuantParams& params) {
  const double q = std::nearbyint(r / params.scale + params.zero_point);
  return static_cast<std::int32_t>(std::clamp(q, static_cast<double>(params.q_min), static_cast<double>(params.q_max)));
}

double dequantize_value(std::int32_t q, const QuantParams& params) {
  return params.scale * static_cast<double>(q - params.zero_point);
}

QuantizedTensor quantize(const Tensor& tensor, const QuantParams& params) {
  if (params.q_min < -128 || params.q_max > 127)
    throw Error(ErrorCode::kBadConfig, "quantized range must fit in int8");
  QuantizedTensor qt;
  qt.rows = tensor.rows();
  qt.cols = tensor.cols();
  qt.params = params;
  qt.values.resize(static_cast<std::size_t>(tensor.size()));
  for (Eigen::Index k = 0; k < tensor.size(); ++k)
    qt.values[static_cast<std::size_t>(k)] = static_cast<std::int8_t>(quantize_value(tensor.data()[k], params));
  return qt;
}

Tensor dequantize(const QuantizedTensor& qt) {
  Tensor out(qt.rows, qt.cols);
  for (Eigen::Index k = 0; k < out.size(); ++k)
    out.data()[k] = dequantize_value(qt.values[static_cast<std::size_t>(k)], qt.params);
  return out;
}

QuantizedModel quantize_model(const NetworkParams& net, const QuantOptions& options,
                              const std::optional<SparsityMask>& mask) {
  QuantizedModel qm;
  qm.arch = architecture_of(net);
  qm.mask = mask;
  for_each_tensor(net, [&](const std::string& name, const auto& t, bool is_weight) {
    if (!is_weight) {
      qm.biases[name] = std::vector<float>(t.data(), t.data() + t.size());
      return;
    }
    if (!t.allFinite()) throw Error(ErrorCode::kBadFormat, "non-finite weight in " + name);
    auto [lo, hi] = options.fixed_range ? std::pair{-1.0, 1.0}
                                        : calibrate({t.data(), static_cast<std::size_t>(t.size())});
    QuantParams params = make_quant_params(lo, hi, options.q_min, options.q_max);
    params.scale = static_cast<float>(params.scale);
    Tensor as_matrix = t;
    qm.weights[name] = quantize(as_matrix, params);
  });
  return qm;
}

NetworkParams dequantize_model(const QuantizedModel& qm) {
  NetworkParams net = zero_params(qm.arch);
  for_each_tensor(net, [&](const std::string& name, auto& t, bool is_weight) {
    if (is_weight) {
      auto it = qm.weights.find(name);
      if (it == qm.weights.end()) throw Error(ErrorCode::kBadFormat, "quantized model lacks " + name);
      const Tensor d = dequantize(it->second);
      if (d.size() != t.size()) throw_dimension_mismatch(name);
      std::copy(d.data(), d.data() + d.size(), t.data());
    } else {
      auto it = qm.biases.find(name);
      if (it == qm.biases.end()) throw Error(ErrorCode::kBadFormat, "quantized model lacks " + name);
      if (static_cast<Eigen::Index>(it->second.size()) != t.size()) throw_dimension_mismatch(name);
      std::copy(it->second.begin(), it->second.end(), t.data());
    }
  });
  return net;
}

double quantized_forward(const QuantizedModel& qm, const Sequence& sequence) {
  return forward(dequantize_model(qm), sequence, Mode::kEval, nullptr);
}

}  // namespace edgenet
