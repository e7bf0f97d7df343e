// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The EdgeNet Authors

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace edgenet {

// Row-major so that flat indices (masks, file payloads) follow row order.
using Tensor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Sequence = std::vector<Vector>;

// Gate weights act on the concatenation [h_prev; x]: the first H columns
// multiply h_prev, the remaining D columns multiply x.
struct LstmLayerParams {
  Tensor w_f, w_i, w_j, w_o;
  Vector b_f, b_i, b_j, b_o;

  Eigen::Index hidden() const { return w_f.rows(); }
  Eigen::Index input() const { return w_f.cols() - w_f.rows(); }
};

struct NetworkParams {
  std::vector<LstmLayerParams> layers;
  Vector head_w;
  Vector head_b;  // size 1
  double dropout_rate = 0.1;
  // Output gate reuses W_j, b_j (w_o / b_o stay empty).
  bool tied_output_gate = false;

  Eigen::Index input_size() const { return layers.empty() ? 0 : layers.front().input(); }
  // Congruent tree with every tensor set to zero.
  NetworkParams zeros_like() const;
};

using Gradients = NetworkParams;

struct Architecture {
  int input_size = 10;
  std::vector<int> hidden_sizes{32, 32, 32};
  double dropout_rate = 0.1;
  bool tied_output_gate = false;
};

Architecture architecture_of(const NetworkParams& net);

// Visits every tensor of the tree in canonical order. The callback receives
// (name, tensor, is_weight); weights are prunable and decayed, biases are not.
template <class Net, class F>
void for_each_tensor(Net& net, F&& f) {
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    auto& layer = net.layers[l];
    const std::string p = "lstm" + std::to_string(l) + ".";
    f(p + "w_f", layer.w_f, true);
    f(p + "w_i", layer.w_i, true);
    f(p + "w_j", layer.w_j, true);
    if (!net.tied_output_gate) f(p + "w_o", layer.w_o, true);
    f(p + "b_f", layer.b_f, false);
    f(p + "b_i", layer.b_i, false);
    f(p + "b_j", layer.b_j, false);
    if (!net.tied_output_gate) f(p + "b_o", layer.b_o, false);
  }
  f(std::string("head.w"), net.head_w, true);
  f(std::string("head.b"), net.head_b, false);
}

[[noreturn]] void throw_dimension_mismatch(const std::string& what);

// Same traversal over two congruent trees; both tensors are handed to the
// callback as flat arrays. Callbacks must not write through a tree that was
// passed as const.
template <class NetA, class NetB, class F>
void zip_tensors(NetA& a, NetB& b, F&& f) {
  std::vector<std::pair<double*, Eigen::Index>> pb;
  for_each_tensor(b, [&](const std::string&, auto& t, bool) {
    pb.emplace_back(const_cast<double*>(t.data()), t.size());
  });
  std::size_t k = 0;
  for_each_tensor(a, [&](const std::string& name, auto& t, bool is_weight) {
    if (k >= pb.size() || pb[k].second != t.size()) throw_dimension_mismatch(name);
    Eigen::Map<Eigen::ArrayXd> flat_a(const_cast<double*>(t.data()), t.size());
    Eigen::Map<Eigen::ArrayXd> flat_b(pb[k].first, pb[k].second);
    f(name, flat_a, flat_b, is_weight);
    ++k;
  });
  if (k != pb.size()) throw_dimension_mismatch("parameter trees differ in tensor count");
}

// All-zero parameters with the shapes implied by arch.
NetworkParams zero_params(const Architecture& arch);

// Glorot-normal weights (std = sqrt(2 / (fan_in + fan_out))), zero biases.
NetworkParams init_params(const Architecture& arch, std::uint64_t seed);

struct GateCache {
  Vector input;   // layer input x_t (after the previous layer's dropout)
  Vector h_prev, c_prev;
  Vector f, i, j, z;
  Vector c, tanh_c, h;
  Vector dropout;  // per-unit multiplier applied to h on its way up
};

struct CellOutput {
  Vector h, c;
  GateCache gates;
};

struct ForwardCache {
  // steps[layer][t]
  std::vector<std::vector<GateCache>> steps;
  Vector head_input;
  double p = 0.5;
};

enum class Mode { kTrain, kEval };

double sigmoid(double x);

CellOutput lstm_cell_forward(const LstmLayerParams& layer, const Vector& x, const Vector& h_prev,
                             const Vector& c_prev, bool tied_output_gate = false);

// Dropout masks are drawn from rng in train mode only; rng may be null in eval mode.
double forward(const NetworkParams& net, const Sequence& sequence, Mode mode, std::mt19937_64* rng,
               ForwardCache* cache = nullptr);

double bce_loss(double p, int y);

// Gradient of bce_loss(forward(...)) for the cached pass, accumulated into grads.
void backward(const NetworkParams& net, const ForwardCache& cache, int y, Gradients& grads);
Gradients backward(const NetworkParams& net, const ForwardCache& cache, int y);

int predict(const NetworkParams& net, const Sequence& sequence, double threshold = 0.5);
int predict_label(double p, double threshold = 0.5);

// Splits a flat feature row into `steps` timesteps of equal width.
Sequence to_sequence(const Eigen::Ref<const Eigen::RowVectorXd>& row, int steps = 1);

}  // namespace edgenet
