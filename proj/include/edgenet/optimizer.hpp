// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The EdgeNet Authors

#pragma once

#include "edgenet/lstm_net.hpp"

namespace edgenet {

// theta' = theta - eta * g
Tensor sgd_step(const Tensor& theta, const Tensor& grad, double eta);

struct SgdmState {
  Tensor delta_prev;  // previous update, zero-initialized
  double alpha = 0.9;
  double eta = 0.1;
};

struct SgdmResult {
  Tensor theta;
  SgdmState state;
};

// u = -eta * g + alpha * delta_prev; theta' = theta + u; delta_prev' = u.
SgdmResult sgdm_step(const Tensor& theta, const Tensor& grad, const SgdmState& state);

struct L2Term {
  double penalty = 0.0;
  Tensor grad;
};

// penalty = mu * sum(w^2), grad = 2 mu w.
L2Term l2_term(const Tensor& weights, double mu);

struct RegConfig {
  double mu = 1e-4;
};

// Momentum SGD over a whole parameter tree. Holds one velocity per tensor.
class SgdmOptimizer {
 public:
  SgdmOptimizer(const NetworkParams& shape, double alpha);

  void step(NetworkParams& params, const Gradients& grads, double eta);

  // Previous update for every tensor; congruent with the parameters.
  NetworkParams& velocity() { return delta_prev_; }
  const NetworkParams& velocity() const { return delta_prev_; }
  double alpha() const { return alpha_; }

 private:
  NetworkParams delta_prev_;
  double alpha_;
};

// Adds 2 mu w to every weight tensor's gradient and returns mu * sum(w^2).
// Biases are left alone.
double add_weight_decay(const NetworkParams& params, double mu, Gradients& grads);

double global_norm(const Gradients& grads);
// Rescales grads in place when their global L2 norm exceeds max_norm.
void clip_global_norm(Gradients& grads, double max_norm);

}  // namespace edgenet
