// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The EdgeNet Authors

#include "edgenet/optimizer.hpp"

#include <cmath>

#include "edgenet/error.hpp"

namespace edgenet {

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error(ErrorCode::kDimensionMismatch, what);
}

}  // namespace

Tensor sgd_step(const Tensor& theta, const Tensor& grad, double eta) {
  require_same_shape(theta, grad, "sgd_step: gradient shape");
  return theta - eta * grad;
}

SgdmResult sgdm_step(const Tensor& theta, const Tensor& grad, const SgdmState& state) {
  require_same_shape(theta, grad, "sgdm_step: gradient shape");
  require_same_shape(theta, state.delta_prev, "sgdm_step: momentum shape");
  SgdmResult out;
  out.state = state;
  out.state.delta_prev = -state.eta * grad + state.alpha * state.delta_prev;
  out.theta = theta + out.state.delta_prev;
  return out;
}

L2Term l2_term(const Tensor& weights, double mu) {
  return {mu * weights.squaredNorm(), 2.0 * mu * weights};
}

SgdmOptimizer::SgdmOptimizer(const NetworkParams& shape, double alpha)
    : delta_prev_(shape.zeros_like()), alpha_(alpha) {}

void SgdmOptimizer::step(NetworkParams& params, const Gradients& grads, double eta) {
  // Elementwise form of sgdm_step applied to every tensor in place.
  std::vector<std::pair<const double*, Eigen::Index>> g;
  for_each_tensor(grads, [&](const std::string&, const auto& t, bool) { g.emplace_back(t.data(), t.size()); });
  std::size_t k = 0;
  zip_tensors(params, delta_prev_, [&](const std::string& name, auto& theta, auto& delta, bool) {
    if (k >= g.size() || g[k].second != theta.size()) throw_dimension_mismatch("gradient for " + name);
    Eigen::Map<const Eigen::ArrayXd> grad(g[k++].first, theta.size());
    delta = -eta * grad + alpha_ * delta;
    theta += delta;
  });
}

double add_weight_decay(const NetworkParams& params, double mu, Gradients& grads) {
  double penalty = 0.0;
  if (mu == 0.0) return penalty;
  zip_tensors(grads, params, [&](const std::string&, auto& g, auto& w, bool is_weight) {
    if (!is_weight) return;
    penalty += mu * w.square().sum();
    g += 2.0 * mu * w;
  });
  return penalty;
}

double global_norm(const Gradients& grads) {
  double sq = 0.0;
  for_each_tensor(grads, [&](const std::string&, const auto& t, bool) { sq += t.squaredNorm(); });
  return std::sqrt(sq);
}

void clip_global_norm(Gradients& grads, double max_norm) {
  const double norm = global_norm(grads);
  if (norm <= max_norm || norm == 0.0) return;
  const double scale = max_norm / norm;
  for_each_tensor(grads, [&](const std::string&, auto& t, bool) { t *= scale; });
}

}  // namespace edgenet
