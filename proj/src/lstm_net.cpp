// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The EdgeNet Authors

#include "edgenet/lstm_net.hpp"

#include <algorithm>
#include <cmath>

#include "edgenet/error.hpp"

namespace edgenet {

namespace {

constexpr double kProbClamp = 1e-7;

Vector sigmoid(const Vector& a) { return a.unaryExpr([](double x) { return edgenet::sigmoid(x); }); }

Vector concat(const Vector& h, const Vector& x) {
  Vector u(h.size() + x.size());
  u << h, x;
  return u;
}

void fill_normal(Tensor& t, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  for (Eigen::Index k = 0; k < t.size(); ++k) t.data()[k] = dist(rng);
}

Vector dropout_mask(Eigen::Index n, double rate, std::mt19937_64& rng) {
  Vector mask(n);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double keep_scale = 1.0 / (1.0 - rate);
  for (Eigen::Index k = 0; k < n; ++k) mask(k) = u(rng) < rate ? 0.0 : keep_scale;
  return mask;
}

}  // namespace

void throw_dimension_mismatch(const std::string& what) { throw Error(ErrorCode::kDimensionMismatch, what); }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

NetworkParams NetworkParams::zeros_like() const {
  NetworkParams z = *this;
  for_each_tensor(z, [](const std::string&, auto& t, bool) { t.setZero(); });
  return z;
}

Architecture architecture_of(const NetworkParams& net) {
  Architecture arch;
  arch.input_size = static_cast<int>(net.input_size());
  arch.hidden_sizes.clear();
  for (const auto& l : net.layers) arch.hidden_sizes.push_back(static_cast<int>(l.hidden()));
  arch.dropout_rate = net.dropout_rate;
  arch.tied_output_gate = net.tied_output_gate;
  return arch;
}

NetworkParams zero_params(const Architecture& arch) {
  if (arch.input_size <= 0 || arch.hidden_sizes.empty())
    throw Error(ErrorCode::kDimensionMismatch, "architecture needs an input size and at least one layer");
  NetworkParams net;
  net.dropout_rate = arch.dropout_rate;
  net.tied_output_gate = arch.tied_output_gate;
  int in = arch.input_size;
  for (int h : arch.hidden_sizes) {
    if (h <= 0) throw Error(ErrorCode::kDimensionMismatch, "hidden size must be positive");
    LstmLayerParams layer;
    layer.w_f.setZero(h, h + in);
    layer.w_i.setZero(h, h + in);
    layer.w_j.setZero(h, h + in);
    layer.b_f.setZero(h);
    layer.b_i.setZero(h);
    layer.b_j.setZero(h);
    if (!arch.tied_output_gate) {
      layer.w_o.setZero(h, h + in);
      layer.b_o.setZero(h);
    }
    net.layers.push_back(std::move(layer));
    in = h;
  }
  net.head_w.setZero(in);
  net.head_b.setZero(1);
  return net;
}

NetworkParams init_params(const Architecture& arch, std::uint64_t seed) {
  NetworkParams net = zero_params(arch);
  std::mt19937_64 rng(seed);
  for (auto& layer : net.layers) {
    const auto h = static_cast<double>(layer.hidden());
    const double stddev = std::sqrt(2.0 / (static_cast<double>(layer.w_f.cols()) + h));
    fill_normal(layer.w_f, stddev, rng);
    fill_normal(layer.w_i, stddev, rng);
    fill_normal(layer.w_j, stddev, rng);
    if (!net.tied_output_gate) fill_normal(layer.w_o, stddev, rng);
  }
  const auto in = static_cast<double>(net.head_w.size());
  std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / (in + 1.0)));
  for (Eigen::Index k = 0; k < net.head_w.size(); ++k) net.head_w(k) = dist(rng);
  return net;
}

CellOutput lstm_cell_forward(const LstmLayerParams& layer, const Vector& x, const Vector& h_prev,
                             const Vector& c_prev, bool tied_output_gate) {
  const auto H = layer.hidden();
  if (h_prev.size() != H || c_prev.size() != H || x.size() != layer.input())
    throw Error(ErrorCode::kDimensionMismatch,
                "cell expects x[" + std::to_string(layer.input()) + "], h/c[" + std::to_string(H) + "]");

  const Vector u = concat(h_prev, x);
  CellOutput out;
  auto& g = out.gates;
  g.input = x;
  g.h_prev = h_prev;
  g.c_prev = c_prev;
  g.f = sigmoid(layer.w_f * u + layer.b_f);
  g.i = sigmoid(layer.w_i * u + layer.b_i);
  const Vector a_j = layer.w_j * u + layer.b_j;
  g.j = a_j.array().tanh();
  g.c = g.f.cwiseProduct(c_prev) + g.i.cwiseProduct(g.j);
  g.z = tied_output_gate ? sigmoid(a_j) : sigmoid(layer.w_o * u + layer.b_o);
  g.tanh_c = g.c.array().tanh();
  g.h = g.z.cwiseProduct(g.tanh_c);
  g.dropout = Vector::Ones(H);
  out.h = g.h;
  out.c = g.c;
  return out;
}

double forward(const NetworkParams& net, const Sequence& sequence, Mode mode, std::mt19937_64* rng,
               ForwardCache* cache) {
  if (sequence.empty()) throw Error(ErrorCode::kDimensionMismatch, "empty sequence");
  const bool drop = mode == Mode::kTrain && net.dropout_rate > 0.0;
  if (drop && rng == nullptr) throw Error(ErrorCode::kDimensionMismatch, "train mode needs an rng");

  const std::size_t T = sequence.size();
  if (cache) cache->steps.assign(net.layers.size(), std::vector<GateCache>(T));

  Sequence inputs = sequence;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    Vector h = Vector::Zero(layer.hidden());
    Vector c = Vector::Zero(layer.hidden());
    for (std::size_t t = 0; t < T; ++t) {
      auto out = lstm_cell_forward(layer, inputs[t], h, c, net.tied_output_gate);
      if (drop) out.gates.dropout = dropout_mask(layer.hidden(), net.dropout_rate, *rng);
      inputs[t] = out.h.cwiseProduct(out.gates.dropout);
      h = std::move(out.h);
      c = std::move(out.c);
      if (cache) cache->steps[l][t] = std::move(out.gates);
    }
  }
  const Vector& top = inputs[T - 1];
  if (top.size() != net.head_w.size()) throw Error(ErrorCode::kDimensionMismatch, "head width");
  const double p = sigmoid(net.head_w.dot(top) + net.head_b(0));
  if (cache) {
    cache->head_input = top;
    cache->p = p;
  }
  return p;
}

double bce_loss(double p, int y) {
  const double q = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
  return y ? -std::log(q) : -std::log(1.0 - q);
}

void backward(const NetworkParams& net, const ForwardCache& cache, int y, Gradients& grads) {
  const std::size_t L = net.layers.size();
  if (cache.steps.size() != L || L == 0 || cache.steps[0].empty())
    throw Error(ErrorCode::kCacheMismatch, "cache does not match the network depth");
  const std::size_t T = cache.steps[0].size();
  for (std::size_t l = 0; l < L; ++l) {
    if (cache.steps[l].size() != T || cache.steps[l][0].h.size() != net.layers[l].hidden())
      throw Error(ErrorCode::kCacheMismatch, "cache layer " + std::to_string(l) + " has the wrong shape");
  }
  if (cache.head_input.size() != net.head_w.size() || grads.layers.size() != L)
    throw Error(ErrorCode::kCacheMismatch, "cache or gradient tree does not match the network");

  // Sigmoid output with BCE: dL/dlogit = p - y.
  const double dlogit = cache.p - static_cast<double>(y);
  grads.head_w += dlogit * cache.head_input;
  grads.head_b(0) += dlogit;

  // Gradient w.r.t. each timestep's (post-dropout) output of the current layer.
  Sequence d_out(T, Vector::Zero(net.layers[L - 1].hidden()));
  d_out[T - 1] = dlogit * net.head_w;

  for (std::size_t l = L; l-- > 0;) {
    const auto& p = net.layers[l];
    auto& g = grads.layers[l];
    const auto H = p.hidden();
    Vector dh_next = Vector::Zero(H);
    Vector dc_next = Vector::Zero(H);
    Sequence d_in(T);

    for (std::size_t t = T; t-- > 0;) {
      const auto& s = cache.steps[l][t];
      const Vector dh = d_out[t].cwiseProduct(s.dropout) + dh_next;
      const Vector dz = dh.cwiseProduct(s.tanh_c);
      const Vector dc =
          dh.cwiseProduct(s.z).cwiseProduct((1.0 - s.tanh_c.array().square()).matrix()) + dc_next;
      dc_next = dc.cwiseProduct(s.f);

      const Vector da_f = (dc.array() * s.c_prev.array() * s.f.array() * (1.0 - s.f.array())).matrix();
      const Vector da_i = (dc.array() * s.j.array() * s.i.array() * (1.0 - s.i.array())).matrix();
      const Vector da_j = (dc.array() * s.i.array() * (1.0 - s.j.array().square())).matrix();
      const Vector da_o = (dz.array() * s.z.array() * (1.0 - s.z.array())).matrix();

      const Vector u = concat(s.h_prev, s.input);
      g.w_f.noalias() += da_f * u.transpose();
      g.w_i.noalias() += da_i * u.transpose();
      g.w_j.noalias() += da_j * u.transpose();
      g.b_f += da_f;
      g.b_i += da_i;
      g.b_j += da_j;

      Vector du = p.w_f.transpose() * da_f + p.w_i.transpose() * da_i;
      if (net.tied_output_gate) {
        g.w_j.noalias() += da_o * u.transpose();
        g.b_j += da_o;
        du.noalias() += p.w_j.transpose() * (da_j + da_o);
      } else {
        g.w_o.noalias() += da_o * u.transpose();
        g.b_o += da_o;
        du.noalias() += p.w_j.transpose() * da_j + p.w_o.transpose() * da_o;
      }
      dh_next = du.head(H);
      d_in[t] = du.tail(du.size() - H);
    }
    d_out = std::move(d_in);
  }
}

Gradients backward(const NetworkParams& net, const ForwardCache& cache, int y) {
  Gradients g = net.zeros_like();
  backward(net, cache, y, g);
  return g;
}

int predict_label(double p, double threshold) { return p >= threshold ? 1 : 0; }

int predict(const NetworkParams& net, const Sequence& sequence, double threshold) {
  return predict_label(forward(net, sequence, Mode::kEval, nullptr), threshold);
}

Sequence to_sequence(const Eigen::Ref<const Eigen::RowVectorXd>& row, int steps) {
  if (steps <= 0 || row.size() % steps != 0)
    throw Error(ErrorCode::kDimensionMismatch,
                std::to_string(row.size()) + " features do not split into " + std::to_string(steps) + " steps");
  const auto width = row.size() / steps;
  Sequence seq;
  seq.reserve(static_cast<std::size_t>(steps));
  for (int t = 0; t < steps; ++t) seq.push_back(row.segment(t * width, width).transpose());
  return seq;
}

}  // namespace edgenet
