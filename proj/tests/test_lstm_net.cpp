// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The EdgeNet Authors

#include <doctest.h>

#include <cmath>

#include "edgenet/error.hpp"
#include "edgenet/lstm_net.hpp"
#include "gradcheck.hpp"
#include "test_util.hpp"

using namespace edgenet;
using edgenet::testing::error_code_of;

namespace {

LstmLayerParams zero_layer(int H, int D) {
  Architecture arch;
  arch.input_size = D;
  arch.hidden_sizes = {H};
  return zero_params(arch).layers[0];
}

}  // namespace

TEST_CASE("init_params shapes, determinism and scale") {
  Architecture arch;  // D=10, 3 x 32
  const auto a = init_params(arch, 11);
  const auto b = init_params(arch, 11);
  CHECK(a.layers.size() == 3);
  CHECK(a.layers[0].w_f.rows() == 32);
  CHECK(a.layers[0].w_f.cols() == 42);
  CHECK(a.layers[1].w_f.cols() == 64);
  CHECK(a.head_w.size() == 32);
  CHECK(a.head_b.size() == 1);
  bool same = true;
  zip_tensors(a, b, [&](const std::string&, auto& x, auto& y, bool) { same = same && (x == y).all(); });
  CHECK(same);

  const auto& w = a.layers[0].w_f;
  const double mean = w.mean();
  const double sd = std::sqrt((w.array() - mean).square().sum() / static_cast<double>(w.size() - 1));
  const double expected = std::sqrt(2.0 / 74.0);
  CHECK(std::abs(sd - expected) < 0.2 * expected);
  CHECK(a.layers[0].b_f.isZero());
  CHECK(a.head_b.isZero());
}

TEST_CASE("tied output gate drops w_o and b_o") {
  Architecture arch;
  arch.tied_output_gate = true;
  const auto net = init_params(arch, 1);
  int weights = 0;
  for_each_tensor(net, [&](const std::string&, const auto&, bool is_weight) { weights += is_weight; });
  CHECK(weights == 3 * 3 + 1);
  CHECK(net.layers[0].w_o.size() == 0);
}

TEST_CASE("lstm_cell_forward hand-evaluated cases") {
  auto layer = zero_layer(1, 1);
  const Vector x = Vector::Zero(1);

  auto out = lstm_cell_forward(layer, x, Vector::Zero(1), Vector::Zero(1));
  CHECK(out.gates.f(0) == 0.5);
  CHECK(out.gates.i(0) == 0.5);
  CHECK(out.gates.z(0) == 0.5);
  CHECK(out.gates.j(0) == 0.0);
  CHECK(out.c(0) == 0.0);
  CHECK(out.h(0) == 0.0);

  out = lstm_cell_forward(layer, x, Vector::Zero(1), Vector::Ones(1));
  CHECK(out.c(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(out.h(0) == doctest::Approx(0.5 * std::tanh(0.5)).epsilon(1e-12));
  CHECK(out.h(0) == doctest::Approx(0.231059).epsilon(1e-6));

  layer.b_f(0) = 100.0;
  out = lstm_cell_forward(layer, x, Vector::Zero(1), Vector::Constant(1, 0.8));
  CHECK(out.c(0) == doctest::Approx(0.8).epsilon(1e-12));

  CHECK(error_code_of([&] { lstm_cell_forward(layer, Vector::Zero(2), Vector::Zero(1), Vector::Zero(1)); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("gate ranges and cell bound hold for random inputs") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    auto net = testing::random_small_net(static_cast<std::uint64_t>(trial), 3, 4);
    Vector x(3), h(4), c(4);
    for (int k = 0; k < 3; ++k) x(k) = n(rng);
    for (int k = 0; k < 4; ++k) h(k) = std::tanh(n(rng)), c(k) = n(rng);
    const auto out = lstm_cell_forward(net.layers[0], x, h, c);
    const auto& g = out.gates;
    CHECK((g.f.array() > 0).all());
    CHECK((g.f.array() < 1).all());
    CHECK((g.i.array() > 0).all());
    CHECK((g.i.array() < 1).all());
    CHECK((g.z.array() > 0).all());
    CHECK((g.z.array() < 1).all());
    CHECK((g.j.array().abs() < 1).all());
    CHECK((out.c.array().abs() <= c.array().abs() + 1.0).all());
  }
}

TEST_CASE("forward on an all-zero net gives 0.5") {
  Architecture arch;
  const auto net = zero_params(arch);
  Sequence seq{Vector::Constant(10, 0.3)};
  CHECK(forward(net, seq, Mode::kEval, nullptr) == 0.5);
  CHECK(error_code_of([&] { forward(net, Sequence{Vector::Zero(3)}, Mode::kEval, nullptr); }) ==
        ErrorCode::kDimensionMismatch);
}

TEST_CASE("dropout rate zero makes train and eval identical") {
  auto net = testing::random_small_net(5, 3, 4, false, 0.0);
  std::mt19937_64 rng(1), data(2);
  const auto seq = testing::random_sequence(3, 3, data);
  CHECK(forward(net, seq, Mode::kTrain, &rng) == forward(net, seq, Mode::kEval, nullptr));
}

TEST_CASE("inverted dropout preserves the expected activation") {
  // Single layer: head input is the dropped-out h, so E[head_input] = h.
  Architecture arch;
  arch.input_size = 3;
  arch.hidden_sizes = {6};
  arch.dropout_rate = 0.1;
  const auto net = init_params(arch, 8);
  std::mt19937_64 data(4);
  const auto seq = testing::random_sequence(1, 3, data);
  ForwardCache eval_cache;
  forward(net, seq, Mode::kEval, nullptr, &eval_cache);

  std::mt19937_64 rng(9);
  Vector sum = Vector::Zero(6), sq = Vector::Zero(6);
  const int n = 10000;
  for (int s = 0; s < n; ++s) {
    ForwardCache cache;
    forward(net, seq, Mode::kTrain, &rng, &cache);
    sum += cache.head_input;
    sq += cache.head_input.cwiseProduct(cache.head_input);
  }
  const Vector mean = sum / n;
  for (int k = 0; k < 6; ++k) {
    const double var = sq(k) / n - mean(k) * mean(k);
    const double se = std::sqrt(std::max(var, 0.0) / n);
    CHECK(std::abs(mean(k) - eval_cache.head_input(k)) <= 4.0 * se + 1e-12);
  }
}

TEST_CASE("bce_loss hand-evaluated cases") {
  CHECK(bce_loss(0.5, 1) == doctest::Approx(0.693147).epsilon(1e-6));
  CHECK(bce_loss(1.0, 1) == doctest::Approx(1e-7).epsilon(1e-3));
  CHECK(bce_loss(0.9, 0) == doctest::Approx(2.302585).epsilon(1e-6));
  CHECK(std::isfinite(bce_loss(0.0, 1)));
}

TEST_CASE("head bias gradient equals p - y") {
  auto net = testing::random_small_net(21);
  std::mt19937_64 data(1), rng(2);
  const auto seq = testing::random_sequence(2, 3, data);
  ForwardCache cache;
  const double p = forward(net, seq, Mode::kTrain, &rng, &cache);
  for (int y : {0, 1}) CHECK(backward(net, cache, y).head_b(0) == doctest::Approx(p - y).epsilon(1e-14));
}

TEST_CASE("zero head weights cut every LSTM gradient") {
  auto net = testing::random_small_net(22);
  net.head_w.setZero();
  std::mt19937_64 data(1), rng(2);
  ForwardCache cache;
  forward(net, testing::random_sequence(2, 3, data), Mode::kTrain, &rng, &cache);
  const auto g = backward(net, cache, 1);
  for_each_tensor(g, [&](const std::string& name, const auto& t, bool) {
    if (name.rfind("lstm", 0) == 0) CHECK_MESSAGE(t.isZero(0.0), name);
  });
}

TEST_CASE("analytic gradients match central differences") {
  std::mt19937_64 data(77);
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    for (bool tied : {false, true}) {
      const auto net = testing::random_small_net(seed, 3, 4, tied);
      const auto seq = testing::random_sequence(2, 3, data);
      const auto r = testing::finite_difference_check(net, seq, static_cast<int>(seed % 2), seed + 1000);
      CHECK_MESSAGE(r.max_rel_error < 1e-4, "seed " << seed << " tied " << tied << " worst " << r.worst << " "
                                                     << r.max_rel_error);
    }
  }
}

TEST_CASE("backward validates the cache") {
  auto net = testing::random_small_net(1);
  ForwardCache empty;
  CHECK(error_code_of([&] { backward(net, empty, 1); }) == ErrorCode::kCacheMismatch);

  std::mt19937_64 data(1);
  ForwardCache cache;
  forward(net, testing::random_sequence(2, 3, data), Mode::kEval, nullptr, &cache);
  auto other = testing::random_small_net(1, 3, 5);
  CHECK(error_code_of([&] { backward(other, cache, 1); }) == ErrorCode::kCacheMismatch);
}

TEST_CASE("predict uses p >= threshold") {
  CHECK(predict_label(0.7, 0.5) == 1);
  CHECK(predict_label(0.5, 0.5) == 1);
  CHECK(predict_label(0.2, 0.1) == 1);
  CHECK(predict_label(0.49, 0.5) == 0);
  Architecture arch;
  CHECK(predict(zero_params(arch), Sequence{Vector::Zero(10)}) == 1);
}

TEST_CASE("to_sequence splits rows into equal steps") {
  Eigen::RowVectorXd row(6);
  row << 1, 2, 3, 4, 5, 6;
  const auto seq = to_sequence(row, 3);
  REQUIRE(seq.size() == 3);
  CHECK(seq[1](0) == 3);
  CHECK(seq[2](1) == 6);
  CHECK(error_code_of([&] { to_sequence(row, 4); }) == ErrorCode::kDimensionMismatch);
}
