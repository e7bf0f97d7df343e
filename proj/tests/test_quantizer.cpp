// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The EdgeNet Authors

#include <doctest.h>

#include <cmath>
#include <random>

#include "edgenet/error.hpp"
#include "edgenet/quantizer.hpp"
#include "gradcheck.hpp"
#include "test_util.hpp"

using namespace edgenet;
using edgenet::testing::error_code_of;

TEST_CASE("calibrate widens to include zero") {
  CHECK(calibrate(std::vector<double>{-0.5, 0.25, 0.75}) == std::pair{-0.5, 0.75});
  CHECK(calibrate(std::vector<double>{0.2, 0.9}) == std::pair{0.0, 0.9});
  CHECK(calibrate(std::vector<double>{-0.3, -0.1}) == std::pair{-0.3, 0.0});
  CHECK(calibrate(std::vector<double>{0, 0, 0}) == std::pair{0.0, 0.0});
  CHECK(error_code_of([] { calibrate(std::vector<double>{}); }) == ErrorCode::kEmptyTensor);
}

TEST_CASE("make_quant_params") {
  auto p = make_quant_params(-1.0, 1.0);
  CHECK(p.scale == doctest::Approx(2.0 / 255.0).epsilon(1e-15));
  CHECK(p.zero_point == 0);  // round-half-even of -0.5
  p = make_quant_params(0.0, 1.0);
  CHECK(p.scale == doctest::Approx(1.0 / 255.0).epsilon(1e-15));
  CHECK(p.zero_point == -128);
  p = make_quant_params(0.4, 0.4);
  CHECK(p.scale == 1.0);
  CHECK(p.zero_point == 0);
  CHECK(error_code_of([] { make_quant_params(1.0, 0.0); }) == ErrorCode::kBadConfig);
}

TEST_CASE("quantize and dequantize hand-evaluated values") {
  const auto p = make_quant_params(-1.0, 1.0);
  CHECK(quantize_value(0.0, p) == 0);
  CHECK(quantize_value(1.0, p) == 127);
  CHECK(quantize_value(-1.0, p) == -128);
  CHECK(dequantize_value(0, p) == 0.0);
  CHECK(dequantize_value(127, p) == doctest::Approx(254.0 / 255.0).epsilon(1e-15));
  CHECK(dequantize_value(127, p) == doctest::Approx(0.996078).epsilon(1e-6));

  const auto q = make_quant_params(0.0, 1.0);
  CHECK(quantize_value(0.0, q) == q.q_min);
  CHECK(quantize_value(5.0, q) == q.q_max);
}

TEST_CASE("round-trip bound, monotonicity and exact zero over grids") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    double a = u(rng), b = u(rng);
    if (trial % 5 == 0) a = -b;  // symmetric ranges too
    const auto [lo, hi] = calibrate(std::vector<double>{a, b});
    if (lo == hi) continue;
    const auto p = make_quant_params(lo, hi);
    const double z_real = p.q_min - lo / p.scale;
    const bool exact_z = z_real == std::nearbyint(z_real);
    const int n = 10000;
    std::int32_t prev = p.q_min;
    for (int k = 0; k <= n; ++k) {
      const double r = lo + (hi - lo) * k / n;
      const auto q = quantize_value(r, p);
      CHECK(q >= p.q_min);
      CHECK(q <= p.q_max);
      CHECK(q >= prev);
      prev = q;
      const double err = std::abs(dequantize_value(q, p) - r);
      CHECK(err <= p.scale * (1.0 + 1e-9));
      if (exact_z) CHECK(err <= p.scale * (0.5 + 1e-9));
    }
    CHECK(dequantize_value(quantize_value(0.0, p), p) == 0.0);
  }
}

TEST_CASE("requantizing is idempotent") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 0.4);
  Tensor t(16, 20);
  for (Eigen::Index k = 0; k < t.size(); ++k) t.data()[k] = n(rng);
  const auto [lo, hi] = calibrate({t.data(), static_cast<std::size_t>(t.size())});
  const auto p = make_quant_params(lo, hi);
  const auto q1 = quantize(t, p);
  const auto q2 = quantize(dequantize(q1), p);
  CHECK(q1.values == q2.values);
}

TEST_CASE("quantize_model") {
  SUBCASE("all-zero weights map to the zero point and dequantize to 0") {
    Architecture arch;
    arch.input_size = 3;
    arch.hidden_sizes = {4};
    const auto net = zero_params(arch);
    const auto qm = quantize_model(net);
    for (const auto& [name, qt] : qm.weights)
      for (auto v : qt.values) CHECK(v == qt.params.zero_point);
    const auto back = dequantize_model(qm);
    zip_tensors(back, net, [&](const std::string&, auto& a, auto& b, bool) { CHECK((a == b).all()); });
    Sequence seq{Vector::Constant(3, 0.5)};
    CHECK(quantized_forward(qm, seq) == 0.5);
    CHECK(quantized_forward(qm, seq) == forward(net, seq, Mode::kEval, nullptr));
  }

  SUBCASE("one byte per weight, biases kept, scale exact in float32") {
    const auto net = init_params(Architecture{}, 3);
    const auto qm = quantize_model(net);
    std::size_t weights = 0;
    for_each_tensor(net, [&](const std::string& name, const auto& t, bool is_weight) {
      if (is_weight) {
        const auto& qt = qm.weights.at(name);
        CHECK(qt.values.size() * sizeof(std::int8_t) * 4 == static_cast<std::size_t>(t.size()) * sizeof(float));
        CHECK(static_cast<double>(static_cast<float>(qt.params.scale)) == qt.params.scale);
        ++weights;
      } else {
        CHECK(qm.biases.at(name).size() == static_cast<std::size_t>(t.size()));
      }
    });
    CHECK(weights == qm.weights.size());
  }

  SUBCASE("pruned zeros survive exactly") {
    auto net = init_params(Architecture{}, 5);
    const auto mask = compute_network_mask(net, 0.8);
    apply_network_mask(net, mask);
    const auto qm = quantize_model(net, {}, mask);
    const auto back = dequantize_model(qm);
    CHECK(satisfies_mask(back, mask));
    for (const auto& [name, m] : mask.masks) {
      const auto& qt = qm.weights.at(name);
      for (std::size_t k = 0; k < m.size(); ++k)
        if (!m[k]) CHECK(qt.values[k] == qt.params.zero_point);
    }
  }

  SUBCASE("fixed range uses [-1, 1]") {
    QuantOptions opt;
    opt.fixed_range = true;
    const auto qm = quantize_model(init_params(Architecture{}, 1), opt);
    for (const auto& [name, qt] : qm.weights) {
      CHECK(qt.params.zero_point == 0);
      CHECK(qt.params.scale == static_cast<float>(2.0 / 255.0));
    }
  }
}

TEST_CASE("quantized inference tracks the float path") {
  std::mt19937_64 data(99);
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto net = testing::random_small_net(seed, 3, 4, seed % 2 == 1);
    Sequence seq = testing::random_sequence(2, 3, data);
    for (auto& x : seq) x = (x.array() * 0.5 + 0.5).cwiseMax(0.0).cwiseMin(1.0);  // inputs in [0, 1]
    const double pf = forward(net, seq, Mode::kEval, nullptr);
    const double pq = quantized_forward(quantize_model(net), seq);
    worst = std::max(worst, std::abs(pf - pq));
  }
  CHECK(worst <= 0.05);
  MESSAGE("max |p_quant - p_float| = " << worst);

  const auto net = testing::random_small_net(1);
  CHECK(error_code_of([&] { quantized_forward(quantize_model(net), Sequence{Vector::Zero(5)}); }) ==
        ErrorCode::kDimensionMismatch);
}
