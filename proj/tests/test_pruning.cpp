// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The EdgeNet Authors

#include <doctest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include "edgenet/error.hpp"
#include "edgenet/pruning.hpp"
#include "gradcheck.hpp"
#include "test_util.hpp"

using namespace edgenet;
using edgenet::testing::error_code_of;

namespace {

// Brute force: rank every entry by (|w| desc, index asc) and keep the top k.
Mask oracle_mask(const std::vector<double>& w, std::size_t k) {
  Mask m(w.size(), 0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    std::size_t better = 0;
    for (std::size_t j = 0; j < w.size(); ++j)
      if (std::abs(w[j]) > std::abs(w[i]) || (std::abs(w[j]) == std::abs(w[i]) && j < i)) ++better;
    m[i] = better < k;
  }
  return m;
}

}  // namespace

TEST_CASE("magnitude_threshold") {
  const std::vector<double> w{0.5, -0.1, 0.3, -0.7, 0.05};
  CHECK(survivor_count(5, 0.4) == 3);
  CHECK(magnitude_threshold(w, 0.4) == 0.3);
  CHECK(magnitude_threshold(w, 0.0) == 0.05);
  CHECK(magnitude_threshold(std::vector<double>{1, 1, 1, 1}, 0.5) == 1.0);
  CHECK(error_code_of([] { magnitude_threshold(std::vector<double>{}, 0.5); }) == ErrorCode::kEmptyTensor);
}

TEST_CASE("compute_mask") {
  CHECK(compute_mask(std::vector<double>{0.5, -0.1, 0.3, -0.7, 0.05}, 0.4) == Mask{1, 0, 1, 1, 0});
  CHECK(compute_mask(std::vector<double>{0.5, -0.1, 0.3}, 0.0) == Mask{1, 1, 1});
  CHECK(compute_mask(std::vector<double>{1, 1, 1, 1}, 0.5) == Mask{1, 1, 0, 0});
  CHECK(error_code_of([] { compute_mask(std::vector<double>{}, 0.5); }) == ErrorCode::kEmptyTensor);
  CHECK(error_code_of([] { compute_mask(std::vector<double>{1.0}, 1.0); }) == ErrorCode::kBadConfig);
}

TEST_CASE("compute_mask agrees with a brute-force oracle") {
  std::mt19937_64 rng(12);
  std::uniform_int_distribution<int> len(1, 60), level(-4, 4);
  std::uniform_real_distribution<double> sp(0.0, 0.99);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> w(static_cast<std::size_t>(len(rng)));
    for (auto& v : w) v = 0.25 * level(rng);  // coarse grid forces ties
    const double s = sp(rng);
    const auto k = survivor_count(w.size(), s);
    const auto m = compute_mask(w, s);
    CHECK(m == oracle_mask(w, k));
    CHECK(static_cast<std::size_t>(std::count(m.begin(), m.end(), 1)) == k);
    CHECK(k == std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(w.size() * (1.0 - s) - 1e-9))));
    double max_pruned = 0.0, min_kept = 1e300;
    for (std::size_t i = 0; i < w.size(); ++i)
      (m[i] ? min_kept : max_pruned) = m[i] ? std::min(min_kept, std::abs(w[i])) : std::max(max_pruned, std::abs(w[i]));
    CHECK(max_pruned <= min_kept);
  }
}

TEST_CASE("survivor counts at integer-exact products") {
  CHECK(survivor_count(10, 0.8) == 2);
  CHECK(survivor_count(1000, 0.8) == 200);
  CHECK(survivor_count(2048, 0.8) == 410);
  CHECK(survivor_count(5, 0.99) == 1);
}

TEST_CASE("apply_mask") {
  std::vector<double> w{0.5, 0.2};
  apply_mask(w, Mask{1, 0});
  CHECK(w == std::vector<double>{0.5, 0.0});
  std::vector<double> v{0.5, -0.2, 3.0};
  apply_mask(v, Mask{1, 1, 1});
  CHECK(v == std::vector<double>{0.5, -0.2, 3.0});

  std::vector<double> neg{-0.5, -0.2};
  apply_mask(neg, Mask{0, 1});
  CHECK(std::bit_cast<std::uint64_t>(neg[0]) == 0);  // +0.0, not -0.0
  auto once = neg;
  apply_mask(neg, Mask{0, 1});
  CHECK(neg == once);
  CHECK(error_code_of([&] { apply_mask(neg, Mask{1}); }) == ErrorCode::kDimensionMismatch);
}

TEST_CASE("select_swd_subset") {
  const std::vector<double> w{0.9, -0.6, 0.3, -0.2};
  const Mask all{1, 1, 1, 1};
  auto s = select_swd_subset(w, all, 0.1, 0.5);
  CHECK(s.indices == std::vector<std::size_t>{2, 3});
  CHECK(s.values == std::vector<double>{0.3, -0.2});
  CHECK(select_swd_subset(w, all, 1.0, 0.5).indices.empty());
  CHECK(select_swd_subset(w, all, 0.0, 1.0).indices.size() == 4);
  // Pruned entries are never selected.
  s = select_swd_subset(w, Mask{1, 1, 0, 1}, 0.0, 1.0);
  CHECK(s.indices == std::vector<std::size_t>{0, 1, 3});
}

TEST_CASE("select_swd_subset properties") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> w(40);
    Mask m(40);
    for (std::size_t i = 0; i < 40; ++i) w[i] = n(rng), m[i] = u(rng) < 0.6;
    const double a = 0.5 * u(rng), T = 0.05 + 0.95 * u(rng);
    const auto s = select_swd_subset(w, m, a, T);
    std::size_t sub = 0;
    for (std::size_t i = 0; i < 40; ++i) sub += m[i] && std::abs(w[i]) > a;
    CHECK(s.indices.size() <= static_cast<std::size_t>(std::ceil(T * sub)));
    CHECK(std::is_sorted(s.indices.begin(), s.indices.end()));
    for (auto i : s.indices) {
      CHECK(m[i] == 1);
      CHECK(std::abs(w[i]) > a);
    }
  }
}

TEST_CASE("total_weight_decay") {
  auto t = total_weight_decay({{0, 1}, {0.2, -0.1}}, 0.01);
  CHECK(t.twd == doctest::Approx(5e-4).epsilon(1e-12));
  CHECK(t.grad[0] == doctest::Approx(0.004).epsilon(1e-12));
  CHECK(total_weight_decay({}, 0.01).twd == 0.0);
  t = total_weight_decay({{0}, {0.7}}, 0.0);
  CHECK(t.twd == 0.0);
  CHECK(t.grad[0] == 0.0);
}

TEST_CASE("a-scaled selective weight decay matches finite differences") {
  auto net = testing::random_small_net(31);
  const auto mask = compute_network_mask(net, 0.3);
  apply_network_mask(net, mask);
  SwdConfig cfg;
  cfg.mu = 0.05;
  const double a = 0.2;
  Gradients g = net.zeros_like();
  add_selective_weight_decay(net, mask, a, cfg, g);

  // The subset is piecewise constant in w, so probe only entries well away
  // from selection boundaries by using a tiny step.
  const double eps = 1e-7;
  auto value = [&](const NetworkParams& n) {
    Gradients scratch = n.zeros_like();
    return add_selective_weight_decay(n, mask, a, cfg, scratch);
  };
  std::vector<const double*> gp;
  for_each_tensor(g, [&](const std::string&, const auto& t, bool) { gp.push_back(t.data()); });
  std::size_t k = 0;
  NetworkParams probe = net;
  for_each_tensor(probe, [&](const std::string&, auto& t, bool) {
    const double* grad = gp[k++];
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      const double saved = t.data()[i];
      t.data()[i] = saved + eps;
      const double up = value(probe);
      t.data()[i] = saved - eps;
      const double down = value(probe);
      t.data()[i] = saved;
      CHECK(std::abs((up - down) / (2 * eps) - grad[i]) < 1e-8);
    }
  });
}

TEST_CASE("schedules") {
  const SparsitySchedule s{0.25, 0.8, 10};
  CHECK(schedule_sparsity(0, s) == 0.25);
  CHECK(schedule_sparsity(9, s) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(schedule_sparsity(4, s) == doctest::Approx(0.494444).epsilon(1e-6));
  CHECK(schedule_sparsity(0, SparsitySchedule{0.25, 0.8, 1}) == 0.8);
  CHECK(error_code_of([&] { schedule_sparsity(10, s); }) == ErrorCode::kEpochOutOfRange);
  CHECK(error_code_of([&] { schedule_sparsity(-1, s); }) == ErrorCode::kEpochOutOfRange);

  const SwdConfig cfg;
  CHECK(schedule_a(0, cfg) == 0.001);
  CHECK(schedule_a(1, cfg) == doctest::Approx(0.0012).epsilon(1e-15));
  CHECK(schedule_a(200, cfg) == 0.5);
}

TEST_CASE("network masks keep the scheduled count in every prunable tensor") {
  auto net = init_params(Architecture{}, 4);
  for (double s : {0.25, 0.5, 0.8}) {
    const auto mask = compute_network_mask(net, s);
    std::size_t tensors = 0;
    for_each_tensor(net, [&](const std::string& name, const auto& t, bool is_weight) {
      if (!is_weight) {
        CHECK(mask.masks.count(name) == 0);
        return;
      }
      ++tensors;
      const auto& m = mask.masks.at(name);
      CHECK(static_cast<std::size_t>(std::count(m.begin(), m.end(), 1)) ==
            survivor_count(static_cast<std::size_t>(t.size()), s));
    });
    CHECK(tensors == 13);
    auto pruned = net;
    apply_network_mask(pruned, mask);
    CHECK(satisfies_mask(pruned, mask));
    CHECK_FALSE(satisfies_mask(net, mask));
  }
}
