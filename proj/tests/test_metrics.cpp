// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The EdgeNet Authors

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "edgenet/error.hpp"
#include "edgenet/metrics.hpp"
#include "test_util.hpp"

using namespace edgenet;
using edgenet::testing::error_code_of;

namespace {

using Labels = std::vector<std::uint8_t>;

// Pairwise (Mann-Whitney) statistic with half credit for ties.
double pairwise_auc(const std::vector<double>& s, const Labels& y) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!y[i]) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j]) continue;
      pairs += 1.0;
      wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return wins / pairs;
}

}  // namespace

TEST_CASE("confusion") {
  auto cm = confusion(Labels{1, 1, 0, 0}, Labels{1, 0, 0, 1});
  CHECK(cm.tp == 1);
  CHECK(cm.fn == 1);
  CHECK(cm.tn == 1);
  CHECK(cm.fp == 1);
  cm = confusion(Labels{1, 0, 1}, Labels{1, 0, 1});
  CHECK(cm.fp == 0);
  CHECK(cm.fn == 0);
  cm = confusion(Labels{0, 0, 0}, Labels{1, 1, 1});
  CHECK(cm.fp == 3);
  CHECK(cm.total() == 3);
  CHECK(error_code_of([] { confusion(Labels{1}, Labels{1, 0}); }) == ErrorCode::kLengthMismatch);
  CHECK(error_code_of([] { confusion(Labels{}, Labels{}); }) == ErrorCode::kEmptyInput);
}

TEST_CASE("metrics_from_confusion hand-evaluated") {
  const auto m = metrics_from_confusion({90, 80, 20, 10});
  CHECK(m.accuracy == doctest::Approx(0.85).epsilon(1e-12));
  CHECK(m.precision == doctest::Approx(0.818182).epsilon(1e-6));
  CHECK(m.detection_rate == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(m.far == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(m.f1 == doctest::Approx(0.857143).epsilon(1e-6));
  CHECK_FALSE(m.degenerate);

  const auto perfect = metrics_from_confusion({50, 0, 0, 0});
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.precision == 1.0);
  CHECK(perfect.detection_rate == 1.0);
  CHECK(perfect.f1 == 1.0);
  CHECK(perfect.far == 0.0);
  CHECK(perfect.degenerate);  // fp + tn = 0

  const auto none = metrics_from_confusion({0, 10, 0, 5});
  CHECK(none.precision == 0.0);
  CHECK(none.f1 == 0.0);
  CHECK(none.degenerate);
}

TEST_CASE("published F1 relation") {
  const double f1 = 100.0 * f1_score(0.936487, 0.862710);
  CHECK(std::abs(f1 - 89.8086) < 1e-3);
}

TEST_CASE("metrics agree with a brute-force oracle on random matrices") {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<std::uint64_t> count(0, 1000);
  for (int trial = 0; trial < 10000; ++trial) {
    ConfusionMatrix cm{count(rng), count(rng), count(rng), count(rng)};
    if (trial % 50 == 0) cm.fp = 0, cm.tp = 0;
    if (cm.total() == 0) continue;
    const auto m = metrics_from_confusion(cm);
    const double tp = cm.tp, tn = cm.tn, fp = cm.fp, fn = cm.fn;
    const double acc = (tp + tn) / (tp + tn + fp + fn);
    const double prec = tp + fp > 0 ? tp / (tp + fp) : 0.0;
    const double dr = tp + fn > 0 ? tp / (tp + fn) : 0.0;
    const double far = fp + tn > 0 ? fp / (fp + tn) : 0.0;
    const double f1 = prec + dr > 0 ? 2 * prec * dr / (prec + dr) : 0.0;
    CHECK(std::abs(m.accuracy - acc) <= 1e-12);
    CHECK(std::abs(m.precision - prec) <= 1e-12);
    CHECK(std::abs(m.detection_rate - dr) <= 1e-12);
    CHECK(std::abs(m.far - far) <= 1e-12);
    CHECK(std::abs(m.f1 - f1) <= 1e-12);
    CHECK(std::abs(m.accuracy + (fp + fn) / cm.total() - 1.0) <= 1e-12);
    CHECK(m.f1 >= std::min(m.precision, m.detection_rate) - 1e-12);
    CHECK(m.f1 <= std::max(m.precision, m.detection_rate) + 1e-12);
    CHECK(m.f1 <= std::sqrt(m.precision * m.detection_rate) + 1e-12);
  }
}

TEST_CASE("roc_curve hand-evaluated") {
  auto roc = roc_curve(std::vector<double>{0.9, 0.8, 0.3, 0.1}, Labels{1, 1, 0, 0});
  CHECK(roc.auc == 1.0);
  CHECK(roc.points.front().fpr == 0.0);
  CHECK(roc.points.front().tpr == 0.0);
  CHECK(roc.points.back().fpr == 1.0);
  CHECK(roc.points.back().tpr == 1.0);
  roc = roc_curve(std::vector<double>{0.9, 0.8, 0.6, 0.1}, Labels{1, 0, 1, 0});
  CHECK(roc.auc == doctest::Approx(0.75).epsilon(1e-15));
  roc = roc_curve(std::vector<double>{0.5, 0.5, 0.5}, Labels{1, 0, 1});
  CHECK(roc.auc == 0.5);
  CHECK(roc.points.size() == 2);

  CHECK(error_code_of([] { roc_curve(std::vector<double>{0.1, 0.2}, Labels{1, 1}); }) ==
        ErrorCode::kSingleClassInput);
  CHECK(error_code_of([] { roc_curve(std::vector<double>{0.1}, Labels{1, 0}); }) == ErrorCode::kLengthMismatch);
}

TEST_CASE("shuffled labels give chance-level AUC") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> s(10000);
  Labels y(10000);
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = u(rng), y[k] = k % 2;
  std::shuffle(y.begin(), y.end(), rng);
  CHECK(std::abs(roc_curve(s, y).auc - 0.5) <= 0.02);
}

TEST_CASE("AUC equals the pairwise statistic") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> len(2, 200), level(0, 20);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto n = static_cast<std::size_t>(len(rng));
    std::vector<double> s(n);
    Labels y(n);
    for (std::size_t k = 0; k < n; ++k) s[k] = level(rng) / 20.0, y[k] = rng() % 2;
    y[0] = 1, y[1] = 0;
    const auto roc = roc_curve(s, y);
    CHECK(std::abs(roc.auc - pairwise_auc(s, y)) <= 1e-9);
    for (std::size_t k = 1; k < roc.points.size(); ++k) {
      CHECK(roc.points[k].fpr >= roc.points[k - 1].fpr);
      CHECK(roc.points[k].tpr >= roc.points[k - 1].tpr);
    }
    CHECK(roc.points.back().fpr == 1.0);
    CHECK(roc.points.back().tpr == 1.0);
  }
}

TEST_CASE("CSV output") {
  CHECK(metrics_csv_header() == "model,FAR%,Acc%,Prec%,DR%,F1%\n");
  const auto m = metrics_from_confusion({90, 80, 20, 10});
  CHECK(metrics_csv_row("baseline", m) == "baseline,20.0000,85.0000,81.8182,90.0000,85.7143\n");
  CHECK(metrics_csv_row("a,b", m).rfind("\"a,b\",", 0) == 0);
  const auto roc = roc_curve(std::vector<double>{0.9, 0.1}, Labels{1, 0});
  CHECK(roc_csv(roc) == "fpr,tpr\n0,0\n0,1\n1,1\n");
}
