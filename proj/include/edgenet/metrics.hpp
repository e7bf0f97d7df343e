// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The EdgeNet Authors

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace edgenet {

// Positive class is anomaly (1).
struct ConfusionMatrix {
  std::uint64_t tp = 0, tn = 0, fp = 0, fn = 0;

  std::uint64_t total() const { return tp + tn + fp + fn; }
  ConfusionMatrix& operator+=(const ConfusionMatrix& o);
};

struct MetricReport {
  double accuracy = 0.0;
  double far = 0.0;
  double precision = 0.0;
  double detection_rate = 0.0;
  double f1 = 0.0;
  // Set when a zero denominator forced a metric to 0.
  bool degenerate = false;
};

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

ConfusionMatrix confusion(std::span<const std::uint8_t> labels, std::span<const std::uint8_t> preds);
MetricReport metrics_from_confusion(const ConfusionMatrix& cm);
double f1_score(double precision, double detection_rate);

RocCurve roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels);

// Header and row in the FAR%, Acc%, Prec%, DR%, F1% column order, 4 decimals.
std::string metrics_csv_header();
std::string metrics_csv_row(const std::string& model, const MetricReport& m);
std::string roc_csv(const RocCurve& roc);

}  // namespace edgenet
