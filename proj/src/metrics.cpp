// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The EdgeNet Authors

#include "edgenet/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "csv.hpp"
#include "edgenet/error.hpp"

namespace edgenet {

namespace {

double ratio_or_zero(double num, double den, bool& degenerate) {
  if (den == 0.0) {
    degenerate = true;
    return 0.0;
  }
  return num / den;
}

}  // namespace

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& o) {
  tp += o.tp;
  tn += o.tn;
  fp += o.fp;
  fn += o.fn;
  return *this;
}

ConfusionMatrix confusion(std::span<const std::uint8_t> labels, std::span<const std::uint8_t> preds) {
  if (labels.size() != preds.size()) throw Error(ErrorCode::kLengthMismatch, "labels vs predictions");
  if (labels.empty()) throw Error(ErrorCode::kEmptyInput, "confusion of zero samples");
  ConfusionMatrix cm;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    const bool actual = labels[k] != 0;
    const bool predicted = preds[k] != 0;
    if (actual && predicted) ++cm.tp;
    else if (actual) ++cm.fn;
    else if (predicted) ++cm.fp;
    else ++cm.tn;
  }
  return cm;
}

double f1_score(double precision, double detection_rate) {
  const double s = precision + detection_rate;
  return s == 0.0 ? 0.0 : 2.0 * precision * detection_rate / s;
}

MetricReport metrics_from_confusion(const ConfusionMatrix& cm) {
  const auto tp = static_cast<double>(cm.tp);
  const auto tn = static_cast<double>(cm.tn);
  const auto fp = static_cast<double>(cm.fp);
  const auto fn = static_cast<double>(cm.fn);
  MetricReport m;
  m.accuracy = ratio_or_zero(tp + tn, tp + tn + fp + fn, m.degenerate);
  m.far = ratio_or_zero(fp, fp + tn, m.degenerate);
  m.precision = ratio_or_zero(tp, tp + fp, m.degenerate);
  m.detection_rate = ratio_or_zero(tp, tp + fn, m.degenerate);
  if (m.precision + m.detection_rate == 0.0) m.degenerate = true;
  m.f1 = f1_score(m.precision, m.detection_rate);
  return m;
}

RocCurve roc_curve(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) throw Error(ErrorCode::kLengthMismatch, "scores vs labels");
  if (scores.empty()) throw Error(ErrorCode::kEmptyInput, "roc of zero samples");
  const auto positives = static_cast<std::size_t>(std::count_if(labels.begin(), labels.end(), [](auto l) { return l != 0; }));
  const auto negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0)
    throw Error(ErrorCode::kSingleClassInput, "ROC needs both classes");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve roc;
  roc.points.push_back({0.0, 0.0});
  std::size_t tp = 0, fp = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double s = scores[order[k]];
    // Equal scores form one threshold step.
    for (; k < order.size() && scores[order[k]] == s; ++k) {
      if (labels[order[k]]) ++tp;
      else ++fp;
    }
    const RocPoint next{static_cast<double>(fp) / negatives, static_cast<double>(tp) / positives};
    const RocPoint& prev = roc.points.back();
    roc.auc += (next.fpr - prev.fpr) * (next.tpr + prev.tpr) / 2.0;
    roc.points.push_back(next);
  }
  return roc;
}

std::string metrics_csv_header() { return "model,FAR%,Acc%,Prec%,DR%,F1%\n"; }

std::string metrics_csv_row(const std::string& model, const MetricReport& m) {
  using detail::fixed;
  return detail::csv_field(model) + "," + fixed(100.0 * m.far, 4) + "," + fixed(100.0 * m.accuracy, 4) + "," +
         fixed(100.0 * m.precision, 4) + "," + fixed(100.0 * m.detection_rate, 4) + "," + fixed(100.0 * m.f1, 4) +
         "\n";
}

std::string roc_csv(const RocCurve& roc) {
  std::string out = "fpr,tpr\n";
  for (const auto& p : roc.points) out += detail::exact(p.fpr) + "," + detail::exact(p.tpr) + "\n";
  return out;
}

}  // namespace edgenet
