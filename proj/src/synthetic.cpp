// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The EdgeNet Authors

#include "edgenet/synthetic.hpp"

#include <cmath>
#include <random>

#include "csv.hpp"
#include "edgenet/error.hpp"

namespace edgenet {

namespace {

// P(x0 + x1^2 <= t) = (2/3) t^(3/2) for t <= 1, so this threshold splits the
// classes evenly.
const double kRuleThreshold = std::pow(0.75, 2.0 / 3.0);

const char* kProtocols[] = {"tcp", "udp", "icmp"};

}  // namespace

int synthetic_rule(const double* x) { return x[0] + x[1] * x[1] > kRuleThreshold ? 1 : 0; }

std::string synthetic_csv(const SyntheticOptions& options) {
  if (options.features < 2) throw Error(ErrorCode::kBadConfig, "synthetic data needs at least two features");
  if (!(options.label_noise >= 0.0 && options.label_noise <= 1.0))
    throw Error(ErrorCode::kBadConfig, "label_noise must lie in [0, 1]");
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution noisy(options.label_noise);
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<int> proto(0, 2);

  std::string out;
  for (int f = 0; f < options.features; ++f) out += "f" + std::to_string(f) + ",";
  out += "proto,label\n";
  std::vector<double> x(static_cast<std::size_t>(options.features));
  for (std::size_t r = 0; r < options.rows; ++r) {
    for (auto& v : x) v = unit(rng);
    int y = synthetic_rule(x.data());
    // Noise replaces the label by a fair coin, so about half of the noisy rows keep it.
    if (noisy(rng)) y = coin(rng) ? 1 : 0;
    for (double v : x) out += detail::exact(v) + ",";
    out += std::string(kProtocols[proto(rng)]) + "," + std::to_string(y) + "\n";
  }
  return out;
}

FeatureSchema synthetic_schema(int features) {
  FeatureSchema schema;
  for (int f = 0; f < features; ++f) {
    const std::string name = "f" + std::to_string(f);
    schema.columns.push_back({name, ColumnKind::kNumeric});
    schema.selected_features.push_back(name);
  }
  schema.columns.push_back({"proto", ColumnKind::kCategorical});
  schema.columns.push_back({"label", ColumnKind::kLabel});
  return schema;
}

}  // namespace edgenet
