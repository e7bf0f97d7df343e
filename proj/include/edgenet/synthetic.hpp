// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The EdgeNet Authors

#pragma once

#include <cstdint>
#include <string>

#include "edgenet/data_pipeline.hpp"

namespace edgenet {

// Seeded binary-classification table used for desk-scale end-to-end runs.
// Features are uniform in [0, 1]; the label is 1 when x0 + x1^2 exceeds the
// median of that sum, and with probability label_noise it is replaced by a
// fair coin flip. The remaining features are distractors.
struct SyntheticOptions {
  std::size_t rows = 5000;
  int features = 10;
  double label_noise = 0.05;
  std::uint64_t seed = 2024;
};

int synthetic_rule(const double* x);

// CSV text with columns f0..f{n-1}, proto (categorical, not selected) and label.
std::string synthetic_csv(const SyntheticOptions& options);
FeatureSchema synthetic_schema(int features);

}  // namespace edgenet
