// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The EdgeNet Authors

#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "edgenet/lstm_net.hpp"

namespace edgenet {

using Mask = std::vector<std::uint8_t>;

// Per prunable tensor binary masks, keyed by tensor name.
struct SparsityMask {
  std::map<std::string, Mask> masks;
  double current_sparsity = 0.0;

  std::size_t total() const;
  std::size_t survivors() const;
  // Fraction of pruned entries over all masked tensors.
  double achieved_sparsity() const;
};

struct SwdConfig {
  double a0 = 0.001;
  double a_growth = 1.2;
  double target = 0.5;  // T
  double mu = 1e-4;
};

struct SparsitySchedule {
  double initial = 0.25;
  double final = 0.8;
  int epochs = 30;
};

// Number of weights kept at the given sparsity: ceil(N (1 - s)), at least 1.
std::size_t survivor_count(std::size_t n, double sparsity);

// k-th largest magnitude with k = survivor_count(N, sparsity).
double magnitude_threshold(std::span<const double> w, double sparsity);

// Keeps exactly survivor_count(N, sparsity) entries: magnitudes above the
// threshold, then ties at the threshold in ascending index order.
Mask compute_mask(std::span<const double> w, double sparsity);

void apply_mask(std::span<double> w, const Mask& mask);

struct SwdSubset {
  std::vector<std::size_t> indices;
  std::vector<double> values;
};

// Survivors with |w| > a whose magnitude is at or below the T-quantile of that set.
SwdSubset select_swd_subset(std::span<const double> w, const Mask& mask, double a, double target);

struct TwdTerm {
  double twd = 0.0;
  std::vector<double> grad;  // aligned with the subset's indices
};

// TWD = mu * sum(w*^2), gradient 2 mu w* on the subset entries.
TwdTerm total_weight_decay(const SwdSubset& subset, double mu);

double schedule_sparsity(int epoch, const SparsitySchedule& sched);
double schedule_a(int epoch, const SwdConfig& cfg);

// Network-level helpers.
SparsityMask compute_network_mask(const NetworkParams& net, double sparsity);
void apply_network_mask(NetworkParams& net, const SparsityMask& mask);
bool satisfies_mask(const NetworkParams& net, const SparsityMask& mask);
// Adds a * dTWD/dw over every prunable tensor and returns a * TWD.
double add_selective_weight_decay(const NetworkParams& net, const SparsityMask& mask, double a,
                                  const SwdConfig& cfg, Gradients& grads);

}  // namespace edgenet
