// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The EdgeNet Authors

#include "edgenet/pruning.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "edgenet/error.hpp"

namespace edgenet {

namespace {

// Tolerance for products like N * (1 - s) that should be integers.
constexpr double kCountSlack = 1e-9;

void check_sparsity(double sparsity) {
  if (!(sparsity >= 0.0 && sparsity < 1.0))
    throw Error(ErrorCode::kBadConfig, "sparsity must lie in [0, 1), got " + std::to_string(sparsity));
}

// Indices ordered by magnitude descending, ties by ascending index.
std::vector<std::size_t> rank_by_magnitude(std::span<const double> w) {
  std::vector<std::size_t> order(w.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(w[a]) > std::abs(w[b]); });
  return order;
}

}  // namespace

std::size_t SparsityMask::total() const {
  std::size_t n = 0;
  for (const auto& [name, m] : masks) n += m.size();
  return n;
}

std::size_t SparsityMask::survivors() const {
  std::size_t n = 0;
  for (const auto& [name, m] : masks) n += static_cast<std::size_t>(std::count(m.begin(), m.end(), 1));
  return n;
}

double SparsityMask::achieved_sparsity() const {
  const auto n = total();
  return n == 0 ? 0.0 : 1.0 - static_cast<double>(survivors()) / static_cast<double>(n);
}

std::size_t survivor_count(std::size_t n, double sparsity) {
  check_sparsity(sparsity);
  const double exact = static_cast<double>(n) * (1.0 - sparsity);
  const auto k = static_cast<std::size_t>(std::ceil(exact - kCountSlack));
  return std::clamp<std::size_t>(k, 1, std::max<std::size_t>(n, 1));
}

double magnitude_threshold(std::span<const double> w, double sparsity) {
  if (w.empty()) throw Error(ErrorCode::kEmptyTensor, "magnitude_threshold");
  const auto k = survivor_count(w.size(), sparsity);
  std::vector<double> s(w.size());
  std::transform(w.begin(), w.end(), s.begin(), [](double v) { return std::abs(v); });
  std::nth_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(k - 1), s.end(), std::greater<>());
  return s[k - 1];
}

Mask compute_mask(std::span<const double> w, double sparsity) {
  if (w.empty()) throw Error(ErrorCode::kEmptyTensor, "compute_mask");
  const auto k = survivor_count(w.size(), sparsity);
  const auto order = rank_by_magnitude(w);
  Mask mask(w.size(), 0);
  for (std::size_t r = 0; r < k; ++r) mask[order[r]] = 1;
  return mask;
}

void apply_mask(std::span<double> w, const Mask& mask) {
  if (w.size() != mask.size()) throw Error(ErrorCode::kDimensionMismatch, "mask size");
  // Assign rather than multiply so negative weights do not become -0.0.
  for (std::size_t i = 0; i < w.size(); ++i)
    if (!mask[i]) w[i] = 0.0;
}

SwdSubset select_swd_subset(std::span<const double> w, const Mask& mask, double a, double target) {
  if (w.size() != mask.size()) throw Error(ErrorCode::kDimensionMismatch, "mask size");
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (mask[i] && std::abs(w[i]) > a) candidates.push_back(i);

  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](std::size_t x, std::size_t y) { return std::abs(w[x]) < std::abs(w[y]); });
  const double exact = target * static_cast<double>(candidates.size());
  const auto take = std::min(candidates.size(), static_cast<std::size_t>(std::max(0.0, std::ceil(exact - kCountSlack))));
  candidates.resize(take);
  std::sort(candidates.begin(), candidates.end());

  SwdSubset subset;
  subset.indices = std::move(candidates);
  subset.values.reserve(subset.indices.size());
  for (auto i : subset.indices) subset.values.push_back(w[i]);
  return subset;
}

TwdTerm total_weight_decay(const SwdSubset& subset, double mu) {
  TwdTerm term;
  term.grad.reserve(subset.values.size());
  for (double v : subset.values) {
    term.twd += v * v;
    term.grad.push_back(2.0 * mu * v);
  }
  term.twd *= mu;
  return term;
}

double schedule_sparsity(int epoch, const SparsitySchedule& sched) {
  if (epoch < 0 || epoch >= sched.epochs)
    throw Error(ErrorCode::kEpochOutOfRange,
                "epoch " + std::to_string(epoch) + " of " + std::to_string(sched.epochs));
  if (sched.epochs == 1) return sched.final;
  return sched.initial + (sched.final - sched.initial) * epoch / static_cast<double>(sched.epochs - 1);
}

double schedule_a(int epoch, const SwdConfig& cfg) {
  if (epoch < 0) throw Error(ErrorCode::kEpochOutOfRange, "negative epoch");
  return std::min(cfg.a0 * std::pow(cfg.a_growth, epoch), cfg.target);
}

SparsityMask compute_network_mask(const NetworkParams& net, double sparsity) {
  SparsityMask out;
  out.current_sparsity = sparsity;
  for_each_tensor(net, [&](const std::string& name, const auto& t, bool is_weight) {
    if (is_weight) out.masks[name] = compute_mask({t.data(), static_cast<std::size_t>(t.size())}, sparsity);
  });
  return out;
}

void apply_network_mask(NetworkParams& net, const SparsityMask& mask) {
  for_each_tensor(net, [&](const std::string& name, auto& t, bool is_weight) {
    if (!is_weight) return;
    auto it = mask.masks.find(name);
    if (it == mask.masks.end()) return;
    apply_mask({t.data(), static_cast<std::size_t>(t.size())}, it->second);
  });
}

bool satisfies_mask(const NetworkParams& net, const SparsityMask& mask) {
  bool ok = true;
  for_each_tensor(net, [&](const std::string& name, const auto& t, bool) {
    auto it = mask.masks.find(name);
    if (it == mask.masks.end()) return;
    const auto& m = it->second;
    if (m.size() != static_cast<std::size_t>(t.size())) {
      ok = false;
      return;
    }
    for (std::size_t i = 0; i < m.size(); ++i)
      if (!m[i] && std::bit_cast<std::uint64_t>(t.data()[i]) != 0) ok = false;
  });
  return ok;
}

double add_selective_weight_decay(const NetworkParams& net, const SparsityMask& mask, double a,
                                  const SwdConfig& cfg, Gradients& grads) {
  double a_twd = 0.0;
  zip_tensors(grads, net, [&](const std::string& name, auto& g, auto& w, bool is_weight) {
    if (!is_weight) return;
    auto it = mask.masks.find(name);
    if (it == mask.masks.end()) return;
    const auto subset =
        select_swd_subset({w.data(), static_cast<std::size_t>(w.size())}, it->second, a, cfg.target);
    const auto term = total_weight_decay(subset, cfg.mu);
    a_twd += a * term.twd;
    for (std::size_t k = 0; k < subset.indices.size(); ++k)
      g(static_cast<Eigen::Index>(subset.indices[k])) += a * term.grad[k];
  });
  return a_twd;
}

}  // namespace edgenet
