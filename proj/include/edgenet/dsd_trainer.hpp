// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The EdgeNet Authors

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "edgenet/data_pipeline.hpp"
#include "edgenet/lstm_net.hpp"
#include "edgenet/optimizer.hpp"
#include "edgenet/pruning.hpp"

namespace edgenet {

enum class Phase { kDense, kSparse, kRedense };

std::string to_string(Phase phase);

struct PhaseConfig {
  double learning_rate = 0.1;
  int epochs = 30;
  bool early_stop = true;
};

struct TrainConfig {
  std::array<PhaseConfig, 3> phases{{{0.1, 30, true}, {0.01, 30, false}, {0.001, 30, true}}};
  int batch_size = 256;
  double momentum = 0.9;
  SwdConfig swd;  // swd.mu is also the base weight-decay coefficient
  double initial_sparsity = 0.25;
  double final_sparsity = 0.8;
  int patience = 5;
  bool clip_gradients = true;
  double clip_norm = 5.0;
  int sequence_length = 1;
  // Worker threads for batch gradients; 0 runs everything on the caller.
  int threads = 0;
  double threshold = 0.5;

  void validate() const;
};

struct EpochRecord {
  int epoch = 0;  // global, 0-based
  Phase phase = Phase::kDense;
  double train_loss = 0.0;
  double err = 0.0;
  double wd = 0.0;
  double a_twd = 0.0;
  double val_loss = 0.0;
  double val_auc = 0.0;
  double val_accuracy = 0.0;
  double sparsity = 0.0;
  double a = 0.0;
};

struct TrainHooks {
  // Called after every optimizer step (after masking in the sparse phase).
  std::function<void(Phase, const NetworkParams&, const SparsityMask*)> on_step;
  // Called once at the end of each phase with its result.
  std::function<void(Phase, const NetworkParams&, const SparsityMask*)> on_phase_end;
};

struct TrainRun {
  std::vector<EpochRecord> epochs;
  NetworkParams final_params;
  SparsityMask final_mask;
  // Network as it stood when the sparse phase finished.
  NetworkParams sparse_params;
};

struct EvalResult {
  double loss = 0.0;
  double auc = 0.0;
  double accuracy = 0.0;
  std::vector<double> probabilities;
};

// Eval-mode probabilities for every row.
std::vector<double> predict_proba(const NetworkParams& net, const DatasetSplit& data,
                                  int sequence_length = 1, int threads = 0);
EvalResult evaluate(const NetworkParams& net, const DatasetSplit& data, int sequence_length = 1,
                    double threshold = 0.5, int threads = 0);

struct BatchLoss {
  double err = 0.0;  // mean BCE over the batch
};

// Mean BCE gradient over the rows in `batch`. Per-row dropout streams are
// derived from batch_seed and the row's position, and partial sums are reduced
// in a fixed order, so the result does not depend on `threads`.
BatchLoss batch_gradient(const NetworkParams& net, const DatasetSplit& data,
                         std::span<const std::size_t> batch, int sequence_length,
                         std::uint64_t batch_seed, int threads, Gradients& grads);

class DsdTrainer {
 public:
  DsdTrainer(TrainConfig cfg, const DatasetSplit& train, const DatasetSplit& val, std::uint64_t seed,
             TrainHooks hooks = {});

  NetworkParams run_dense_phase(NetworkParams net);
  std::pair<NetworkParams, SparsityMask> run_sparse_phase(NetworkParams net);
  NetworkParams run_redense_phase(NetworkParams net, const SparsityMask& mask);

  const std::vector<EpochRecord>& history() const { return history_; }

 private:
  struct EpochTotals {
    double err = 0.0, wd = 0.0, a_twd = 0.0;
  };

  EpochTotals run_epoch(NetworkParams& net, SgdmOptimizer& opt, Phase phase, double eta,
                        const SparsityMask* mask, double a);
  void record(Phase phase, const EpochTotals& totals, const NetworkParams& net, double sparsity,
              double a);

  TrainConfig cfg_;
  const DatasetSplit& train_;
  const DatasetSplit& val_;
  std::mt19937_64 rng_;
  TrainHooks hooks_;
  std::vector<EpochRecord> history_;
};

TrainRun train_dsd(const TrainConfig& cfg, const Architecture& arch, const DatasetSplit& train,
                   const DatasetSplit& val, std::uint64_t seed, TrainHooks hooks = {});

std::string train_run_csv(const std::vector<EpochRecord>& epochs);

}  // namespace edgenet
