// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The EdgeNet Authors

#include "edgenet/dsd_trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "csv.hpp"
#include "edgenet/error.hpp"
#include "edgenet/metrics.hpp"

namespace edgenet {

namespace {

// Rows per partial gradient sum. Fixed so the reduction order never depends
// on the worker count.
constexpr std::size_t kChunkRows = 32;

// Runs job(k) for k in [0, n) on up to `threads` workers (0 = caller only).
template <class F>
void parallel_for(std::size_t n, int threads, F&& job) {
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n);
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) job(k);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = w; k < n; k += workers) job(k);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::uint64_t row_seed(std::uint64_t batch_seed, std::size_t position) {
  std::seed_seq seq{static_cast<std::uint32_t>(batch_seed), static_cast<std::uint32_t>(batch_seed >> 32),
                    static_cast<std::uint32_t>(position)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

void require_finite(double v, const char* what, int epoch) {
  if (!std::isfinite(v))
    throw Error(ErrorCode::kNonFiniteLoss, std::string(what) + " became non-finite in epoch " + std::to_string(epoch));
}

void mask_tree(NetworkParams& tree, const SparsityMask& mask) { apply_network_mask(tree, mask); }

}  // namespace

std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::kDense: return "dense";
    case Phase::kSparse: return "sparse";
    case Phase::kRedense: return "redense";
  }
  return "unknown";
}

void TrainConfig::validate() const {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::kBadConfig, what); };
  for (std::size_t p = 0; p < phases.size(); ++p) {
    if (!(phases[p].learning_rate >= 0.0) || !std::isfinite(phases[p].learning_rate))
      bad("phase " + std::to_string(p) + " learning rate must be finite and non-negative");
    if (phases[p].epochs < 1) bad("phase " + std::to_string(p) + " needs at least one epoch");
  }
  if (batch_size < 1) bad("batch_size must be at least 1");
  if (!(momentum >= 0.0 && momentum < 1.0)) bad("momentum must lie in [0, 1)");
  if (!(swd.mu >= 0.0)) bad("mu must be non-negative");
  if (!(swd.a0 >= 0.0) || !(swd.a_growth >= 1.0)) bad("a0 must be >= 0 and a_growth >= 1");
  if (!(swd.target > 0.0 && swd.target <= 1.0)) bad("T must lie in (0, 1]");
  if (!(initial_sparsity >= 0.0 && initial_sparsity < 1.0)) bad("initial sparsity must lie in [0, 1)");
  if (!(final_sparsity >= 0.0 && final_sparsity < 1.0)) bad("final sparsity must lie in [0, 1)");
  if (initial_sparsity > final_sparsity) bad("initial sparsity exceeds final sparsity");
  if (patience < 1) bad("patience must be at least 1");
  if (clip_gradients && !(clip_norm > 0.0)) bad("clip_norm must be positive");
  if (sequence_length < 1) bad("sequence_length must be at least 1");
  if (threads < 0) bad("threads must be non-negative");
  if (!(threshold >= 0.0 && threshold <= 1.0)) bad("threshold must lie in [0, 1]");
}

std::vector<double> predict_proba(const NetworkParams& net, const DatasetSplit& data, int sequence_length,
                                  int threads) {
  std::vector<double> p(data.size());
  const std::size_t chunks = (data.size() + kChunkRows - 1) / kChunkRows;
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::size_t end = std::min(data.size(), (c + 1) * kChunkRows);
    for (std::size_t r = c * kChunkRows; r < end; ++r)
      p[r] = forward(net, to_sequence(data.features.row(static_cast<Eigen::Index>(r)), sequence_length),
                     Mode::kEval, nullptr);
  });
  return p;
}

EvalResult evaluate(const NetworkParams& net, const DatasetSplit& data, int sequence_length, double threshold,
                    int threads) {
  if (data.size() == 0) throw Error(ErrorCode::kEmptyInput, "evaluation split is empty");
  EvalResult out;
  out.probabilities = predict_proba(net, data, sequence_length, threads);
  std::size_t correct = 0;
  for (std::size_t r = 0; r < data.size(); ++r) {
    out.loss += bce_loss(out.probabilities[r], data.labels[r]);
    correct += predict_label(out.probabilities[r], threshold) == data.labels[r];
  }
  out.loss /= static_cast<double>(data.size());
  out.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  try {
    out.auc = roc_curve(out.probabilities, data.labels).auc;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSingleClassInput) throw;
    out.auc = 0.5;
  }
  return out;
}

BatchLoss batch_gradient(const NetworkParams& net, const DatasetSplit& data, std::span<const std::size_t> batch,
                         int sequence_length, std::uint64_t batch_seed, int threads, Gradients& grads) {
  BatchLoss out;
  if (batch.empty()) return out;
  const std::size_t chunks = (batch.size() + kChunkRows - 1) / kChunkRows;
  std::vector<Gradients> partial(chunks);
  std::vector<double> partial_err(chunks, 0.0);

  parallel_for(chunks, threads, [&](std::size_t c) {
    Gradients g = net.zeros_like();
    ForwardCache cache;
    const std::size_t end = std::min(batch.size(), (c + 1) * kChunkRows);
    for (std::size_t k = c * kChunkRows; k < end; ++k) {
      const auto r = batch[k];
      if (r >= data.size()) throw_dimension_mismatch("batch row " + std::to_string(r));
      std::mt19937_64 rng(row_seed(batch_seed, k));
      const double p = forward(net, to_sequence(data.features.row(static_cast<Eigen::Index>(r)), sequence_length),
                               Mode::kTrain, &rng, &cache);
      partial_err[c] += bce_loss(p, data.labels[r]);
      backward(net, cache, data.labels[r], g);
    }
    partial[c] = std::move(g);
  });

  const double inv = 1.0 / static_cast<double>(batch.size());
  for (std::size_t c = 0; c < chunks; ++c) {
    out.err += partial_err[c];
    zip_tensors(grads, partial[c], [&](const std::string&, auto& dst, auto& src, bool) { dst += inv * src; });
  }
  out.err *= inv;
  return out;
}

DsdTrainer::DsdTrainer(TrainConfig cfg, const DatasetSplit& train, const DatasetSplit& val, std::uint64_t seed,
                       TrainHooks hooks)
    : cfg_(std::move(cfg)), train_(train), val_(val), rng_(seed), hooks_(std::move(hooks)) {
  cfg_.validate();
  if (train_.size() == 0 || val_.size() == 0) throw Error(ErrorCode::kEmptyInput, "train and validation splits must be non-empty");
}

DsdTrainer::EpochTotals DsdTrainer::run_epoch(NetworkParams& net, SgdmOptimizer& opt, Phase phase, double eta,
                                              const SparsityMask* mask, double a) {
  std::vector<std::size_t> order(train_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng_);

  EpochTotals totals;
  const auto bs = static_cast<std::size_t>(cfg_.batch_size);
  const int epoch = static_cast<int>(history_.size());
  for (std::size_t start = 0; start < order.size(); start += bs) {
    const std::span<const std::size_t> batch(order.data() + start, std::min(bs, order.size() - start));
    const std::uint64_t batch_seed = rng_();
    Gradients grads = net.zeros_like();
    const auto loss = batch_gradient(net, train_, batch, cfg_.sequence_length, batch_seed, cfg_.threads, grads);
    require_finite(loss.err, "training loss", epoch);
    const double wd = add_weight_decay(net, cfg_.swd.mu, grads);
    const double a_twd = mask ? add_selective_weight_decay(net, *mask, a, cfg_.swd, grads) : 0.0;
    require_finite(wd + a_twd, "regularization term", epoch);

    // Pruned weights receive no gradient, so their velocity stays zero too.
    if (mask) mask_tree(grads, *mask);
    if (cfg_.clip_gradients) clip_global_norm(grads, cfg_.clip_norm);
    require_finite(global_norm(grads), "gradient", epoch);
    opt.step(net, grads, eta);
    if (mask) apply_network_mask(net, *mask);
    if (hooks_.on_step) hooks_.on_step(phase, net, mask);

    const double w = static_cast<double>(batch.size()) / static_cast<double>(order.size());
    totals.err += w * loss.err;
    totals.wd += w * wd;
    totals.a_twd += w * a_twd;
  }
  return totals;
}

void DsdTrainer::record(Phase phase, const EpochTotals& totals, const NetworkParams& net, double sparsity,
                        double a) {
  const auto val = evaluate(net, val_, cfg_.sequence_length, cfg_.threshold, cfg_.threads);
  require_finite(val.loss, "validation loss", static_cast<int>(history_.size()));
  EpochRecord rec;
  rec.epoch = static_cast<int>(history_.size());
  rec.phase = phase;
  rec.err = totals.err;
  rec.wd = totals.wd;
  rec.a_twd = totals.a_twd;
  rec.train_loss = totals.err + totals.wd + totals.a_twd;
  rec.val_loss = val.loss;
  rec.val_auc = val.auc;
  rec.val_accuracy = val.accuracy;
  rec.sparsity = sparsity;
  rec.a = a;
  history_.push_back(rec);
}

namespace {

// Tracks the best validation AUC seen in a phase and decides when to stop.
struct EarlyStop {
  bool enabled;
  int patience;
  double best = -1.0;
  int since_best = 0;

  // True when this epoch is the new best.
  bool update(double auc) {
    if (auc > best) {
      best = auc;
      since_best = 0;
      return true;
    }
    ++since_best;
    return false;
  }
  bool should_stop() const { return enabled && since_best >= patience; }
};

}  // namespace

NetworkParams DsdTrainer::run_dense_phase(NetworkParams net) {
  const auto& pc = cfg_.phases[0];
  SgdmOptimizer opt(net, cfg_.momentum);
  EarlyStop stop{pc.early_stop, cfg_.patience};
  NetworkParams best = net;
  for (int e = 0; e < pc.epochs; ++e) {
    const auto totals = run_epoch(net, opt, Phase::kDense, pc.learning_rate, nullptr, 0.0);
    record(Phase::kDense, totals, net, 0.0, 0.0);
    if (stop.update(history_.back().val_auc)) best = net;
    if (stop.should_stop()) break;
  }
  if (pc.early_stop) net = std::move(best);
  if (hooks_.on_phase_end) hooks_.on_phase_end(Phase::kDense, net, nullptr);
  return net;
}

std::pair<NetworkParams, SparsityMask> DsdTrainer::run_sparse_phase(NetworkParams net) {
  const auto& pc = cfg_.phases[1];
  const SparsitySchedule sched{cfg_.initial_sparsity, cfg_.final_sparsity, pc.epochs};
  SgdmOptimizer opt(net, cfg_.momentum);
  EarlyStop stop{pc.early_stop, cfg_.patience};
  SparsityMask mask;
  NetworkParams best = net;
  SparsityMask best_mask;
  for (int e = 0; e < pc.epochs; ++e) {
    const double s = schedule_sparsity(e, sched);
    const double a = schedule_a(e, cfg_.swd);
    mask = compute_network_mask(net, s);
    apply_network_mask(net, mask);
    mask_tree(opt.velocity(), mask);
    const auto totals = run_epoch(net, opt, Phase::kSparse, pc.learning_rate, &mask, a);
    record(Phase::kSparse, totals, net, mask.achieved_sparsity(), a);
    if (stop.update(history_.back().val_auc)) {
      best = net;
      best_mask = mask;
    }
    if (stop.should_stop()) break;
  }
  if (pc.early_stop) {
    net = std::move(best);
    mask = std::move(best_mask);
  }
  if (hooks_.on_phase_end) hooks_.on_phase_end(Phase::kSparse, net, &mask);
  return {std::move(net), std::move(mask)};
}

NetworkParams DsdTrainer::run_redense_phase(NetworkParams net, const SparsityMask& mask) {
  const auto& pc = cfg_.phases[2];
  SgdmOptimizer opt(net, cfg_.momentum);
  EarlyStop stop{pc.early_stop, cfg_.patience};
  NetworkParams best = net;
  const double frozen = mask.achieved_sparsity();
  for (int e = 0; e < pc.epochs; ++e) {
    const auto totals = run_epoch(net, opt, Phase::kRedense, pc.learning_rate, nullptr, 0.0);
    record(Phase::kRedense, totals, net, frozen, 0.0);
    if (stop.update(history_.back().val_auc)) best = net;
    if (stop.should_stop()) break;
  }
  if (pc.early_stop) net = std::move(best);
  if (hooks_.on_phase_end) hooks_.on_phase_end(Phase::kRedense, net, nullptr);
  return net;
}

TrainRun train_dsd(const TrainConfig& cfg, const Architecture& arch, const DatasetSplit& train,
                   const DatasetSplit& val, std::uint64_t seed, TrainHooks hooks) {
  if (train.size() > 0 && train.features.cols() != static_cast<Eigen::Index>(arch.input_size) * cfg.sequence_length)
    throw Error(ErrorCode::kDimensionMismatch, "dataset has " + std::to_string(train.features.cols()) +
                                                   " features, architecture expects " +
                                                   std::to_string(arch.input_size) + " per step");
  // Parameter init and the training stream get separate seeds.
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  std::uint32_t words[4];
  seq.generate(words, words + 4);
  const std::uint64_t init_seed = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
  const std::uint64_t train_seed = (static_cast<std::uint64_t>(words[2]) << 32) | words[3];

  DsdTrainer trainer(cfg, train, val, train_seed, std::move(hooks));
  TrainRun run;
  NetworkParams net = trainer.run_dense_phase(init_params(arch, init_seed));
  auto [sparse, mask] = trainer.run_sparse_phase(std::move(net));
  run.sparse_params = sparse;
  run.final_params = trainer.run_redense_phase(std::move(sparse), mask);
  run.final_mask = std::move(mask);
  run.epochs = trainer.history();
  return run;
}

std::string train_run_csv(const std::vector<EpochRecord>& epochs) {
  std::string out = "epoch,phase,train_loss,err,wd,a_twd,val_loss,val_auc,sparsity,a\n";
  for (const auto& r : epochs) {
    out += std::to_string(r.epoch) + "," + to_string(r.phase) + "," + detail::exact(r.train_loss) + "," +
           detail::exact(r.err) + "," + detail::exact(r.wd) + "," + detail::exact(r.a_twd) + "," +
           detail::exact(r.val_loss) + "," + detail::exact(r.val_auc) + "," + detail::exact(r.sparsity) + "," +
           detail::exact(r.a) + "\n";
  }
  return out;
}

}  // namespace edgenet
