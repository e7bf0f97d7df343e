// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The EdgeNet Authors

#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "csv.hpp"
#include "edgenet/commands.hpp"
#include "edgenet/error.hpp"
#include "edgenet/io.hpp"
#include "edgenet/synthetic.hpp"

using namespace edgenet;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold;
};

RunConfig resolve(const Common& c) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_run_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.threshold) {
    cfg.threshold = *c.threshold;
    cfg.train.threshold = *c.threshold;
  }
  if (const int t = threads_from_env(); t > 0) cfg.train.threads = t;
  cfg.validate();
  return cfg;
}

void add_common(CLI::App* cmd, Common& c, bool with_threshold) {
  cmd->add_option("--config", c.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Overrides the configured seed");
  if (with_threshold) cmd->add_option("--threshold", c.threshold, "Decision threshold on p(anomaly)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dense-sparse-dense LSTM training, pruning and int8 compression toolkit"};
  app.require_subcommand(1);
  Common common;

  std::string csv_in, out, data_dir, model_in, model_out, split, baseline, out_file;
  std::vector<std::string> models, others, eval_csvs;
  std::vector<double> features;
  std::size_t rows = 5000;
  int n_features = 10;
  double noise = 0.05;

  auto* pre = app.add_subcommand("preprocess", "CSV -> normalized train/val/test dataset files");
  add_common(pre, common, false);
  pre->add_option("csv", csv_in, "Input CSV")->required();
  pre->add_option("--out", out, "Output directory")->required();

  auto* train = app.add_subcommand("train", "Run Dense, Sparse and reDense training");
  add_common(train, common, true);
  train->add_option("data_dir", data_dir, "Directory written by preprocess")->required()->check(CLI::ExistingDirectory);
  train->add_option("--out", out, "Output directory")->required();

  auto* quant = app.add_subcommand("quantize", "Convert a model file to int8 weights");
  add_common(quant, common, false);
  quant->add_option("model", model_in, "Input model")->required()->check(CLI::ExistingFile);
  quant->add_option("--out", model_out, "Output model file")->required();

  auto* eval = app.add_subcommand("evaluate", "Metrics and ROC CSVs for one or more models");
  add_common(eval, common, true);
  eval->add_option("models", models, "Model files")->required()->check(CLI::ExistingFile);
  eval->add_option("--split", split, "Dataset file to evaluate on")->required()->check(CLI::ExistingFile);
  eval->add_option("--out", out, "Output directory")->required();

  auto* size = app.add_subcommand("size-report", "Compare model file sizes against a baseline");
  size->add_option("baseline", baseline, "Baseline model")->required();
  size->add_option("others", others, "Models to compare");
  size->add_option("--eval", eval_csvs, "metrics.csv files supplying accuracy")->check(CLI::ExistingFile);
  size->add_option("--out", out_file, "Write the CSV here instead of stdout");

  auto* pred = app.add_subcommand("predict", "Score a single normalized feature row");
  add_common(pred, common, true);
  pred->add_option("model", model_in, "Model file")->required()->check(CLI::ExistingFile);
  pred->add_option("--features", features, "Feature values in [0, 1]")->required()->delimiter(',');

  auto* dump = app.add_subcommand("dump", "Print the tensor table of a model file");
  dump->add_option("model", model_in, "Model file")->required();

  auto* synth = app.add_subcommand("synthetic", "Write the seeded synthetic benchmark CSV");
  synth->add_option("--rows", rows, "Row count");
  synth->add_option("--features", n_features, "Feature count");
  synth->add_option("--noise", noise, "Probability of replacing a label by a coin flip");
  synth->add_option("--seed", common.seed, "Generator seed");
  synth->add_option("--out", out_file, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests exit 0; usage errors share the config exit code.
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code_for(ErrorCode::kBadConfig);
  }

  try {
    if (*pre) {
      const auto s = cmd_preprocess(resolve(common), csv_in, out);
      std::printf("train %zu, val %zu, test %zu rows; %zu rejected\n", s.train_rows, s.val_rows, s.test_rows,
                  s.rejected_rows);
    } else if (*train) {
      const auto run = cmd_train(resolve(common), data_dir, out);
      const auto& last = run.epochs.back();
      std::printf("%zu epochs; final val_acc %.4f val_auc %.4f; pruned-phase sparsity %.4f\n", run.epochs.size(),
                  last.val_accuracy, last.val_auc, run.final_mask.achieved_sparsity());
    } else if (*quant) {
      cmd_quantize(resolve(common), model_in, model_out);
    } else if (*eval) {
      const auto cfg = resolve(common);
      std::vector<fs::path> paths(models.begin(), models.end());
      for (const auto& e : cmd_evaluate(paths, split, cfg.threshold, out, cfg.train.sequence_length))
        std::cout << metrics_csv_row(e.name, e.metrics);
    } else if (*size) {
      std::vector<fs::path> paths(others.begin(), others.end());
      std::vector<fs::path> evals(eval_csvs.begin(), eval_csvs.end());
      const auto csv = size_report_csv(cmd_size_report(baseline, paths, evals));
      if (out_file.empty()) std::cout << csv;
      else write_text_atomic(out_file, csv);
    } else if (*pred) {
      const auto cfg = resolve(common);
      const double p = cmd_predict(model_in, features, cfg.train.sequence_length);
      std::printf("%s %d\n", detail::exact(p).c_str(), predict_label(p, cfg.threshold));
    } else if (*dump) {
      std::cout << dump_model(model_in);
    } else if (*synth) {
      SyntheticOptions opts;
      opts.rows = rows;
      opts.features = n_features;
      opts.label_noise = noise;
      if (common.seed) opts.seed = *common.seed;
      write_text_atomic(out_file, synthetic_csv(opts));
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
