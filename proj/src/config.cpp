// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The EdgeNet Authors

#include "edgenet/config.hpp"

#include <cstdlib>
#include <set>

#include <json.hpp>

#include "edgenet/error.hpp"
#include "edgenet/io.hpp"

namespace edgenet {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::kBadConfig, what); }

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) bad(where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items())
    if (!ok.count(key)) bad("unknown key '" + (where.empty() ? key : where + "." + key) + "'");
}

template <class T>
void read(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    bad("'" + where + "." + key + "' has the wrong type");
  }
}

ColumnKind kind_from(const std::string& s) {
  if (s == "numeric") return ColumnKind::kNumeric;
  if (s == "categorical") return ColumnKind::kCategorical;
  if (s == "label") return ColumnKind::kLabel;
  bad("unknown column kind '" + s + "'");
}

const char* kind_name(ColumnKind k) {
  switch (k) {
    case ColumnKind::kNumeric: return "numeric";
    case ColumnKind::kCategorical: return "categorical";
    case ColumnKind::kLabel: return "label";
  }
  return "numeric";
}

}  // namespace

void RunConfig::validate() const {
  if (!schema.columns.empty()) {
    try {
      schema.validate();
    } catch (const Error& e) {
      bad(std::string("schema: ") + e.what());
    }
  }
  if (!(split.train > 0 && split.val > 0 && split.test > 0) ||
      std::abs(split.train + split.val + split.test - 1.0) > 1e-9)
    bad("split ratios must be positive and sum to 1");
  if (layers < 1) bad("architecture.layers must be at least 1");
  if (hidden < 1) bad("architecture.hidden must be at least 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) bad("architecture.dropout must lie in [0, 1)");
  try {
    train.validate();
  } catch (const Error& e) {
    bad(e.what());
  }
  if (!(quant.q_min < quant.q_max) || quant.q_min < -128 || quant.q_max > 127)
    bad("quantization range must satisfy -128 <= q_min < q_max <= 127");
  if (!(threshold >= 0.0 && threshold <= 1.0)) bad("threshold must lie in [0, 1]");
  if (!schema.selected_features.empty() &&
      schema.selected_features.size() % static_cast<std::size_t>(train.sequence_length) != 0)
    bad("selected feature count must be a multiple of sequence_length");
}

Architecture RunConfig::architecture(int n_features) const {
  if (n_features % train.sequence_length != 0)
    bad(std::to_string(n_features) + " features do not split into " + std::to_string(train.sequence_length) +
        " steps");
  Architecture arch;
  arch.input_size = n_features / train.sequence_length;
  arch.hidden_sizes.assign(static_cast<std::size_t>(layers), hidden);
  arch.dropout_rate = dropout;
  arch.tied_output_gate = tied_output_gate;
  return arch;
}

RunConfig parse_run_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    bad(std::string("config is not valid JSON: ") + e.what());
  }
  RunConfig cfg;
  only_keys(root, "", {"schema", "split", "seed", "architecture", "phases", "pruning", "quantization",
                       "early_stop", "threshold", "threads"});

  if (root.contains("schema")) {
    const auto& s = root["schema"];
    only_keys(s, "schema", {"columns", "selected_features"});
    if (s.contains("columns")) {
      if (!s["columns"].is_array()) bad("schema.columns must be an array");
      for (const auto& c : s["columns"]) {
        only_keys(c, "schema.columns[]", {"name", "kind"});
        ColumnSpec col;
        read(c, "name", col.name, "schema.columns[]");
        std::string kind = "numeric";
        read(c, "kind", kind, "schema.columns[]");
        col.kind = kind_from(kind);
        cfg.schema.columns.push_back(std::move(col));
      }
    }
    read(s, "selected_features", cfg.schema.selected_features, "schema");
  }
  if (root.contains("split")) {
    const auto& s = root["split"];
    only_keys(s, "split", {"train", "val", "test"});
    read(s, "train", cfg.split.train, "split");
    read(s, "val", cfg.split.val, "split");
    read(s, "test", cfg.split.test, "split");
  }
  read(root, "seed", cfg.seed, "");
  read(root, "threshold", cfg.threshold, "");
  read(root, "threads", cfg.train.threads, "");
  cfg.train.threshold = cfg.threshold;

  if (root.contains("architecture")) {
    const auto& a = root["architecture"];
    only_keys(a, "architecture", {"layers", "hidden", "dropout", "tied_output_gate", "sequence_length"});
    read(a, "layers", cfg.layers, "architecture");
    read(a, "hidden", cfg.hidden, "architecture");
    read(a, "dropout", cfg.dropout, "architecture");
    read(a, "tied_output_gate", cfg.tied_output_gate, "architecture");
    read(a, "sequence_length", cfg.train.sequence_length, "architecture");
  }
  if (root.contains("phases")) {
    const auto& p = root["phases"];
    only_keys(p, "phases", {"learning_rates", "epochs", "batch_size", "momentum", "clip_gradients", "clip_norm"});
    std::vector<double> rates;
    std::vector<int> epochs;
    read(p, "learning_rates", rates, "phases");
    read(p, "epochs", epochs, "phases");
    if (p.contains("learning_rates")) {
      if (rates.size() != 3) bad("phases.learning_rates needs three entries");
      for (std::size_t k = 0; k < 3; ++k) cfg.train.phases[k].learning_rate = rates[k];
    }
    if (p.contains("epochs")) {
      if (epochs.size() != 3) bad("phases.epochs needs three entries");
      for (std::size_t k = 0; k < 3; ++k) cfg.train.phases[k].epochs = epochs[k];
    }
    read(p, "batch_size", cfg.train.batch_size, "phases");
    read(p, "momentum", cfg.train.momentum, "phases");
    read(p, "clip_gradients", cfg.train.clip_gradients, "phases");
    read(p, "clip_norm", cfg.train.clip_norm, "phases");
  }
  if (root.contains("pruning")) {
    const auto& p = root["pruning"];
    only_keys(p, "pruning", {"initial", "final", "a0", "a_growth", "T", "mu"});
    read(p, "initial", cfg.train.initial_sparsity, "pruning");
    read(p, "final", cfg.train.final_sparsity, "pruning");
    read(p, "a0", cfg.train.swd.a0, "pruning");
    read(p, "a_growth", cfg.train.swd.a_growth, "pruning");
    read(p, "T", cfg.train.swd.target, "pruning");
    read(p, "mu", cfg.train.swd.mu, "pruning");
  }
  if (root.contains("quantization")) {
    const auto& q = root["quantization"];
    only_keys(q, "quantization", {"q_min", "q_max", "fixed_range"});
    read(q, "q_min", cfg.quant.q_min, "quantization");
    read(q, "q_max", cfg.quant.q_max, "quantization");
    read(q, "fixed_range", cfg.quant.fixed_range, "quantization");
  }
  if (root.contains("early_stop")) {
    const auto& e = root["early_stop"];
    only_keys(e, "early_stop", {"patience", "enabled"});
    read(e, "patience", cfg.train.patience, "early_stop");
    std::vector<bool> enabled;
    read(e, "enabled", enabled, "early_stop");
    if (e.contains("enabled")) {
      if (enabled.size() != 3) bad("early_stop.enabled needs three entries");
      for (std::size_t k = 0; k < 3; ++k) cfg.train.phases[k].early_stop = enabled[k];
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) { return parse_run_config(read_text(path)); }

std::string to_json(const RunConfig& cfg) {
  json root;
  json cols = json::array();
  for (const auto& c : cfg.schema.columns) cols.push_back({{"name", c.name}, {"kind", kind_name(c.kind)}});
  root["schema"] = {{"columns", cols}, {"selected_features", cfg.schema.selected_features}};
  root["split"] = {{"train", cfg.split.train}, {"val", cfg.split.val}, {"test", cfg.split.test}};
  root["seed"] = cfg.seed;
  root["threshold"] = cfg.threshold;
  root["threads"] = cfg.train.threads;
  root["architecture"] = {{"layers", cfg.layers},
                          {"hidden", cfg.hidden},
                          {"dropout", cfg.dropout},
                          {"tied_output_gate", cfg.tied_output_gate},
                          {"sequence_length", cfg.train.sequence_length}};
  json rates = json::array(), epochs = json::array(), enabled = json::array();
  for (const auto& p : cfg.train.phases) {
    rates.push_back(p.learning_rate);
    epochs.push_back(p.epochs);
    enabled.push_back(p.early_stop);
  }
  root["phases"] = {{"learning_rates", rates},       {"epochs", epochs},
                    {"batch_size", cfg.train.batch_size}, {"momentum", cfg.train.momentum},
                    {"clip_gradients", cfg.train.clip_gradients}, {"clip_norm", cfg.train.clip_norm}};
  root["pruning"] = {{"initial", cfg.train.initial_sparsity}, {"final", cfg.train.final_sparsity},
                     {"a0", cfg.train.swd.a0},                {"a_growth", cfg.train.swd.a_growth},
                     {"T", cfg.train.swd.target},             {"mu", cfg.train.swd.mu}};
  root["quantization"] = {{"q_min", cfg.quant.q_min}, {"q_max", cfg.quant.q_max}, {"fixed_range", cfg.quant.fixed_range}};
  root["early_stop"] = {{"patience", cfg.train.patience}, {"enabled", enabled}};
  return root.dump(2);
}

int threads_from_env() {
  const char* v = std::getenv("EDGENET_THREADS");
  if (!v || !*v) return 0;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 0) return 0;
  return static_cast<int>(std::min<long>(n, 256));
}

}  // namespace edgenet
