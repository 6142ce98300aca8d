#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "regent/datagen/protocols.hpp"
#include "regent/harness/config.hpp"
#include "regent/harness/metrics.hpp"
#include "regent/neural/checkpoint.hpp"
#include "regent/neural/optim.hpp"

namespace regent {

struct TrainConfig {
  CellKind kind = CellKind::SRN;
  int nh = 0;              // explicit hidden size, or 0 to derive from a budget
  std::size_t budget = 0;  // recurrent-layer parameter budget
  int anchor_nh = 0;       // budget = param_count(SRN with this hidden size)
  Activation activation = Activation::Tanh;
  bool onehot_h0 = true;  // h0 = e_1; otherwise the zero vector
  double lr = 0.01;
  std::size_t batch = 100;
  std::size_t epochs = 100;
  std::uint64_t seed = 1;
  std::size_t patience = 5;
  std::size_t eval_every = 0;  // epochs between test evaluations; 0 = only at the end
  double val_fraction = 0.1;
  double init_low = -0.02;
  double init_high = 0.02;
  std::string train_path;
  std::vector<std::string> test_paths;
  std::string out_dir;

  void validate() const {
    if (batch < 1) throw ConfigError("batch must be >= 1");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (!(lr > 0.0) || !std::isfinite(lr)) throw ConfigError("lr must be positive");
    if (!(val_fraction >= 0.0 && val_fraction < 1.0)) throw ConfigError("val_fraction must lie in [0, 1)");
    if (!(init_low <= init_high)) throw ConfigError("init_low must not exceed init_high");
    if (nh < 0 || anchor_nh < 0) throw ConfigError("hidden sizes must be positive");
    if (nh == 0 && budget == 0 && anchor_nh == 0) throw ConfigError("one of nh, budget, anchor_nh is required");
  }

  std::size_t resolved_budget(int nx) const {
    if (budget) return budget;
    return param_count(CellSpec::make(CellKind::SRN, nx, anchor_nh));
  }

  CellSpec resolve(int nx) const {
    int h = nh;
    if (h == 0) {
      try {
        h = match_budget(kind, resolved_budget(nx), nx);
      } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
      }
    }
    return CellSpec::make(kind, nx, h, activation);
  }

  /// Reads the training keys; dataset paths resolve against `base_dir`.
  static TrainConfig from(const KeyValueConfig& kv, const std::string& base_dir = "", int default_anchor = 0) {
    TrainConfig c;
    try {
      c.kind = parse_cell_kind(kv.str("kind", "SRN"));
      c.activation = parse_activation(kv.str("activation", "tanh"));
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
    const auto h0 = kv.str("h0", "onehot");
    if (h0 != "onehot" && h0 != "zero") throw ConfigError("h0 must be 'onehot' or 'zero'");
    c.onehot_h0 = h0 == "onehot";
    c.nh = kv.number<int>("nh", 0);
    c.budget = kv.number<std::size_t>("budget", 0);
    c.anchor_nh = kv.number<int>("anchor_nh", 0);
    if (c.nh == 0 && c.budget == 0 && c.anchor_nh == 0) c.anchor_nh = default_anchor;
    c.lr = kv.number<double>("lr", c.lr);
    c.batch = kv.number<std::size_t>("batch", c.batch);
    c.epochs = kv.number<std::size_t>("epochs", c.epochs);
    c.seed = kv.number<std::uint64_t>("seed", c.seed);
    c.patience = kv.number<std::size_t>("patience", c.patience);
    c.eval_every = kv.number<std::size_t>("eval_every", c.eval_every);
    c.val_fraction = kv.number<double>("val_fraction", c.val_fraction);
    c.init_low = kv.number<double>("init_low", c.init_low);
    c.init_high = kv.number<double>("init_high", c.init_high);
    auto resolve = [&](const std::string& p) {
      namespace fs = std::filesystem;
      return fs::path(p).is_absolute() || base_dir.empty() ? p : (fs::path(base_dir) / p).string();
    };
    if (auto t = kv.get("train")) c.train_path = resolve(*t);
    for (const auto& p : kv.list("test")) c.test_paths.push_back(resolve(p));
    if (auto o = kv.get("out")) c.out_dir = resolve(*o);
    c.validate();
    return c;
  }

  nlohmann::json to_json() const {
    return {{"kind", to_string(kind)},   {"nh", nh},
            {"budget", budget},          {"anchor_nh", anchor_nh},
            {"activation", to_string(activation)},
            {"h0", onehot_h0 ? "onehot" : "zero"},
            {"lr", lr},                  {"batch", batch},
            {"epochs", epochs},          {"seed", seed},
            {"patience", patience},      {"eval_every", eval_every},
            {"val_fraction", val_fraction},
            {"init_low", init_low},      {"init_high", init_high},
            {"train", train_path},       {"test", test_paths},
            {"out", out_dir}};
  }
};

struct EpochLog {
  std::size_t epoch = 0;
  double loss = 0.0;
  double train_f1 = 0.0;
  std::optional<double> val_f1;
  std::map<std::string, double> test_f1;
};

struct RunReport {
  TrainConfig config;
  CellSpec spec;
  std::size_t param_count = 0;
  std::vector<std::string> groups;
  std::vector<double> initial_norms;
  std::vector<std::vector<double>> trace;  // one row of group norms per optimizer step
  std::vector<EpochLog> epochs;
  std::size_t epochs_run = 0;
  std::size_t steps = 0;
  std::size_t train_size = 0;
  std::size_t val_size = 0;
  std::size_t best_epoch = 0;
  Metrics train_metrics;
  std::map<std::string, Metrics> test_metrics;
  std::string status = "ok";
  std::string diagnostic;
  double wall_seconds = 0.0;
  Model model;

  bool diverged() const noexcept { return status != "ok"; }
};

namespace detail {

inline std::vector<double> group_norms(const CellParams& p, const std::vector<Group>& groups) {
  std::vector<double> out;
  for (Group g : groups) out.push_back(p.group_norm(g));
  return out;
}

inline double f1_on(const Model& m, const std::vector<const LabeledItem*>& items) {
  Confusion c;
  for (const auto* it : items) c.add(predict(m, it->word), it->label);
  return metrics_from(c).f1;
}

// Ranks checkpoints: a perfect training fit beats any imperfect one, then
// validation F1, then training F1. Earlier epochs win ties.
struct CheckpointKey {
  bool perfect = false;
  double val = 0.0;
  double train = 0.0;
  bool better_than(const CheckpointKey& o) const {
    if (perfect != o.perfect) return perfect;
    if (val != o.val) return val > o.val;
    return train > o.train;
  }
};

}  // namespace detail

/// Mini-batch BCE training with RMSprop. Each epoch reshuffles the training
/// part (train minus a seeded validation carve-out) and takes
/// ceil(|train part| / batch) steps over mixed-length batches, each example
/// unrolled on its own. Stops early once train F1 = 1 has held for
/// `patience` epochs; the reported model is the best checkpoint.
inline RunReport train(const TrainConfig& cfg, const LabeledDataset& train_set,
                       const std::vector<std::pair<std::string, LabeledDataset>>& tests) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  if (train_set.items.empty()) throw ConfigError("training set is empty");
  const int nx = static_cast<int>(train_set.alphabet.size());
  for (const auto& [name, ds] : tests)
    if (!(ds.alphabet == train_set.alphabet)) throw ConfigError("test split '" + name + "' uses a different alphabet");

  RunReport rep;
  rep.config = cfg;
  rep.spec = cfg.resolve(nx);
  rep.param_count = param_count(rep.spec);
  const auto groups = trace_groups(rep.spec);
  for (Group g : groups) rep.groups.push_back(to_string(g));

  std::vector<std::size_t> order(train_set.items.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng split_rng(detail::split_seed(cfg.seed, 12));
  std::shuffle(order.begin(), order.end(), split_rng);
  const auto n_val = static_cast<std::size_t>(std::floor(cfg.val_fraction * static_cast<double>(order.size())));
  std::vector<const LabeledItem*> val, fit;
  for (std::size_t i = 0; i < order.size(); ++i) (i < n_val ? val : fit).push_back(&train_set.items[order[i]]);
  rep.train_size = fit.size();
  rep.val_size = val.size();

  Model model = Model::zeros(rep.spec);
  model.params = init_params(rep.spec, detail::split_seed(cfg.seed, 11), cfg.init_low, cfg.init_high);
  model.alphabet = train_set.alphabet.symbols();
  if (cfg.onehot_h0) model.h0(0) = 1.0;
  RmsProp opt(rep.spec, cfg.lr);
  rep.initial_norms = detail::group_norms(model.params, groups);

  Model best = model;
  detail::CheckpointKey best_key;
  bool have_best = false;
  std::size_t perfect_streak = 0;
  Rng shuffle_rng(detail::split_seed(cfg.seed, 13));
  const std::size_t steps_per_epoch = (fit.size() + cfg.batch - 1) / cfg.batch;

  for (std::size_t epoch = 1; epoch <= cfg.epochs && !rep.diverged(); ++epoch) {
    std::shuffle(fit.begin(), fit.end(), shuffle_rng);
    double epoch_loss = 0.0;
    for (std::size_t s = 0; s < steps_per_epoch; ++s) {
      const std::size_t lo = s * cfg.batch, hi = std::min(fit.size(), lo + cfg.batch);
      CellParams grad(rep.spec);
      double batch_loss = 0.0;
      for (std::size_t i = lo; i < hi; ++i) {
        const auto tr = forward(model, fit[i]->word);
        batch_loss += bce_loss(tr.logit, fit[i]->label);
        grad += backward(rep.spec, model.params, tr, fit[i]->label);
      }
      const double inv = 1.0 / static_cast<double>(hi - lo);
      grad *= inv;
      batch_loss *= inv;
      if (!std::isfinite(batch_loss) || !grad.all_finite()) {
        rep.status = "diverged";
        rep.diagnostic = "non-finite loss or gradient at epoch " + std::to_string(epoch) + ", step " +
                         std::to_string(rep.steps + 1);
        break;
      }
      opt.step(model.params, grad);
      ++rep.steps;
      rep.trace.push_back(detail::group_norms(model.params, groups));
      if (!model.params.all_finite()) {
        rep.status = "diverged";
        rep.diagnostic = "non-finite weights after step " + std::to_string(rep.steps);
        break;
      }
      epoch_loss += batch_loss * static_cast<double>(hi - lo);
    }
    if (rep.diverged()) break;
    rep.epochs_run = epoch;

    EpochLog log;
    log.epoch = epoch;
    log.loss = epoch_loss / static_cast<double>(fit.size());
    log.train_f1 = detail::f1_on(model, fit);
    if (!val.empty()) log.val_f1 = detail::f1_on(model, val);
    if (cfg.eval_every && epoch % cfg.eval_every == 0)
      for (const auto& [name, ds] : tests) log.test_f1[name] = evaluate(model, ds).f1;

    const detail::CheckpointKey key{log.train_f1 == 1.0, log.val_f1.value_or(log.train_f1), log.train_f1};
    if (!have_best || key.better_than(best_key)) {
      best = model;
      best_key = key;
      rep.best_epoch = epoch;
      have_best = true;
    }
    perfect_streak = log.train_f1 == 1.0 ? perfect_streak + 1 : 0;
    rep.epochs.push_back(std::move(log));
    if (cfg.patience && perfect_streak >= cfg.patience) break;
  }

  rep.model = have_best ? best : model;
  {
    Confusion c;
    for (const auto* it : fit) c.add(predict(rep.model, it->word), it->label);
    rep.train_metrics = metrics_from(c);
  }
  for (const auto& [name, ds] : tests) rep.test_metrics[name] = evaluate(rep.model, ds);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

/// Name for a test split: the file stem of its path.
inline std::string split_name(const std::string& path) { return std::filesystem::path(path).stem().string(); }

/// Loads a dataset and, when it names its labelling DFA, checks every label.
inline LabeledDataset load_verified_dataset(const std::string& path) {
  LabeledDataset ds;
  try {
    ds = load_dataset(path);
  } catch (const std::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (ds.dfa_path != "-") {
    namespace fs = std::filesystem;
    const fs::path p = fs::path(ds.dfa_path).is_absolute() ? fs::path(ds.dfa_path) : fs::path(path).parent_path() / ds.dfa_path;
    Dfa dfa = [&] {
      try {
        return load_dfa(p.string());
      } catch (const std::exception& e) {
        throw ConfigError(path + ": cannot load labelling DFA: " + e.what());
      }
    }();
    const auto bad = label_mismatches(ds, dfa);
    if (!bad.empty())
      throw ConfigError(path + ": " + std::to_string(bad.size()) + " labels disagree with " + p.string() +
                        " (first at item " + std::to_string(bad.front()) + ")");
  }
  return ds;
}

inline RunReport train_from_files(const TrainConfig& cfg) {
  if (cfg.train_path.empty()) throw ConfigError("missing required key 'train'");
  const auto train_set = load_verified_dataset(cfg.train_path);
  std::vector<std::pair<std::string, LabeledDataset>> tests;
  for (const auto& p : cfg.test_paths) tests.emplace_back(split_name(p), load_verified_dataset(p));
  return train(cfg, train_set, tests);
}

inline std::string trace_csv(const RunReport& rep) {
  std::ostringstream out;
  out.precision(17);
  out << "step";
  for (const auto& g : rep.groups) out << ',' << g;
  out << '\n';
  for (std::size_t s = 0; s < rep.trace.size(); ++s) {
    out << s + 1;
    for (double v : rep.trace[s]) out << ',' << v;
    out << '\n';
  }
  return out.str();
}

inline nlohmann::json to_json(const RunReport& rep, bool with_trace = false) {
  nlohmann::json j;
  j["config"] = rep.config.to_json();
  j["spec"] = to_json(rep.spec);
  j["param_count"] = rep.param_count;
  j["status"] = rep.status;
  if (!rep.diagnostic.empty()) j["diagnostic"] = rep.diagnostic;
  j["epochs_run"] = rep.epochs_run;
  j["steps"] = rep.steps;
  j["train_size"] = rep.train_size;
  j["val_size"] = rep.val_size;
  j["best_epoch"] = rep.best_epoch;
  j["train"] = to_json(rep.train_metrics);
  j["test"] = nlohmann::json::object();
  for (const auto& [name, m] : rep.test_metrics) j["test"][name] = to_json(m);
  auto epochs = nlohmann::json::array();
  for (const auto& e : rep.epochs) {
    nlohmann::json row{{"epoch", e.epoch}, {"loss", e.loss}, {"train_f1", e.train_f1}};
    row["val_f1"] = e.val_f1 ? nlohmann::json(*e.val_f1) : nlohmann::json();
    if (!e.test_f1.empty()) row["test_f1"] = e.test_f1;
    epochs.push_back(std::move(row));
  }
  j["epochs"] = std::move(epochs);
  j["groups"] = rep.groups;
  if (with_trace) {
    j["initial_norms"] = rep.initial_norms;
    j["trace"] = rep.trace;
  }
  j["wall_seconds"] = rep.wall_seconds;
  return j;
}

/// Total variation of each group's norm trace (from the initial weights on)
/// and the largest group's share of the sum.
struct Dominance {
  std::vector<std::string> groups;
  std::vector<double> variation;
  bool degenerate = true;
  std::string dominant;
  double ratio = 0.0;

  std::optional<double> share(const std::string& group) const {
    if (degenerate) return std::nullopt;
    const double total = std::accumulate(variation.begin(), variation.end(), 0.0);
    for (std::size_t i = 0; i < groups.size(); ++i)
      if (groups[i] == group) return variation[i] / total;
    return std::nullopt;
  }
};

inline Dominance norm_trace_report(const std::vector<std::string>& groups, const std::vector<double>& initial,
                                   const std::vector<std::vector<double>>& trace) {
  Dominance d;
  d.groups = groups;
  d.variation.assign(groups.size(), 0.0);
  std::vector<double> prev = initial.empty() && !trace.empty() ? trace.front() : initial;
  for (const auto& row : trace) {
    if (row.size() != groups.size()) throw InvalidArgument("trace row width differs from group count");
    for (std::size_t g = 0; g < groups.size(); ++g) d.variation[g] += std::abs(row[g] - prev[g]);
    prev = row;
  }
  const double total = std::accumulate(d.variation.begin(), d.variation.end(), 0.0);
  if (total > 0.0) {
    d.degenerate = false;
    const auto it = std::max_element(d.variation.begin(), d.variation.end());
    d.dominant = groups[static_cast<std::size_t>(it - d.variation.begin())];
    d.ratio = *it / total;
  }
  return d;
}

inline Dominance norm_trace_report(const RunReport& rep) {
  return norm_trace_report(rep.groups, rep.initial_norms, rep.trace);
}

inline nlohmann::json to_json(const Dominance& d) {
  nlohmann::json j{{"groups", d.groups}, {"variation", d.variation}, {"degenerate", d.degenerate}};
  if (!d.degenerate) {
    j["dominant"] = d.dominant;
    j["ratio"] = d.ratio;
  }
  return j;
}

/// Writes report.json, trace.csv and model.json into `dir`.
inline void write_run(const std::string& dir, const RunReport& rep) {
  std::filesystem::create_directories(dir);
  auto j = to_json(rep);
  j["dominance"] = to_json(norm_trace_report(rep));
  write_text_file((std::filesystem::path(dir) / "report.json").string(), j.dump(1) + "\n");
  write_text_file((std::filesystem::path(dir) / "trace.csv").string(), trace_csv(rep));
  save_model((std::filesystem::path(dir) / "model.json").string(), rep.model,
             {{"seed", rep.config.seed}, {"best_epoch", rep.best_epoch}, {"train", rep.config.train_path}});
}

}  // namespace regent
