#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <filesystem>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "regent/automata/builders.hpp"
#include "regent/harness/train.hpp"

namespace regent {

/// "tomita3", "tomita-3", "sl4", "sp8" -> (family, id).
inline std::pair<std::string, int> parse_grammar_name(std::string_view name) {
  std::string s;
  for (char c : name)
    if (c != '-' && c != '_') s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  const auto digits = s.find_first_of("0123456789");
  if (digits == std::string::npos || digits == 0) throw InvalidArgument("bad grammar name '" + std::string(name) + "'");
  const std::string family = s.substr(0, digits);
  int id = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data() + digits, end, id);
  if (ec != std::errc() || ptr != end) throw InvalidArgument("bad grammar name '" + std::string(name) + "'");
  return {family, id};
}

inline Dfa build_grammar(std::string_view name) {
  const auto [family, id] = parse_grammar_name(name);
  return build_family(family, id);
}

struct GridConfig {
  TrainConfig base;  // kind and hidden size are overridden per cell
  std::vector<std::string> grammars;
  std::vector<CellKind> kinds;
  std::vector<int> sizes;  // explicit hidden sizes; empty = budget-matched to the SRN anchor
  int anchor_nh = 10;
  std::vector<std::uint64_t> seeds{1};
  std::uint64_t data_seed = 1;
  std::size_t threads = 0;  // 0 = hardware concurrency
  std::size_t train_cap = kTomitaTrainCap;
  std::size_t slsp_train_size = kSlSpDeskTrainSize;

  static GridConfig from(const KeyValueConfig& kv) {
    GridConfig g;
    g.base = TrainConfig::from(kv, "", 10);
    g.grammars = kv.list("grammars");
    try {
      for (const auto& k : kv.list("kinds")) g.kinds.push_back(parse_cell_kind(k));
      for (const auto& name : g.grammars) parse_grammar_name(name);
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
    g.sizes = kv.numbers<int>("sizes");
    g.anchor_nh = g.base.anchor_nh ? g.base.anchor_nh : 10;
    if (kv.has("seeds")) g.seeds = kv.numbers<std::uint64_t>("seeds");
    g.data_seed = kv.number<std::uint64_t>("data_seed", g.data_seed);
    g.threads = kv.number<std::size_t>("threads", 0);
    g.train_cap = kv.number<std::size_t>("train_cap", g.train_cap);
    g.slsp_train_size = kv.number<std::size_t>("slsp_train_size", g.slsp_train_size);
    if (g.grammars.empty()) throw ConfigError("grid needs at least one grammar");
    if (g.kinds.empty()) throw ConfigError("grid needs at least one kind");
    if (g.seeds.empty()) throw ConfigError("grid needs at least one seed");
    if (std::any_of(g.sizes.begin(), g.sizes.end(), [](int n) { return n < 1; }))
      throw ConfigError("sizes must be positive");
    if (g.anchor_nh < 1) throw ConfigError("anchor_nh must be positive");
    return g;
  }
};

struct GridCell {
  std::string grammar;
  CellKind kind;
  int nh;
  std::uint64_t seed;
};

struct GridRow {
  GridCell cell;
  RunReport report;
};

inline bool grid_less(const GridCell& a, const GridCell& b) {
  return std::forward_as_tuple(a.grammar, to_string(a.kind), a.nh, a.seed) <
         std::forward_as_tuple(b.grammar, to_string(b.kind), b.nh, b.seed);
}

struct GrammarData {
  LabeledDataset train;
  std::vector<std::pair<std::string, LabeledDataset>> tests;
};

inline GrammarData grammar_data(const std::string& name, std::uint64_t seed, std::size_t train_cap,
                                std::size_t slsp_train_size) {
  const Dfa dfa = build_grammar(name);
  GrammarData d;
  if (parse_grammar_name(name).first == "tomita") {
    auto s = tomita_protocol(dfa, seed, name, train_cap);
    d.train = std::move(s.train);
    d.tests.emplace_back("test", std::move(s.test));
  } else {
    auto s = slsp_protocol(dfa, seed, name, slsp_train_size);
    d.train = std::move(s.train);
    d.tests.emplace_back("test1", std::move(s.test1));
    d.tests.emplace_back("test2", std::move(s.test2));
  }
  return d;
}

/// Expands the cross product of grammars, kinds, sizes and seeds.
inline std::vector<GridCell> expand_grid(const GridConfig& g, const std::map<std::string, std::size_t>& alphabet_sizes) {
  std::vector<GridCell> cells;
  for (const auto& gr : g.grammars) {
    const int nx = static_cast<int>(alphabet_sizes.at(gr));
    for (CellKind k : g.kinds) {
      std::vector<int> sizes = g.sizes;
      if (sizes.empty()) {
        const auto budget = param_count(CellSpec::make(CellKind::SRN, nx, g.anchor_nh));
        try {
          sizes = {match_budget(k, budget, nx)};
        } catch (const InvalidArgument& e) {
          throw ConfigError(e.what());
        }
      }
      for (int nh : sizes)
        for (auto seed : g.seeds) cells.push_back({gr, k, nh, seed});
    }
  }
  std::sort(cells.begin(), cells.end(), grid_less);
  return cells;
}

/// Runs every cell (concurrently when threads > 1). Each cell owns its model,
/// optimizer and RNG streams, so results do not depend on scheduling.
inline std::vector<GridRow> run_grid(const GridConfig& g) {
  std::map<std::string, GrammarData> data;
  std::map<std::string, std::size_t> nx;
  for (const auto& gr : g.grammars) {
    if (data.count(gr)) continue;
    data.emplace(gr, grammar_data(gr, g.data_seed, g.train_cap, g.slsp_train_size));
    nx[gr] = data.at(gr).train.alphabet.size();
  }
  const auto cells = expand_grid(g, nx);
  std::vector<GridRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      TrainConfig cfg = g.base;
      cfg.kind = cells[i].kind;
      cfg.nh = cells[i].nh;
      cfg.seed = cells[i].seed;
      const auto& d = data.at(cells[i].grammar);
      rows[i] = GridRow{cells[i], train(cfg, d.train, d.tests)};
    }
  };
  std::size_t threads = g.threads ? g.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(1, cells.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

inline std::string run_id(const GridCell& c) {
  return c.grammar + "_" + to_string(c.kind) + "_h" + std::to_string(c.nh) + "_s" + std::to_string(c.seed);
}

inline std::string grid_csv(const std::vector<GridRow>& rows) {
  std::set<std::string> splits;
  for (const auto& r : rows)
    for (const auto& [name, m] : r.report.test_metrics) splits.insert(name);
  std::ostringstream out;
  out.precision(6);
  out << "grammar,kind,nh,seed,params,epochs,steps,train_f1";
  for (const auto& s : splits) out << ',' << s << "_f1," << s << "_bcr," << s << "_accuracy";
  out << ",dominant,ratio,status,wall_seconds\n";
  for (const auto& r : rows) {
    const auto& rep = r.report;
    out << r.cell.grammar << ',' << to_string(r.cell.kind) << ',' << r.cell.nh << ',' << r.cell.seed << ','
        << rep.param_count << ',' << rep.epochs_run << ',' << rep.steps << ',' << rep.train_metrics.f1;
    for (const auto& s : splits) {
      auto it = rep.test_metrics.find(s);
      if (it == rep.test_metrics.end()) out << ",,,";
      else out << ',' << it->second.f1 << ',' << it->second.bcr << ',' << it->second.accuracy;
    }
    const auto dom = norm_trace_report(rep);
    out << ',' << (dom.degenerate ? "-" : dom.dominant) << ',' << dom.ratio << ',' << rep.status << ','
        << rep.wall_seconds << '\n';
  }
  return out.str();
}

/// results.csv, results.json and runs/<id>/{report.json,trace.csv,model.json}.
inline void write_grid(const std::string& dir, const std::vector<GridRow>& rows) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  write_text_file((fs::path(dir) / "results.csv").string(), grid_csv(rows));
  auto all = nlohmann::json::array();
  for (const auto& r : rows) {
    auto j = to_json(r.report);
    j["grammar"] = r.cell.grammar;
    j["run"] = run_id(r.cell);
    j["dominance"] = to_json(norm_trace_report(r.report));
    all.push_back(std::move(j));
    write_run((fs::path(dir) / "runs" / run_id(r.cell)).string(), r.report);
  }
  write_text_file((fs::path(dir) / "results.json").string(), all.dump(1) + "\n");
}

}  // namespace regent
