// regent: command-line front end for the automata, entropy, dataset and
// training tools. Exit codes: 0 ok, 1 I/O or other failure, 2 bad
// configuration or input, 3 numerical failure.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>

#include "regent/regent.hpp"

namespace fs = std::filesystem;
using namespace regent;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") std::cout << text;
  else write_text_file(out, text);
}

Dfa family_dfa(const std::string& family, int id, unsigned states, unsigned alphabet_size, double fraction,
               std::uint64_t seed) {
  if (family == "random") return build_random(states, Alphabet::generated(alphabet_size), fraction, seed);
  return build_family(family, id);
}

nlohmann::json spectral_json(const SpectralResult& s) {
  nlohmann::json j = to_json(s.classification);
  j["absorbing_count"] = s.absorbing;
  j["lambda_moduli"] = s.moduli;
  j["lambda2"] = s.lambda2;
  return j;
}

void write_split(const fs::path& dir, const std::string& name, LabeledDataset ds) {
  ds.dfa_path = "dfa.txt";
  write_text_file((dir / (name + ".ds")).string(), write_dataset(ds));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regular-grammar complexity and recurrent-network experiments"};
  app.require_subcommand(1);

  // dfa ...
  auto* dfa_cmd = app.add_subcommand("dfa", "build, minimize and query automata");
  dfa_cmd->require_subcommand(1);
  std::string family = "tomita", out, dfa_file, text;
  int id = 1;
  unsigned states = 8, alphabet_size = 2;
  double fraction = 0.5;
  std::uint64_t seed = 1;
  bool dot = false, minimal = false;

  auto* build = dfa_cmd->add_subcommand("build", "materialize a built-in grammar");
  build->add_option("--family", family, "tomita | sl | sp | random")->capture_default_str();
  build->add_option("--id", id, "grammar number (tomita 1-7, sl 4, sp 8)")->capture_default_str();
  build->add_option("--states", states, "random family: state count")->capture_default_str();
  build->add_option("--alphabet-size", alphabet_size, "random family: alphabet size")->capture_default_str();
  build->add_option("--accept-fraction", fraction, "random family: accepting probability")->capture_default_str();
  build->add_option("--seed", seed, "random family: seed")->capture_default_str();
  build->add_flag("--minimize", minimal, "minimize before printing");
  build->add_flag("--dot", dot, "print Graphviz instead of the dfa v1 format");
  build->add_option("--out", out, "output file (default stdout)");

  auto* minimize_cmd = dfa_cmd->add_subcommand("minimize", "minimize a DFA file");
  minimize_cmd->add_option("file", dfa_file)->required();
  minimize_cmd->add_flag("--dot", dot, "print Graphviz");
  minimize_cmd->add_option("--out", out, "output file (default stdout)");

  auto* accepts_cmd = dfa_cmd->add_subcommand("accepts", "run a string; prints 1 or 0");
  accepts_cmd->add_option("file", dfa_file)->required();
  accepts_cmd->add_option("string", text, "symbols (ε or empty for the empty word)");

  // complexity
  std::size_t nmax = 32;
  bool generalized = false;
  auto* entropy_cmd = app.add_subcommand("entropy", "count curve, H^N and both classifiers as JSON");
  entropy_cmd->add_option("file", dfa_file)->required();
  entropy_cmd->add_option("--nmax", nmax)->capture_default_str();
  entropy_cmd->add_flag("--generalized", generalized, "allow the spectral test on alphabets larger than two");
  entropy_cmd->add_option("--out", out, "output file (default stdout)");

  auto* classify_cmd = app.add_subcommand("classify", "spectral growth class");
  classify_cmd->add_option("file", dfa_file)->required();
  classify_cmd->add_flag("--generalized", generalized, "allow alphabets larger than two");

  auto* rings_cmd = app.add_subcommand("rings", "acceptance bits per length for ring plots (CSV)");
  rings_cmd->add_option("file", dfa_file)->required();
  rings_cmd->add_option("--nmax", nmax)->capture_default_str();
  rings_cmd->add_option("--out", out, "output file (default stdout)");

  // datasets
  std::string protocol = "tomita";
  double sparsity = 1.0;
  std::size_t train_size = kSlSpTrainSize;
  std::size_t train_cap = kTomitaTrainCap;
  auto* gen = app.add_subcommand("gen", "generate labelled splits");
  gen->add_option("--family", family, "tomita | sl | sp | random")->capture_default_str();
  gen->add_option("--id", id)->capture_default_str();
  gen->add_option("--states", states, "random family: state count")->capture_default_str();
  gen->add_option("--alphabet-size", alphabet_size, "random family: alphabet size")->capture_default_str();
  gen->add_option("--accept-fraction", fraction, "random family: accepting probability")->capture_default_str();
  gen->add_option("--protocol", protocol, "tomita | slsp | sparse")->capture_default_str();
  gen->add_option("--seed", seed)->capture_default_str();
  gen->add_option("--sparsity", sparsity, "sparse protocol: 0.125 | 0.25 | 0.5 | 1")->capture_default_str();
  gen->add_option("--train-size", train_size, "slsp protocol: training strings")->capture_default_str();
  gen->add_option("--train-cap", train_cap, "tomita protocol: strings per training length")->capture_default_str();
  gen->add_option("--out", out, "output directory")->required();

  // neural
  std::string mode = "srn";
  std::size_t samples = 10000;
  auto* construct_cmd = app.add_subcommand("construct", "exact linear 2-RNN from a DFA");
  construct_cmd->add_option("file", dfa_file)->required();
  construct_cmd->add_option("--out", out, "checkpoint path")->required();

  auto* fit_cmd = app.add_subcommand("fit-first-order", "closed-form first-order fit and its residual");
  fit_cmd->add_option("file", dfa_file)->required();
  fit_cmd->add_option("--mode", mode, "srn | mirnn")->capture_default_str();
  fit_cmd->add_option("--samples", samples, "Monte-Carlo points")->capture_default_str();
  fit_cmd->add_option("--seed", seed)->capture_default_str();
  fit_cmd->add_option("--out", out, "optional checkpoint path");

  // harness
  std::string config, model_path, data_path;
  auto* train_cmd = app.add_subcommand("train", "train one model from a key = value config");
  train_cmd->add_option("--config", config)->required();

  auto* eval_cmd = app.add_subcommand("eval", "F1 / BCR / accuracy of a checkpoint on a dataset");
  eval_cmd->add_option("--model", model_path)->required();
  eval_cmd->add_option("--data", data_path)->required();

  auto* grid_cmd = app.add_subcommand("grid", "run a grammar x kind x size x seed grid");
  grid_cmd->add_option("--config", config)->required();
  grid_cmd->add_option("--out", out, "results directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (build->parsed()) {
      Dfa d = family_dfa(family, id, states, alphabet_size, fraction, seed);
      if (minimal) d = minimize(d);
      emit(dot ? to_dot(d) : serialize(d), out);
    } else if (minimize_cmd->parsed()) {
      const Dfa d = minimize(load_dfa(dfa_file));
      emit(dot ? to_dot(d) : serialize(d), out);
    } else if (accepts_cmd->parsed()) {
      const Dfa d = load_dfa(dfa_file);
      std::cout << (accepts(d, d.alphabet().parse(text)) ? 1 : 0) << '\n';
    } else if (entropy_cmd->parsed()) {
      emit(to_json(entropy_report(load_dfa(dfa_file), nmax, generalized)).dump(1) + "\n", out);
    } else if (classify_cmd->parsed()) {
      std::cout << spectral_json(classify_spectral(load_dfa(dfa_file), generalized)).dump(1) << '\n';
    } else if (rings_cmd->parsed()) {
      emit(rings_csv(ring_data(load_dfa(dfa_file), nmax)), out);
    } else if (gen->parsed()) {
      const Dfa d = family_dfa(family, id, states, alphabet_size, fraction, seed);
      const std::string grammar = family == "random" ? "random" : family + std::to_string(id);
      const fs::path dir(out);
      fs::create_directories(dir);
      write_text_file((dir / "dfa.txt").string(), serialize(d));
      if (protocol == "tomita") {
        auto s = tomita_protocol(d, seed, grammar, train_cap);
        write_split(dir, "train", std::move(s.train));
        write_split(dir, "test", std::move(s.test));
      } else if (protocol == "slsp") {
        auto s = slsp_protocol(d, seed, grammar, train_size);
        write_split(dir, "train", std::move(s.train));
        write_split(dir, "test1", std::move(s.test1));
        write_split(dir, "test2", std::move(s.test2));
      } else if (protocol == "sparse") {
        auto s = sparse_protocol(d, sparsity, seed, grammar);
        write_split(dir, "train", std::move(s.train));
        write_split(dir, "test", std::move(s.test));
      } else {
        throw ConfigError("unknown protocol '" + protocol + "'");
      }
      std::cout << "wrote " << dir.string() << '\n';
    } else if (construct_cmd->parsed()) {
      const Dfa d = minimize(load_dfa(dfa_file));
      save_model(out, construct_2rnn(d), {{"source", dfa_file}, {"construction", "transition matrices"}});
      std::cout << "wrote " << out << " (" << d.size() << " hidden units)\n";
    } else if (fit_cmd->parsed()) {
      const Dfa d = minimize(load_dfa(dfa_file));
      const auto fit = first_order_fit(d, parse_fit_mode(mode), samples, seed);
      nlohmann::json j{{"mode", mode}, {"states", d.size()}, {"residual", fit.residual}, {"std_error", fit.std_error}};
      if (!out.empty()) save_model(out, fit.model, {{"source", dfa_file}, {"fit", mode}, {"seed", seed}});
      std::cout << j.dump(1) << '\n';
    } else if (train_cmd->parsed()) {
      const auto kv = KeyValueConfig::load(config);
      const auto cfg = TrainConfig::from(kv, fs::path(config).parent_path().string());
      kv.reject_unknown();
      const auto rep = train_from_files(cfg);
      if (!cfg.out_dir.empty()) write_run(cfg.out_dir, rep);
      auto j = to_json(rep);
      j["dominance"] = to_json(norm_trace_report(rep));
      j.erase("epochs");
      std::cout << j.dump(1) << '\n';
      if (rep.diverged()) {
        std::cerr << "regent: " << rep.diagnostic << '\n';
        return kExitNumerical;
      }
    } else if (eval_cmd->parsed()) {
      const Model m = load_model(model_path);
      const auto ds = load_verified_dataset(data_path);
      std::cout << to_json(evaluate(m, ds)).dump(1) << '\n';
    } else if (grid_cmd->parsed()) {
      const auto kv = KeyValueConfig::load(config);
      const auto g = GridConfig::from(kv);
      kv.reject_unknown();
      const auto rows = run_grid(g);
      write_grid(out, rows);
      std::cout << grid_csv(rows);
      for (const auto& r : rows)
        if (r.report.diverged()) return kExitNumerical;
    }
  } catch (const ConfigError& e) {
    std::cerr << "regent: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParseError& e) {
    std::cerr << "regent: parse error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "regent: " << e.what() << '\n';
    return kExitConfig;
  } catch (const UnsupportedAlphabet& e) {
    std::cerr << "regent: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "regent: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "regent: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
