#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "regent/automata/dfa.hpp"
#include "regent/automata/io.hpp"

namespace regent {

struct LabeledItem {
  Word word;
  bool label = false;

  friend bool operator==(const LabeledItem&, const LabeledItem&) = default;
};

// Canonical item order: by length, then lexicographically by symbol index.
inline bool canonical_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

struct LabeledDataset {
  Alphabet alphabet;
  std::vector<LabeledItem> items;
  // Relative path of the labelling DFA, or "-".
  std::string dfa_path = "-";
  // Free-form provenance: grammar, split, seed, length profile, ratios.
  std::map<std::string, std::string> meta;

  std::size_t size() const noexcept { return items.size(); }

  std::size_t positives() const {
    return static_cast<std::size_t>(std::count_if(items.begin(), items.end(), [](const auto& it) { return it.label; }));
  }

  void sort_canonical() {
    std::sort(items.begin(), items.end(),
              [](const LabeledItem& a, const LabeledItem& b) { return canonical_less(a.word, b.word); });
  }

  friend bool operator==(const LabeledDataset& a, const LabeledDataset& b) {
    return a.alphabet == b.alphabet && a.items == b.items && a.dfa_path == b.dfa_path && a.meta == b.meta;
  }
};

// File format:
//   dataset v1
//   alphabet <sym> ...
//   dfa <relative path | ->
//   meta <key> <value>          (zero or more)
//   <0|1>\t<word>               (word concatenated for single-char
//                                alphabets, space separated otherwise; ε
//                                for the empty word)
inline std::string write_dataset(const LabeledDataset& ds) {
  std::ostringstream out;
  out << "dataset v1\nalphabet";
  for (const auto& s : ds.alphabet.symbols()) out << ' ' << s;
  out << "\ndfa " << ds.dfa_path << '\n';
  for (const auto& [k, v] : ds.meta) out << "meta " << k << ' ' << v << '\n';
  for (const auto& it : ds.items) out << (it.label ? '1' : '0') << '\t' << ds.alphabet.format(it.word) << '\n';
  return out.str();
}

inline LabeledDataset read_dataset(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  auto next = [&](const char* what) {
    if (!std::getline(in, line)) throw ParseError(lineno + 1, std::string("unexpected end of input, expected ") + what);
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
  };
  LabeledDataset ds;
  next("header");
  if (line != "dataset v1") throw ParseError(lineno, "expected 'dataset v1'");
  next("alphabet");
  {
    auto toks = detail::split_ws(line);
    if (toks.size() < 2 || toks[0] != "alphabet") throw ParseError(lineno, "expected 'alphabet <sym> ...'");
    try {
      ds.alphabet = Alphabet(std::vector<std::string>(toks.begin() + 1, toks.end()));
    } catch (const InvalidArgument& e) {
      throw ParseError(lineno, e.what());
    }
  }
  next("dfa");
  {
    auto toks = detail::split_ws(line);
    if (toks.size() != 2 || toks[0] != "dfa") throw ParseError(lineno, "expected 'dfa <path|->'");
    ds.dfa_path = toks[1];
  }
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("meta ", 0) == 0) {
      if (!ds.items.empty()) throw ParseError(lineno, "meta lines must precede rows");
      const auto rest = line.substr(5);
      const auto sp = rest.find(' ');
      if (sp == std::string::npos) throw ParseError(lineno, "expected 'meta <key> <value>'");
      ds.meta[rest.substr(0, sp)] = rest.substr(sp + 1);
      continue;
    }
    if (line.size() < 2 || (line[0] != '0' && line[0] != '1') || line[1] != '\t')
      throw ParseError(lineno, "expected '<0|1>\\t<word>'");
    LabeledItem item;
    item.label = line[0] == '1';
    try {
      item.word = ds.alphabet.parse(std::string_view(line).substr(2));
    } catch (const InvalidArgument& e) {
      throw ParseError(lineno, e.what());
    }
    ds.items.push_back(std::move(item));
  }
  return ds;
}

inline LabeledDataset load_dataset(const std::string& path) { return read_dataset(read_text_file(path)); }

/// Items whose label disagrees with the DFA (empty when the dataset is sound).
inline std::vector<std::size_t> label_mismatches(const LabeledDataset& ds, const Dfa& dfa) {
  if (!(ds.alphabet == dfa.alphabet())) throw InvalidArgument("dataset and DFA alphabets differ");
  std::vector<std::size_t> bad;
  for (std::size_t i = 0; i < ds.items.size(); ++i)
    if (accepts(dfa, ds.items[i].word) != ds.items[i].label) bad.push_back(i);
  return bad;
}

}  // namespace regent
