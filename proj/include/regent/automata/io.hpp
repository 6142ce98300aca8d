#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "regent/automata/dfa.hpp"

namespace regent {

// Text format:
//   dfa v1
//   alphabet <sym> <sym> ...
//   states <n>
//   start <idx>
//   accepting <idx> ...
//   trans <state> <symbol> <state>     (n * I lines)

inline std::string serialize(const Dfa& dfa) {
  std::ostringstream out;
  out << "dfa v1\nalphabet";
  for (const auto& s : dfa.alphabet().symbols()) out << ' ' << s;
  out << "\nstates " << dfa.size() << "\nstart " << dfa.start() << "\naccepting";
  for (State s : dfa.accepting_states()) out << ' ' << s;
  out << '\n';
  for (State s = 0; s < dfa.size(); ++s)
    for (Symbol i = 0; i < dfa.alphabet_size(); ++i)
      out << "trans " << s << ' ' << dfa.alphabet().symbol(i) << ' ' << dfa.next(s, i) << '\n';
  return out.str();
}

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

inline std::uint64_t parse_index(const std::string& tok, std::size_t line) {
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
    throw ParseError(line, "expected a non-negative integer, got '" + tok + "'");
  try {
    return std::stoull(tok);
  } catch (const std::exception&) {
    throw ParseError(line, "integer out of range: '" + tok + "'");
  }
}

}  // namespace detail

inline Dfa deserialize(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  auto next_line = [&](const char* what) {
    while (std::getline(in, raw)) {
      ++lineno;
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      if (!raw.empty()) return detail::split_ws(raw);
    }
    throw ParseError(lineno + 1, std::string("unexpected end of input, expected ") + what);
  };
  auto expect_key = [&](const std::vector<std::string>& toks, const char* key) {
    if (toks.empty() || toks[0] != key) throw ParseError(lineno, std::string("expected '") + key + "'");
  };

  auto toks = next_line("header");
  if (toks.size() != 2 || toks[0] != "dfa" || toks[1] != "v1") throw ParseError(lineno, "expected 'dfa v1'");

  toks = next_line("alphabet");
  expect_key(toks, "alphabet");
  if (toks.size() < 2) throw ParseError(lineno, "alphabet must list at least one symbol");
  Alphabet alphabet;
  try {
    alphabet = Alphabet(std::vector<std::string>(toks.begin() + 1, toks.end()));
  } catch (const InvalidArgument& e) {
    throw ParseError(lineno, e.what());
  }

  toks = next_line("states");
  expect_key(toks, "states");
  if (toks.size() != 2) throw ParseError(lineno, "expected 'states <n>'");
  const auto n = detail::parse_index(toks[1], lineno);
  if (n == 0 || n > 0xFFFFFFF) throw ParseError(lineno, "state count out of range");

  toks = next_line("start");
  expect_key(toks, "start");
  if (toks.size() != 2) throw ParseError(lineno, "expected 'start <idx>'");
  const auto start = detail::parse_index(toks[1], lineno);
  if (start >= n) throw ParseError(lineno, "start state out of range");

  toks = next_line("accepting");
  expect_key(toks, "accepting");
  std::vector<bool> acc(n, false);
  for (std::size_t k = 1; k < toks.size(); ++k) {
    const auto s = detail::parse_index(toks[k], lineno);
    if (s >= n) throw ParseError(lineno, "accepting state out of range");
    acc[s] = true;
  }

  const auto I = alphabet.size();
  std::vector<State> delta(n * I);
  std::vector<bool> seen(n * I, false);
  for (std::size_t k = 0; k < n * I; ++k) {
    toks = next_line("transition");
    if (toks.size() != 4 || toks[0] != "trans") throw ParseError(lineno, "expected 'trans <state> <symbol> <state>'");
    const auto from = detail::parse_index(toks[1], lineno);
    const auto to = detail::parse_index(toks[3], lineno);
    if (from >= n || to >= n) throw ParseError(lineno, "transition state out of range");
    if (!alphabet.contains(toks[2])) throw ParseError(lineno, "unknown symbol '" + toks[2] + "'");
    const auto slot = from * I + alphabet.index_of(toks[2]);
    if (seen[slot]) throw ParseError(lineno, "duplicate transition");
    seen[slot] = true;
    delta[slot] = static_cast<State>(to);
  }
  while (std::getline(in, raw)) {
    ++lineno;
    if (!detail::split_ws(raw).empty()) throw ParseError(lineno, "trailing content after transitions");
  }
  return Dfa(std::move(alphabet), static_cast<State>(n), static_cast<State>(start), std::move(acc), std::move(delta));
}

/// Graphviz rendering: one labelled edge per (state, symbol).
inline std::string to_dot(const Dfa& dfa) {
  std::ostringstream out;
  out << "digraph dfa {\n  rankdir=LR;\n  __start [shape=point];\n";
  for (State s = 0; s < dfa.size(); ++s)
    out << "  q" << s << " [shape=" << (dfa.is_accepting(s) ? "doublecircle" : "circle") << "];\n";
  out << "  __start -> q" << dfa.start() << ";\n";
  for (State s = 0; s < dfa.size(); ++s)
    for (Symbol i = 0; i < dfa.alphabet_size(); ++i)
      out << "  q" << s << " -> q" << dfa.next(s, i) << " [label=\"" << dfa.alphabet().symbol(i) << "\"];\n";
  out << "}\n";
  return out.str();
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgument("cannot write '" + path + "'");
  out << text;
}

inline Dfa load_dfa(const std::string& path) { return deserialize(read_text_file(path)); }

}  // namespace regent
