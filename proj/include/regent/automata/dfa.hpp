#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "regent/error.hpp"

namespace regent {

using Symbol = std::uint16_t;
using State = std::uint32_t;
// A string over an alphabet, stored as symbol indices.
using Word = std::vector<Symbol>;

/// Ordered set of printable tokens. The position of a token is its symbol
/// index everywhere downstream (one-hot coordinates, transition matrices).
class Alphabet {
 public:
  Alphabet() = default;

  explicit Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
    if (symbols_.empty()) throw InvalidArgument("alphabet must not be empty");
    if (symbols_.size() > 0xFFFF) throw InvalidArgument("alphabet too large");
    for (std::size_t i = 0; i < symbols_.size(); ++i) {
      const auto& s = symbols_[i];
      if (s.empty()) throw InvalidArgument("empty alphabet symbol");
      for (char c : s) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r')
          throw InvalidArgument("alphabet symbol contains whitespace: '" + s + "'");
      }
      if (s == "ε") throw InvalidArgument("'ε' is reserved for the empty string");
      if (!index_.emplace(s, static_cast<Symbol>(i)).second)
        throw InvalidArgument("duplicate alphabet symbol '" + s + "'");
    }
  }

  static Alphabet binary() { return Alphabet({"0", "1"}); }
  static Alphabet abcd() { return Alphabet({"a", "b", "c", "d"}); }

  /// "a".."z" for small alphabets, "s0".."s{n-1}" otherwise.
  static Alphabet generated(std::size_t n) {
    std::vector<std::string> syms;
    for (std::size_t i = 0; i < n; ++i) {
      if (n <= 26)
        syms.emplace_back(1, static_cast<char>('a' + i));
      else
        syms.push_back("s" + std::to_string(i));
    }
    return Alphabet(std::move(syms));
  }

  std::size_t size() const noexcept { return symbols_.size(); }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }
  const std::string& symbol(Symbol i) const { return symbols_.at(i); }

  bool contains(std::string_view s) const { return index_.count(std::string(s)) != 0; }

  Symbol index_of(std::string_view s) const {
    auto it = index_.find(std::string(s));
    if (it == index_.end()) throw InvalidArgument("unknown symbol '" + std::string(s) + "'");
    return it->second;
  }

  bool single_char() const {
    return std::all_of(symbols_.begin(), symbols_.end(), [](const auto& s) { return s.size() == 1; });
  }

  /// Parses a word. Single-character alphabets accept concatenated text
  /// ("0110"); otherwise tokens are whitespace separated. "ε" or "" is the
  /// empty word.
  Word parse(std::string_view text) const {
    Word out;
    if (text == "ε") return out;
    const bool spaced = text.find_first_of(" \t") != std::string_view::npos;
    if (single_char() && !spaced) {
      for (char c : text) out.push_back(index_of(std::string_view(&c, 1)));
      return out;
    }
    std::size_t pos = 0;
    while (pos < text.size()) {
      while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t')) ++pos;
      std::size_t end = pos;
      while (end < text.size() && text[end] != ' ' && text[end] != '\t') ++end;
      if (end > pos) out.push_back(index_of(text.substr(pos, end - pos)));
      pos = end;
    }
    return out;
  }

  std::string format(const Word& w) const {
    if (w.empty()) return "ε";
    std::string out;
    const bool compact = single_char();
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (!compact && i > 0) out += ' ';
      out += symbols_.at(w[i]);
    }
    return out;
  }

  friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.symbols_ == b.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, Symbol> index_;
};

/// Complete deterministic finite acceptor. The transition table is total:
/// delta(s, i) is defined for every state s and symbol index i.
class Dfa {
 public:
  Dfa() = default;

  Dfa(Alphabet alphabet, State n_states, State start, std::vector<bool> accepting,
      std::vector<State> delta)
      : alphabet_(std::move(alphabet)),
        n_(n_states),
        start_(start),
        accepting_(std::move(accepting)),
        delta_(std::move(delta)) {
    if (n_ == 0) throw InvalidArgument("DFA needs at least one state");
    if (start_ >= n_) throw InvalidArgument("start state out of range");
    if (accepting_.size() != n_) throw InvalidArgument("accepting mask has wrong size");
    if (delta_.size() != static_cast<std::size_t>(n_) * alphabet_.size())
      throw InvalidArgument("transition table is not total");
    for (State t : delta_)
      if (t >= n_) throw InvalidArgument("transition target out of range");
  }

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t alphabet_size() const noexcept { return alphabet_.size(); }
  State size() const noexcept { return n_; }
  State start() const noexcept { return start_; }
  bool is_accepting(State s) const { return accepting_.at(s); }
  const std::vector<bool>& accepting_mask() const noexcept { return accepting_; }
  State next(State s, Symbol i) const { return delta_[static_cast<std::size_t>(s) * alphabet_.size() + i]; }
  const std::vector<State>& table() const noexcept { return delta_; }

  std::vector<State> accepting_states() const {
    std::vector<State> out;
    for (State s = 0; s < n_; ++s)
      if (accepting_[s]) out.push_back(s);
    return out;
  }

  State run(const Word& w) const { return run_from(start_, w); }

  State run_from(State s, const Word& w) const {
    const auto I = alphabet_.size();
    for (Symbol c : w) {
      if (c >= I) throw InvalidArgument("symbol index " + std::to_string(c) + " outside alphabet");
      s = next(s, c);
    }
    return s;
  }

  friend bool operator==(const Dfa& a, const Dfa& b) {
    return a.alphabet_ == b.alphabet_ && a.n_ == b.n_ && a.start_ == b.start_ &&
           a.accepting_ == b.accepting_ && a.delta_ == b.delta_;
  }

 private:
  Alphabet alphabet_;
  State n_ = 0;
  State start_ = 0;
  std::vector<bool> accepting_;
  std::vector<State> delta_;
};

inline bool accepts(const Dfa& dfa, const Word& w) { return dfa.is_accepting(dfa.run(w)); }

inline bool accepts(const Dfa& dfa, std::string_view text) {
  return accepts(dfa, dfa.alphabet().parse(text));
}

/// Drops states unreachable from the start state; survivors are renumbered
/// in BFS order (symbol-index order among siblings).
inline Dfa trim(const Dfa& dfa) {
  const auto I = dfa.alphabet_size();
  constexpr State kUnseen = ~State{0};
  std::vector<State> order;
  std::vector<State> rename(dfa.size(), kUnseen);
  std::queue<State> frontier;
  rename[dfa.start()] = 0;
  order.push_back(dfa.start());
  frontier.push(dfa.start());
  while (!frontier.empty()) {
    State s = frontier.front();
    frontier.pop();
    for (Symbol i = 0; i < I; ++i) {
      State t = dfa.next(s, i);
      if (rename[t] == kUnseen) {
        rename[t] = static_cast<State>(order.size());
        order.push_back(t);
        frontier.push(t);
      }
    }
  }
  const auto n = static_cast<State>(order.size());
  std::vector<bool> acc(n);
  std::vector<State> delta(static_cast<std::size_t>(n) * I);
  for (State k = 0; k < n; ++k) {
    acc[k] = dfa.is_accepting(order[k]);
    for (Symbol i = 0; i < I; ++i) delta[k * I + i] = rename[dfa.next(order[k], i)];
  }
  return Dfa(dfa.alphabet(), n, 0, std::move(acc), std::move(delta));
}

/// Language-equivalent DFA with the fewest states, canonically numbered
/// (BFS from start, symbol-index order). Equal languages over the same
/// alphabet give identical results.
inline Dfa minimize(const Dfa& dfa) {
  const Dfa reach = trim(dfa);
  const auto I = reach.alphabet_size();
  const State n = reach.size();

  // Moore partition refinement: split blocks by (block, successor blocks)
  // until the block count stops growing.
  std::vector<State> block(n);
  for (State s = 0; s < n; ++s) block[s] = reach.is_accepting(s) ? 1 : 0;
  std::size_t n_blocks = 0;
  for (;;) {
    std::map<std::vector<State>, State> ids;
    std::vector<State> refined(n);
    std::vector<State> key(I + 1);
    for (State s = 0; s < n; ++s) {
      key[0] = block[s];
      for (Symbol i = 0; i < I; ++i) key[i + 1] = block[reach.next(s, i)];
      auto [it, fresh] = ids.emplace(key, static_cast<State>(ids.size()));
      refined[s] = it->second;
    }
    block.swap(refined);
    if (ids.size() == n_blocks) break;
    n_blocks = ids.size();
  }

  const auto nb = static_cast<State>(n_blocks);
  std::vector<State> rep(nb, ~State{0});
  for (State s = 0; s < n; ++s)
    if (rep[block[s]] == ~State{0}) rep[block[s]] = s;
  std::vector<bool> acc(nb);
  std::vector<State> delta(static_cast<std::size_t>(nb) * I);
  for (State b = 0; b < nb; ++b) {
    acc[b] = reach.is_accepting(rep[b]);
    for (Symbol i = 0; i < I; ++i) delta[b * I + i] = block[reach.next(rep[b], i)];
  }
  return trim(Dfa(reach.alphabet(), nb, block[reach.start()], std::move(acc), std::move(delta)));
}

/// Per-symbol 0/1 matrices (column j has its single 1 in row delta(j, i))
/// and their sum.
struct TransitionMatrices {
  std::vector<Eigen::MatrixXi> per_symbol;
  Eigen::MatrixXi summed;

  std::size_t alphabet_size() const noexcept { return per_symbol.size(); }
};

inline TransitionMatrices transition_matrices(const Dfa& dfa) {
  const auto n = static_cast<Eigen::Index>(dfa.size());
  TransitionMatrices tm;
  tm.summed = Eigen::MatrixXi::Zero(n, n);
  for (Symbol i = 0; i < dfa.alphabet_size(); ++i) {
    Eigen::MatrixXi t = Eigen::MatrixXi::Zero(n, n);
    for (State j = 0; j < dfa.size(); ++j) t(dfa.next(j, i), j) = 1;
    tm.summed += t;
    tm.per_symbol.push_back(std::move(t));
  }
  return tm;
}

/// Number of states that self-loop on every symbol, read off as the diagonal
/// entries of T equal to the alphabet size.
inline std::size_t absorbing_count(const TransitionMatrices& tm) {
  const auto I = static_cast<int>(tm.alphabet_size());
  std::size_t k = 0;
  for (Eigen::Index s = 0; s < tm.summed.rows(); ++s)
    if (tm.summed(s, s) == I) ++k;
  return k;
}

inline std::size_t absorbing_count(const Dfa& dfa) { return absorbing_count(transition_matrices(dfa)); }

/// States that cannot reach any accepting state (at most one survives minimization).
inline std::vector<State> dead_states(const Dfa& dfa) {
  const auto I = dfa.alphabet_size();
  std::vector<bool> live(dfa.size(), false);
  for (State s = 0; s < dfa.size(); ++s) live[s] = dfa.is_accepting(s);
  for (bool changed = true; changed;) {
    changed = false;
    for (State s = 0; s < dfa.size(); ++s) {
      if (live[s]) continue;
      for (Symbol i = 0; i < I; ++i) {
        if (live[dfa.next(s, i)]) {
          live[s] = true;
          changed = true;
          break;
        }
      }
    }
  }
  std::vector<State> out;
  for (State s = 0; s < dfa.size(); ++s)
    if (!live[s]) out.push_back(s);
  return out;
}

/// Number of states in the minimal DFA once its rejecting sink (if any) is
/// dropped, i.e. the size of the minimal partial automaton.
inline std::size_t live_state_count(const Dfa& dfa) {
  const Dfa m = minimize(dfa);
  return m.size() - dead_states(m).size();
}

}  // namespace regent
