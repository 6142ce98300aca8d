#pragma once

#include <map>
#include <queue>
#include <random>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "regent/automata/dfa.hpp"

namespace regent {

namespace detail {

// Breadth-first materialisation of an automaton whose states are values of
// Key. `step` returns the successor key, `accepting` decides acceptance.
template <typename Key, typename Step, typename Accepting>
Dfa explore(const Alphabet& alphabet, const Key& start, Step step, Accepting accepting) {
  const auto I = alphabet.size();
  std::map<Key, State> ids;
  std::vector<Key> keys;
  std::queue<State> frontier;
  ids.emplace(start, 0);
  keys.push_back(start);
  frontier.push(0);
  std::vector<State> delta;
  while (!frontier.empty()) {
    const State s = frontier.front();
    frontier.pop();
    if (delta.size() < (static_cast<std::size_t>(s) + 1) * I) delta.resize((static_cast<std::size_t>(s) + 1) * I);
    for (Symbol i = 0; i < I; ++i) {
      Key next = step(keys[s], i);
      auto [it, fresh] = ids.emplace(next, static_cast<State>(keys.size()));
      if (fresh) {
        keys.push_back(std::move(next));
        frontier.push(it->second);
      }
      delta[static_cast<std::size_t>(s) * I + i] = it->second;
    }
  }
  const auto n = static_cast<State>(keys.size());
  delta.resize(static_cast<std::size_t>(n) * I);
  std::vector<bool> acc(n);
  for (State s = 0; s < n; ++s) acc[s] = accepting(keys[s]);
  return Dfa(alphabet, n, 0, std::move(acc), std::move(delta));
}

inline Dfa from_table(State n, std::vector<bool> acc, std::vector<State> delta) {
  return Dfa(Alphabet::binary(), n, 0, std::move(acc), std::move(delta));
}

inline bool ends_with(const Word& w, const Word& suffix) {
  return suffix.size() <= w.size() && std::equal(suffix.rbegin(), suffix.rend(), w.rbegin());
}

}  // namespace detail

/// Tomita grammar k over {0,1}. The result is complete but not necessarily
/// minimal.
inline Dfa build_tomita(int k) {
  using detail::from_table;
  // Rows are (on '0', on '1') per state; state 0 is the start.
  switch (k) {
    case 1:  // 1*
      return from_table(2, {true, false}, {1, 0, 1, 1});
    case 2:  // (10)*
      return from_table(3, {true, false, false}, {2, 1, 0, 2, 2, 2});
    case 3: {
      // No odd run of 1s may be followed by an odd run of 0s. States:
      // 0 clean, 1 odd 1-run, 2 odd 0-run after odd 1-run, 3 even 0-run
      // after odd 1-run, 4 even 1-run, 5 violated.
      return from_table(6, {true, true, false, true, true, false},
                        {0, 1,  //
                         2, 4,  //
                         3, 5,  //
                         2, 1,  //
                         0, 1,  //
                         5, 5});
    }
    case 4:  // no "000"; state = trailing zeros, 3 = dead
      return from_table(4, {true, true, true, false}, {1, 0, 2, 0, 3, 0, 3, 3});
    case 5: {
      // parity product: state = 2 * (zeros mod 2) + (ones mod 2)
      return detail::explore(
          Alphabet::binary(), std::pair<int, int>{0, 0},
          [](std::pair<int, int> p, Symbol c) {
            return c == 0 ? std::pair{p.first ^ 1, p.second} : std::pair{p.first, p.second ^ 1};
          },
          [](std::pair<int, int> p) { return p.first == 0 && p.second == 0; });
    }
    case 6:  // (#0 - #1) mod 3 == 0
      return detail::explore(
          Alphabet::binary(), 0, [](int d, Symbol c) { return c == 0 ? (d + 1) % 3 : (d + 2) % 3; },
          [](int d) { return d == 0; });
    case 7:  // 0*1*0*1*; state = block phase, 4 = dead
      return from_table(5, {true, true, true, true, false}, {0, 1, 2, 1, 2, 3, 4, 3, 4, 4});
    default:
      throw InvalidArgument("Tomita grammar id must be in 1..7, got " + std::to_string(k));
  }
}

/// A forbidden factor, optionally anchored to the string start and/or end.
struct Factor {
  Word symbols;
  bool at_start = false;
  bool at_end = false;
};

/// Parses "⋉bbb", "aaa⋊", "aaaa" (also accepts '^' / '$' as anchors).
inline Factor parse_factor(std::string_view text, const Alphabet& alphabet) {
  Factor f;
  auto strip = [&](std::string_view marker, bool front) {
    if (front && text.substr(0, marker.size()) == marker) {
      text.remove_prefix(marker.size());
      return true;
    }
    if (!front && text.size() >= marker.size() && text.substr(text.size() - marker.size()) == marker) {
      text.remove_suffix(marker.size());
      return true;
    }
    return false;
  };
  f.at_start = strip("⋉", true) || strip("^", true);
  f.at_end = strip("⋊", false) || strip("$", false);
  f.symbols = alphabet.parse(text);
  if (f.symbols.empty()) throw InvalidArgument("forbidden factor must be nonempty");
  return f;
}

/// Strictly local language: rejects exactly the strings that contain one of
/// the factors at its anchored position.
inline Dfa build_sl(const std::vector<Factor>& factors, const Alphabet& alphabet) {
  std::size_t K = 0;
  for (const auto& f : factors) {
    if (f.symbols.empty()) throw InvalidArgument("forbidden factor must be nonempty");
    for (Symbol c : f.symbols)
      if (c >= alphabet.size()) throw InvalidArgument("forbidden factor uses a symbol outside the alphabet");
    K = std::max(K, f.symbols.size());
  }
  // Key: (dead, length read capped at K+1, last min(len, K) symbols).
  struct Key {
    bool dead = false;
    std::size_t len = 0;
    Word window;
    bool operator<(const Key& o) const {
      return std::tie(dead, len, window) < std::tie(o.dead, o.len, o.window);
    }
  };
  auto step = [&](const Key& k, Symbol c) {
    if (k.dead) return k;
    Word full = k.window;
    full.push_back(c);
    const std::size_t len = k.len + 1;
    for (const auto& f : factors) {
      const bool hit = f.at_start ? (!f.at_end && len == f.symbols.size() && full == f.symbols)
                                  : (!f.at_end && detail::ends_with(full, f.symbols));
      if (hit) return Key{true, 0, {}};
    }
    if (full.size() > K) full.erase(full.begin(), full.end() - static_cast<std::ptrdiff_t>(K));
    return Key{false, std::min(len, K + 1), std::move(full)};
  };
  auto accepting = [&](const Key& k) {
    if (k.dead) return false;
    for (const auto& f : factors) {
      if (!f.at_end) continue;
      if (f.at_start) {
        if (k.len == f.symbols.size() && k.window == f.symbols) return false;
      } else if (k.len >= f.symbols.size() && detail::ends_with(k.window, f.symbols)) {
        return false;
      }
    }
    return true;
  };
  return detail::explore(alphabet, Key{}, step, accepting);
}

/// Strictly piecewise language: rejects exactly the strings containing one
/// of the sequences as a (scattered) subsequence. Progress automaton whose
/// state is the longest matched prefix of each sequence.
inline Dfa build_sp(const std::vector<Word>& forbidden, const Alphabet& alphabet) {
  if (forbidden.empty()) throw InvalidArgument("need at least one forbidden subsequence");
  for (const auto& w : forbidden) {
    if (w.empty()) throw InvalidArgument("forbidden subsequence must be nonempty");
    for (Symbol c : w)
      if (c >= alphabet.size()) throw InvalidArgument("forbidden subsequence uses a symbol outside the alphabet");
  }
  using Key = std::vector<std::size_t>;
  auto complete = [&](const Key& k) {
    for (std::size_t j = 0; j < k.size(); ++j)
      if (k[j] == forbidden[j].size()) return true;
    return false;
  };
  auto step = [&](Key k, Symbol c) {
    if (complete(k)) return k;
    for (std::size_t j = 0; j < k.size(); ++j)
      if (forbidden[j][k[j]] == c) ++k[j];
    return k;
  };
  return detail::explore(alphabet, Key(forbidden.size(), 0), step, [&](const Key& k) { return !complete(k); });
}

/// The SL-4 grammar over {a,b,c,d}: forbidden ⋉bbb, aaaa, bbbb, aaa⋊.
inline Dfa build_sl4() {
  const auto ab = Alphabet::abcd();
  return build_sl({parse_factor("⋉bbb", ab), parse_factor("aaaa", ab), parse_factor("bbbb", ab),
                   parse_factor("aaa⋊", ab)},
                  ab);
}

/// The SP-8 grammar over {a,b,c,d}: forbidden subsequence abbaabba.
inline Dfa build_sp8() {
  const auto ab = Alphabet::abcd();
  return build_sp({ab.parse("abbaabba")}, ab);
}

/// Uniformly random transition table, each state accepting independently
/// with probability `accept_fraction`, trimmed to the reachable part.
inline Dfa build_random(State n_states, const Alphabet& alphabet, double accept_fraction, std::uint64_t seed) {
  if (n_states < 1) throw InvalidArgument("random DFA needs at least one state");
  if (!(accept_fraction >= 0.0 && accept_fraction <= 1.0))
    throw InvalidArgument("accept_fraction must lie in [0, 1]");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<State> pick(0, n_states - 1);
  std::bernoulli_distribution coin(accept_fraction);
  std::vector<State> delta(static_cast<std::size_t>(n_states) * alphabet.size());
  for (auto& t : delta) t = pick(rng);
  std::vector<bool> acc(n_states);
  for (State s = 0; s < n_states; ++s) acc[s] = coin(rng);
  return trim(Dfa(alphabet, n_states, 0, std::move(acc), std::move(delta)));
}

/// Grammar families addressable by name from the command line.
inline Dfa build_family(std::string_view family, int id) {
  if (family == "tomita") return build_tomita(id);
  if (family == "sl") {
    if (id != 4) throw InvalidArgument("only SL-4 is built in");
    return build_sl4();
  }
  if (family == "sp") {
    if (id != 8) throw InvalidArgument("only SP-8 is built in");
    return build_sp8();
  }
  throw InvalidArgument("unknown grammar family '" + std::string(family) + "'");
}

}  // namespace regent
