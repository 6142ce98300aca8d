#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "regent/automata/dfa.hpp"

namespace regent {

using BigInt = boost::multiprecision::cpp_int;

/// Natural log of a nonnegative big integer; -inf for zero.
inline double log_big(const BigInt& x) {
  if (x.is_zero()) return -std::numeric_limits<double>::infinity();
  const auto bits = boost::multiprecision::msb(x);
  if (bits < 1000) return std::log(x.convert_to<double>());
  const auto shift = bits - 60;
  const BigInt top = x >> shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::numbers::ln2;
}

inline BigInt big_pow(std::size_t base, std::size_t exp) {
  return boost::multiprecision::pow(BigInt(base), static_cast<unsigned>(exp));
}

/// m_p(N) for N = 0..n_max: exact accepted-string counts obtained by pushing
/// the start indicator through T one length at a time.
inline std::vector<BigInt> count_curve(const Dfa& dfa, std::size_t n_max) {
  const auto I = dfa.alphabet_size();
  std::vector<BigInt> paths(dfa.size()), next(dfa.size());
  paths[dfa.start()] = 1;
  std::vector<BigInt> out;
  out.reserve(n_max + 1);
  for (std::size_t N = 0;; ++N) {
    BigInt acc = 0;
    for (State s = 0; s < dfa.size(); ++s)
      if (dfa.is_accepting(s)) acc += paths[s];
    out.push_back(std::move(acc));
    if (N == n_max) break;
    for (auto& v : next) v = 0;
    for (State s = 0; s < dfa.size(); ++s) {
      if (paths[s].is_zero()) continue;
      for (Symbol i = 0; i < I; ++i) next[dfa.next(s, i)] += paths[s];
    }
    paths.swap(next);
  }
  return out;
}

inline BigInt count_accepted(const Dfa& dfa, std::size_t N) { return count_curve(dfa, N).back(); }

/// Enumerates every length-N word and runs the automaton on it. Refuses
/// N > 20 or more than 2^26 words.
inline std::uint64_t count_accepted_bruteforce(const Dfa& dfa, std::size_t N) {
  const auto I = dfa.alphabet_size();
  if (N > 20) throw InvalidArgument("brute-force counting refuses N > 20");
  double words = std::pow(static_cast<double>(I), static_cast<double>(N));
  if (words > static_cast<double>(1u << 26)) throw InvalidArgument("brute-force counting refuses more than 2^26 words");
  Word w(N, 0);
  std::uint64_t hits = 0;
  for (;;) {
    if (accepts(dfa, w)) ++hits;
    std::size_t pos = N;
    while (pos > 0) {
      --pos;
      if (++w[pos] < I) break;
      w[pos] = 0;
      if (pos == 0) return hits;
    }
    if (N == 0) return hits;
  }
}

/// ln E[F_N] where E[F_N] = 2 m_p (I^N - m_p) / I^N is the expected number of
/// label changes between lexicographic neighbours. -inf when degenerate.
inline double log_expected_flips(const BigInt& m_p, std::size_t N, std::size_t I) {
  const BigInt total = big_pow(I, N);
  if (m_p < 0 || m_p > total) throw InvalidArgument("m_p must lie in [0, I^N]");
  const BigInt m_n = total - m_p;
  if (m_p.is_zero() || m_n.is_zero()) return -std::numeric_limits<double>::infinity();
  return std::numbers::ln2 + log_big(m_p) + log_big(m_n) - static_cast<double>(N) * std::log(static_cast<double>(I));
}

inline double expected_flips(const BigInt& m_p, std::size_t N, std::size_t I) {
  return std::exp(log_expected_flips(m_p, N, I));
}

/// H^N for a single length, log base I; nullopt where m_p is 0 or I^N.
inline std::optional<double> entropy_at(const BigInt& m_p, std::size_t N, std::size_t I) {
  if (N == 0) return std::nullopt;
  const double lf = log_expected_flips(m_p, N, I);
  if (std::isinf(lf)) return std::nullopt;
  return lf / (static_cast<double>(N) * std::log(static_cast<double>(I)));
}

/// k-class generalisation: (1/N) log_I (I^N - sum m_i^2 / I^N). nullopt when
/// every string falls into one class.
inline std::optional<double> entropy_kclass(std::span<const BigInt> counts, std::size_t N, std::size_t I) {
  if (counts.size() < 2) throw InvalidArgument("k-class entropy needs at least two classes");
  if (N == 0) throw InvalidArgument("k-class entropy needs N >= 1");
  const BigInt total = big_pow(I, N);
  BigInt sum = 0, squares = 0;
  for (const auto& m : counts) {
    if (m < 0) throw InvalidArgument("class counts must be nonnegative");
    sum += m;
    squares += m * m;
  }
  if (sum != total) throw InvalidArgument("class counts must sum to I^N");
  // I^N - squares / I^N = (I^2N - squares) / I^N, kept exact in the numerator.
  const BigInt numer = total * total - squares;
  if (numer.is_zero()) return std::nullopt;
  const double logI = std::log(static_cast<double>(I));
  return (log_big(numer) - static_cast<double>(N) * logI) / (static_cast<double>(N) * logI);
}

}  // namespace regent
