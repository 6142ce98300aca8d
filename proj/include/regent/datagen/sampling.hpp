#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "regent/automata/dfa.hpp"
#include "regent/datagen/dataset.hpp"

namespace regent {

using Rng = std::mt19937_64;

// Below this many candidate words a length (or a label class) is enumerated
// and shuffled instead of rejection-sampled.
inline constexpr double kEnumerationLimit = 65536.0;

/// Counts of length-r suffixes leading from each state to a given label,
/// used to draw words uniformly from one label class of Σ^L.
class SuffixCounts {
 public:
  SuffixCounts(const Dfa& dfa, std::size_t max_len, bool label) : dfa_(&dfa), counts_(max_len + 1) {
    const auto n = dfa.size();
    counts_[0].resize(n);
    for (State s = 0; s < n; ++s) counts_[0][s] = dfa.is_accepting(s) == label ? 1.0 : 0.0;
    for (std::size_t r = 1; r <= max_len; ++r) {
      counts_[r].assign(n, 0.0);
      for (State s = 0; s < n; ++s)
        for (Symbol i = 0; i < dfa.alphabet_size(); ++i) counts_[r][s] += counts_[r - 1][dfa.next(s, i)];
    }
  }

  double class_size(std::size_t L) const { return counts_.at(L)[dfa_->start()]; }

  /// One word of length L drawn uniformly from the label class.
  Word draw(std::size_t L, Rng& rng) const {
    Word w;
    w.reserve(L);
    State s = dfa_->start();
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t r = L; r > 0; --r) {
      double x = u(rng) * counts_[r][s];
      Symbol pick = 0;
      for (Symbol i = 0; i < dfa_->alphabet_size(); ++i) {
        const double c = counts_[r - 1][dfa_->next(s, i)];
        if (c <= 0.0) continue;
        pick = i;
        if (x < c) break;
        x -= c;
      }
      w.push_back(pick);
      s = dfa_->next(s, pick);
    }
    return w;
  }

  /// Every word of length L in the label class, lexicographic order.
  std::vector<Word> enumerate(std::size_t L) const {
    std::vector<Word> out;
    Word w;
    enumerate_from(dfa_->start(), L, w, out);
    return out;
  }

 private:
  void enumerate_from(State s, std::size_t r, Word& w, std::vector<Word>& out) const {
    if (r == 0) {
      out.push_back(w);
      return;
    }
    for (Symbol i = 0; i < dfa_->alphabet_size(); ++i) {
      const State t = dfa_->next(s, i);
      if (counts_[r - 1][t] <= 0.0) continue;
      w.push_back(i);
      enumerate_from(t, r - 1, w, out);
      w.pop_back();
    }
  }

  const Dfa* dfa_;
  std::vector<std::vector<double>> counts_;
};

inline Word uniform_word(std::size_t I, std::size_t L, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, I - 1);
  Word w(L);
  for (auto& c : w) c = static_cast<Symbol>(pick(rng));
  return w;
}

inline std::vector<Word> all_words(std::size_t I, std::size_t L) {
  std::vector<Word> out;
  Word w(L, 0);
  for (;;) {
    out.push_back(w);
    std::size_t pos = L;
    bool done = true;
    while (pos > 0) {
      --pos;
      if (++w[pos] < I) {
        done = false;
        break;
      }
      w[pos] = 0;
    }
    if (done) return out;
  }
}

namespace detail {

template <typename Draw>
std::vector<Word> distinct_draws(std::size_t k, Draw draw, const std::set<Word>& exclude) {
  std::set<Word> seen;
  std::vector<Word> out;
  // Gives up (returning fewer words) when duplicates dominate.
  const std::size_t max_attempts = std::max<std::size_t>(100000, 100 * k);
  for (std::size_t attempt = 0; out.size() < k && attempt < max_attempts; ++attempt) {
    Word w = draw();
    if (exclude.count(w) || !seen.insert(w).second) continue;
    out.push_back(std::move(w));
  }
  return out;
}

inline std::vector<Word> shuffled_prefix(std::vector<Word> pool, std::size_t k, Rng& rng, const std::set<Word>& exclude) {
  if (!exclude.empty())
    pool.erase(std::remove_if(pool.begin(), pool.end(), [&](const Word& w) { return exclude.count(w) != 0; }),
               pool.end());
  std::shuffle(pool.begin(), pool.end(), rng);
  if (pool.size() > k) pool.resize(k);
  return pool;
}

}  // namespace detail

/// k distinct words drawn uniformly without replacement from Σ^L \ exclude
/// (fewer if not enough exist).
inline std::vector<Word> sample_uniform(std::size_t I, std::size_t L, std::size_t k, Rng& rng,
                                        const std::set<Word>& exclude = {}) {
  const double space = std::pow(static_cast<double>(I), static_cast<double>(L));
  if (space <= kEnumerationLimit) return detail::shuffled_prefix(all_words(I, L), k, rng, exclude);
  return detail::distinct_draws(k, [&] { return uniform_word(I, L, rng); }, exclude);
}

/// k distinct words drawn uniformly from the label class at length L.
inline std::vector<Word> sample_label_class(const SuffixCounts& counts, std::size_t L, std::size_t k, Rng& rng,
                                            const std::set<Word>& exclude = {}) {
  const double size = counts.class_size(L);
  if (size <= kEnumerationLimit) return detail::shuffled_prefix(counts.enumerate(L), k, rng, exclude);
  return detail::distinct_draws(k, [&] { return counts.draw(L, rng); }, exclude);
}

/// Per-length split: min(cap, I^L) distinct words for every L. With
/// `balance`, up to cap/2 per label, padding from the other label when one
/// class runs out. Deterministic in `seed`; items in canonical order.
inline LabeledDataset sample_split(const Dfa& dfa, std::vector<std::size_t> lengths, std::size_t per_length_cap,
                                   bool balance, std::uint64_t seed, const std::set<Word>& exclude = {}) {
  if (per_length_cap < 1) throw InvalidArgument("per-length cap must be >= 1");
  std::sort(lengths.begin(), lengths.end());
  lengths.erase(std::unique(lengths.begin(), lengths.end()), lengths.end());
  const auto I = dfa.alphabet_size();
  Rng rng(seed);
  LabeledDataset ds;
  ds.alphabet = dfa.alphabet();
  const std::size_t max_len = lengths.empty() ? 0 : lengths.back();
  const SuffixCounts pos(dfa, max_len, true), neg(dfa, max_len, false);
  std::ostringstream profile;
  for (std::size_t L : lengths) {
    profile << (profile.tellp() > 0 ? "," : "") << L;
    std::vector<Word> words;
    if (!balance) {
      words = sample_uniform(I, L, per_length_cap, rng, exclude);
    } else {
      const double mp = pos.class_size(L), mn = neg.class_size(L);
      const auto avail = [](double m) { return m > 1e15 ? std::size_t{1} << 50 : static_cast<std::size_t>(m); };
      const std::size_t ap = avail(mp), an = avail(mn);
      std::size_t take_p = std::min(ap, per_length_cap / 2);
      std::size_t take_n = std::min(an, per_length_cap - per_length_cap / 2);
      const std::size_t spare = per_length_cap - take_p - take_n;
      const std::size_t extra_p = std::min(ap - take_p, spare);
      take_p += extra_p;
      take_n += std::min(an - take_n, spare - extra_p);
      words = sample_label_class(pos, L, take_p, rng, exclude);
      auto negs = sample_label_class(neg, L, take_n, rng, exclude);
      words.insert(words.end(), negs.begin(), negs.end());
    }
    for (auto& w : words) ds.items.push_back({std::move(w), false});
  }
  for (auto& it : ds.items) it.label = accepts(dfa, it.word);
  ds.sort_canonical();
  ds.meta["lengths"] = profile.str();
  ds.meta["per_length_cap"] = std::to_string(per_length_cap);
  ds.meta["balanced"] = balance ? "1" : "0";
  ds.meta["seed"] = std::to_string(seed);
  if (!ds.items.empty()) {
    std::ostringstream ratio;
    ratio << static_cast<double>(ds.positives()) / static_cast<double>(ds.items.size());
    ds.meta["positive_ratio"] = ratio.str();
  }
  return ds;
}

}  // namespace regent
