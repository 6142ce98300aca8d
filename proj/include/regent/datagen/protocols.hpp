#pragma once

#include <array>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "regent/datagen/sampling.hpp"

namespace regent {

struct TomitaSplits {
  LabeledDataset train, test;
};

struct SlSpSplits {
  LabeledDataset train, test1, test2;
};

struct SparseSplits {
  LabeledDataset train, test;
};

inline std::vector<std::size_t> tomita_train_lengths() {
  std::vector<std::size_t> out;
  for (std::size_t L = 0; L <= 13; ++L) out.push_back(L);
  out.insert(out.end(), {16, 19, 22});
  return out;
}

inline std::vector<std::size_t> tomita_test_lengths() {
  std::vector<std::size_t> out;
  for (std::size_t L = 1; L <= 28; L += 3) out.push_back(L);
  return out;
}

inline constexpr std::size_t kTomitaTrainCap = 300;
inline constexpr std::size_t kTomitaTestCap = 1000;

namespace detail {

// Independent, reproducible stream per split.
inline std::uint64_t split_seed(std::uint64_t seed, std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), tag};
  std::array<std::uint32_t, 2> words{};
  seq.generate(words.begin(), words.end());
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

inline std::set<Word> word_set(const LabeledDataset& ds) {
  std::set<Word> out;
  for (const auto& it : ds.items) out.insert(it.word);
  return out;
}

inline void stamp(LabeledDataset& ds, const std::string& grammar, const std::string& split, std::uint64_t seed) {
  ds.meta["grammar"] = grammar;
  ds.meta["split"] = split;
  ds.meta["seed"] = std::to_string(seed);
}

}  // namespace detail

/// Train: balanced, lengths 0..13, 16, 19, 22, up to `train_cap` per length.
/// Test: uniform, lengths 1, 4, ..., 28, up to 1000 per length, minus any
/// word already in train.
inline TomitaSplits tomita_protocol(const Dfa& dfa, std::uint64_t seed, const std::string& grammar = "-",
                                    std::size_t train_cap = kTomitaTrainCap) {
  TomitaSplits out;
  out.train = sample_split(dfa, tomita_train_lengths(), train_cap, true, detail::split_seed(seed, 1));
  out.test = sample_split(dfa, tomita_test_lengths(), kTomitaTestCap, false, detail::split_seed(seed, 2),
                          detail::word_set(out.train));
  detail::stamp(out.train, grammar, "train", seed);
  detail::stamp(out.test, grammar, "test", seed);
  return out;
}

namespace detail {

// `count` distinct words, length uniform in [lo, hi] per draw, labelled by the DFA.
inline LabeledDataset random_length_split(const Dfa& dfa, std::size_t count, std::size_t lo, std::size_t hi,
                                          std::uint64_t seed, const std::set<Word>& exclude) {
  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> len(lo, hi);
  const auto I = dfa.alphabet_size();
  std::set<Word> seen;
  LabeledDataset ds;
  ds.alphabet = dfa.alphabet();
  while (ds.items.size() < count) {
    Word w = uniform_word(I, len(rng), rng);
    if (exclude.count(w) || !seen.insert(w).second) continue;
    const bool label = accepts(dfa, w);
    ds.items.push_back({std::move(w), label});
  }
  ds.sort_canonical();
  ds.meta["lengths"] = std::to_string(lo) + "-" + std::to_string(hi);
  return ds;
}

}  // namespace detail

inline constexpr std::size_t kSlSpTrainSize = 100000;
inline constexpr std::size_t kSlSpDeskTrainSize = 10000;
inline constexpr std::size_t kSlSpTestSize = 2000;

/// Train: `train_size` strings with lengths in [1, 25]. T-1: 2000 strings in
/// [1, 25]; T-2: 2000 strings in [26, 50]; both disjoint from train.
inline SlSpSplits slsp_protocol(const Dfa& dfa, std::uint64_t seed, const std::string& grammar = "-",
                                std::size_t train_size = kSlSpTrainSize) {
  SlSpSplits out;
  out.train = detail::random_length_split(dfa, train_size, 1, 25, detail::split_seed(seed, 1), {});
  const auto seen = detail::word_set(out.train);
  out.test1 = detail::random_length_split(dfa, kSlSpTestSize, 1, 25, detail::split_seed(seed, 2), seen);
  out.test2 = detail::random_length_split(dfa, kSlSpTestSize, 26, 50, detail::split_seed(seed, 3), seen);
  detail::stamp(out.train, grammar, "train", seed);
  detail::stamp(out.test1, grammar, "test1", seed);
  detail::stamp(out.test2, grammar, "test2", seed);
  return out;
}

inline constexpr std::size_t kSparseFullPool = 20000;
inline constexpr std::size_t kSparseMaxLength = 30;

/// STAMINA-style surrogate. Pool of round(20000 * sparsity) distinct words of
/// length 1..30: half are accepted words reached by DFA-guided random walks
/// (uniform among accepted words of a random length), half are uniform random
/// words. The shuffled pool is split 8:2 into train and test.
inline SparseSplits sparse_protocol(const Dfa& dfa, double sparsity, std::uint64_t seed, const std::string& grammar = "-") {
  if (!(sparsity == 0.125 || sparsity == 0.25 || sparsity == 0.5 || sparsity == 1.0))
    throw InvalidArgument("sparsity must be one of 0.125, 0.25, 0.5, 1.0");
  const auto pool_size = static_cast<std::size_t>(std::llround(static_cast<double>(kSparseFullPool) * sparsity));
  const auto I = dfa.alphabet_size();
  Rng rng(detail::split_seed(seed, 4));
  std::uniform_int_distribution<std::size_t> len(1, kSparseMaxLength);
  const SuffixCounts accepted(dfa, kSparseMaxLength, true);
  std::set<Word> seen;
  std::vector<LabeledItem> pool;
  bool any_accepted = false;
  for (std::size_t L = 1; L <= kSparseMaxLength; ++L) any_accepted = any_accepted || accepted.class_size(L) > 0.0;
  const std::size_t walks = any_accepted ? pool_size / 2 : 0;
  std::size_t attempts = 0;
  while (pool.size() < walks && attempts++ < 100 * pool_size) {
    const std::size_t L = len(rng);
    if (accepted.class_size(L) <= 0.0) continue;
    Word w = accepted.draw(L, rng);
    if (!seen.insert(w).second) continue;
    pool.push_back({std::move(w), true});
  }
  while (pool.size() < pool_size) {
    Word w = uniform_word(I, len(rng), rng);
    if (!seen.insert(w).second) continue;
    pool.push_back({std::move(w), false});
  }
  for (auto& it : pool) it.label = accepts(dfa, it.word);
  std::shuffle(pool.begin(), pool.end(), rng);
  const std::size_t test_size = static_cast<std::size_t>(std::llround(static_cast<double>(pool_size) / 5.0));
  SparseSplits out;
  out.train.alphabet = out.test.alphabet = dfa.alphabet();
  out.test.items.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(test_size));
  out.train.items.assign(pool.begin() + static_cast<std::ptrdiff_t>(test_size), pool.end());
  out.train.sort_canonical();
  out.test.sort_canonical();
  for (auto* ds : {&out.train, &out.test}) {
    ds->meta["sparsity"] = std::to_string(sparsity);
    ds->meta["pool"] = std::to_string(pool_size);
  }
  detail::stamp(out.train, grammar, "train", seed);
  detail::stamp(out.test, grammar, "test", seed);
  return out;
}

}  // namespace regent
