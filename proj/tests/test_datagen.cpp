#include <gtest/gtest.h>

#include <map>

#include "oracles.hpp"

using namespace regent;

namespace {

std::map<std::size_t, std::size_t> per_length(const LabeledDataset& ds) {
  std::map<std::size_t, std::size_t> out;
  for (const auto& it : ds.items) ++out[it.word.size()];
  return out;
}

bool distinct(const LabeledDataset& ds) {
  std::set<Word> s;
  for (const auto& it : ds.items) s.insert(it.word);
  return s.size() == ds.items.size();
}

}  // namespace

TEST(SampleSplit, ShortLengthsAreEnumerated) {
  const auto ds = sample_split(build_tomita(1), {5}, 1000, false, 3);
  EXPECT_EQ(ds.size(), 32u);
  EXPECT_EQ(ds.positives(), 1u);
  EXPECT_TRUE(distinct(ds));
}

TEST(SampleSplit, EmptyWordCarriesItsLabel) {
  const auto t1 = sample_split(build_tomita(1), {0}, 1, false, 1);
  ASSERT_EQ(t1.size(), 1u);
  EXPECT_TRUE(t1.items[0].word.empty());
  EXPECT_TRUE(t1.items[0].label);
  const Dfa none(Alphabet::binary(), 1, 0, {false}, {0, 0});
  const auto n = sample_split(none, {0}, 1, true, 1);
  ASSERT_EQ(n.size(), 1u);
  EXPECT_FALSE(n.items[0].label);
}

TEST(SampleSplit, SameSeedSameBytes) {
  const auto d = build_tomita(4);
  const auto a = write_dataset(sample_split(d, {3, 9, 20}, 200, true, 42));
  const auto b = write_dataset(sample_split(d, {20, 3, 9}, 200, true, 42));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, write_dataset(sample_split(d, {3, 9, 20}, 200, true, 43)));
}

TEST(SampleSplit, BalancePadsFromTheLargerClass) {
  const auto d = build_tomita(3);
  const auto ds = sample_split(d, {12, 20}, 300, true, 7);
  for (std::size_t L : {12u, 20u}) {
    std::size_t pos = 0, all = 0;
    for (const auto& it : ds.items)
      if (it.word.size() == L) {
        ++all;
        pos += it.label;
      }
    EXPECT_EQ(all, 300u);
    EXPECT_EQ(pos, 150u);
  }
  // Tomita-1 has one positive per length; the rest is padded with negatives
  const auto t1 = sample_split(build_tomita(1), {10}, 300, true, 7);
  EXPECT_EQ(t1.size(), 300u);
  EXPECT_EQ(t1.positives(), 1u);
  EXPECT_TRUE(distinct(t1));
  EXPECT_THROW(sample_split(d, {3}, 0, true, 1), InvalidArgument);
}

TEST(SampleSplit, LabelsComeFromTheAutomaton) {
  for (const auto& g : oracle::all_grammars()) {
    const auto ds = sample_split(g.dfa, {1, 6, 15}, 100, true, 9);
    for (const auto& it : ds.items) EXPECT_EQ(it.label, g.member(it.word)) << g.name;
    EXPECT_TRUE(label_mismatches(ds, g.dfa).empty());
  }
}

TEST(SampleSplit, ExclusionIsHonoured) {
  const auto d = build_tomita(5);
  const auto first = sample_split(d, {4}, 10, false, 1);
  std::set<Word> ex;
  for (const auto& it : first.items) ex.insert(it.word);
  const auto second = sample_split(d, {4}, 16, false, 1, ex);
  EXPECT_EQ(second.size(), 6u);
  for (const auto& it : second.items) EXPECT_EQ(ex.count(it.word), 0u);
}

TEST(SampleSplit, UniformOverLargeLengths) {
  // Words of length 20 drawn without enumeration: the first symbol should be
  // a fair coin and the label share should match m_p / 2^20.
  const auto d = build_tomita(4);
  const auto ds = sample_split(d, {20}, 4000, false, 11);
  ASSERT_EQ(ds.size(), 4000u);
  std::size_t ones = 0;
  for (const auto& it : ds.items) ones += it.word[0];
  EXPECT_NEAR(static_cast<double>(ones) / 4000.0, 0.5, 4.0 * std::sqrt(0.25 / 4000.0));
  const double rate = log_big(count_accepted(d, 20)) - 20.0 * std::log(2.0);
  const double p = std::exp(rate);
  EXPECT_NEAR(static_cast<double>(ds.positives()) / 4000.0, p, 4.0 * std::sqrt(p * (1 - p) / 4000.0));
}

TEST(SuffixCounts, DrawsAreUniformWithinAClass) {
  // Tomita-5 at length 6 has 32 accepted words; each should appear about
  // equally often.
  const auto d = build_tomita(5);
  const SuffixCounts acc(d, 6, true);
  EXPECT_DOUBLE_EQ(acc.class_size(6), 32.0);
  Rng rng(3);
  std::map<Word, int> hits;
  const int draws = 32000;
  for (int i = 0; i < draws; ++i) {
    const auto w = acc.draw(6, rng);
    ASSERT_TRUE(oracle::tomita(5, w));
    ++hits[w];
  }
  EXPECT_EQ(hits.size(), 32u);
  double chi2 = 0.0;
  for (const auto& [w, n] : hits) chi2 += (n - 1000.0) * (n - 1000.0) / 1000.0;
  EXPECT_LT(chi2, 70.0);  // 31 dof, far beyond the 0.999 quantile of ~61
}

TEST(Dataset, RoundTripWithEmptyWordAndMeta) {
  LabeledDataset ds;
  ds.alphabet = Alphabet::binary();
  ds.dfa_path = "dfa.txt";
  ds.meta["grammar"] = "tomita 3";
  ds.items = {{{}, true}, {{0, 1, 1}, false}, {{1}, true}};
  const auto text = write_dataset(ds);
  EXPECT_NE(text.find("1\tε\n"), std::string::npos);
  EXPECT_EQ(read_dataset(text), ds);

  LabeledDataset multi;
  multi.alphabet = Alphabet({"ab", "c"});
  multi.items = {{{0, 1, 0}, true}};
  const auto mt = write_dataset(multi);
  EXPECT_NE(mt.find("1\tab c ab\n"), std::string::npos);
  EXPECT_EQ(read_dataset(mt), multi);
}

TEST(Dataset, MalformedInputReportsTheLine) {
  auto line_of = [](const std::string& text) -> std::size_t {
    try {
      read_dataset(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  const std::string head = "dataset v1\nalphabet 0 1\ndfa -\n";
  EXPECT_EQ(line_of("dataset v2\n"), 1u);
  EXPECT_EQ(line_of("dataset v1\nalphabet\n"), 2u);
  EXPECT_EQ(line_of("dataset v1\nalphabet 0 1\n"), 3u);
  EXPECT_EQ(line_of(head + "1\t01\n2\t0\n"), 5u);
  EXPECT_EQ(line_of(head + "1\t012\n"), 4u);
  EXPECT_EQ(line_of(head + "1\t01\nmeta late value\n"), 5u);
  EXPECT_EQ(line_of(head + "meta k v\n0\tε\n"), 0u);
}

TEST(TomitaProtocol, LengthProfile) {
  const auto s = tomita_protocol(build_tomita(4), 1, "tomita4");
  const auto train = per_length(s.train), test = per_length(s.test);
  EXPECT_EQ(train.count(14), 0u);
  EXPECT_EQ(train.count(15), 0u);
  for (const auto& [L, n] : train) {
    EXPECT_TRUE(L <= 13 || L == 16 || L == 19 || L == 22) << L;
    EXPECT_LE(n, kTomitaTrainCap);
  }
  EXPECT_EQ(test.rbegin()->first, 28u);
  for (const auto& [L, n] : test) {
    EXPECT_EQ(L % 3, 1u);
    EXPECT_LE(n, kTomitaTestCap);
  }
  const auto seen = [&] {
    std::set<Word> w;
    for (const auto& it : s.train.items) w.insert(it.word);
    return w;
  }();
  for (const auto& it : s.test.items) EXPECT_EQ(seen.count(it.word), 0u);
  EXPECT_EQ(s.train.meta.at("split"), "train");
  EXPECT_EQ(s.test.meta.at("grammar"), "tomita4");
}

TEST(TomitaProtocol, Deterministic) {
  const auto d = build_tomita(6);
  const auto a = tomita_protocol(d, 5), b = tomita_protocol(d, 5);
  EXPECT_EQ(write_dataset(a.train), write_dataset(b.train));
  EXPECT_EQ(write_dataset(a.test), write_dataset(b.test));
}

TEST(SlSpProtocol, SizesAndLengthRanges) {
  const auto s = slsp_protocol(build_sp8(), 2, "sp8", kSlSpDeskTrainSize);
  EXPECT_EQ(s.train.size(), kSlSpDeskTrainSize);
  EXPECT_EQ(s.test1.size(), kSlSpTestSize);
  EXPECT_EQ(s.test2.size(), kSlSpTestSize);
  for (const auto& it : s.train.items) EXPECT_TRUE(it.word.size() >= 1 && it.word.size() <= 25);
  for (const auto& it : s.test1.items) EXPECT_TRUE(it.word.size() >= 1 && it.word.size() <= 25);
  for (const auto& it : s.test2.items) EXPECT_TRUE(it.word.size() >= 26 && it.word.size() <= 50);
  std::set<Word> seen;
  for (const auto& it : s.train.items) seen.insert(it.word);
  for (const auto& it : s.test1.items) EXPECT_EQ(seen.count(it.word), 0u);
  EXPECT_TRUE(distinct(s.train));
  EXPECT_TRUE(distinct(s.test2));
}

TEST(SparseProtocol, PoolSplitAndValidation) {
  const auto s = sparse_protocol(build_sl4(), 0.125, 3);
  EXPECT_EQ(s.train.size() + s.test.size(), 2500u);
  EXPECT_EQ(s.test.size(), 500u);
  std::set<Word> all;
  for (const auto* ds : {&s.train, &s.test})
    for (const auto& it : ds->items) {
      EXPECT_TRUE(all.insert(it.word).second);
      EXPECT_EQ(it.label, oracle::sl4(it.word));
      EXPECT_TRUE(it.word.size() >= 1 && it.word.size() <= kSparseMaxLength);
    }
  EXPECT_GE(s.train.positives() + s.test.positives(), 1250u);
  EXPECT_THROW(sparse_protocol(build_sl4(), 0.3, 1), InvalidArgument);
}
