#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"

using namespace regent;

namespace {

BigInt binomial(unsigned n, unsigned k) {
  BigInt r = 1;
  for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

GrowthClass spectral_class(const Dfa& d) { return classify_spectral(d).classification.cls; }

}  // namespace

TEST(Counting, MatchesEnumerationOfTheDefinitions) {
  for (const auto& g : oracle::all_grammars()) {
    const std::size_t n_max = g.dfa.alphabet_size() == 2 ? 12 : 6;
    const auto curve = count_curve(g.dfa, n_max);
    ASSERT_EQ(curve.size(), n_max + 1);
    for (std::size_t N = 0; N <= n_max; ++N) {
      EXPECT_EQ(curve[N], BigInt(oracle::count_members(g.member, g.dfa.alphabet_size(), N))) << g.name << " N=" << N;
      EXPECT_EQ(count_accepted(g.dfa, N), BigInt(count_accepted_bruteforce(g.dfa, N))) << g.name << " N=" << N;
    }
  }
}

TEST(Counting, BruteForceRefusesLargeInputs) {
  EXPECT_THROW(count_accepted_bruteforce(build_tomita(1), 21), InvalidArgument);
  EXPECT_THROW(count_accepted_bruteforce(build_sl4(), 14), InvalidArgument);
}

TEST(Counting, ClosedFormsAtLargeLengths) {
  const auto t1 = count_curve(build_tomita(1), 200);
  const auto t2 = count_curve(build_tomita(2), 200);
  const auto t5 = count_curve(build_tomita(5), 200);
  const auto t6 = count_curve(build_tomita(6), 120);
  const auto t4 = count_curve(build_tomita(4), 150);
  for (unsigned N = 1; N <= 200; ++N) {
    EXPECT_EQ(t1[N], 1);
    EXPECT_EQ(t2[N], N % 2 ? 0 : 1);
    EXPECT_EQ(t5[N], N % 2 ? BigInt(0) : big_pow(2, N - 1));
  }
  for (unsigned N = 0; N <= 120; ++N) {
    BigInt want = 0;  // n1 ones, N - n1 zeros, (N - 2 n1) divisible by 3
    for (unsigned n1 = 0; n1 <= N; ++n1)
      if ((static_cast<int>(N) - 2 * static_cast<int>(n1)) % 3 == 0) want += binomial(N, n1);
    EXPECT_EQ(t6[N], want) << N;
  }
  std::vector<BigInt> trib{1, 2, 4};
  while (trib.size() <= 150) trib.push_back(trib[trib.size() - 1] + trib[trib.size() - 2] + trib[trib.size() - 3]);
  for (unsigned N = 0; N <= 150; ++N) EXPECT_EQ(t4[N], trib[N]) << N;
}

TEST(Counting, StaysWithinTotalAndAbsorbingMonotone) {
  for (const auto& g : oracle::all_grammars()) {
    const auto m = minimize(g.dfa);
    const auto curve = count_curve(m, 40);
    const std::size_t I = m.alphabet_size();
    const bool accepting_sink = [&] {
      for (State s = 0; s < m.size(); ++s) {
        bool loops = true;
        for (Symbol i = 0; i < I; ++i) loops = loops && m.next(s, i) == s;
        if (loops && m.is_accepting(s)) return true;
      }
      return false;
    }();
    for (std::size_t N = 0; N + 1 < curve.size(); ++N) {
      EXPECT_LE(curve[N], big_pow(I, N));
      if (accepting_sink) {
        EXPECT_GE(curve[N + 1], curve[N]);
        EXPECT_LE(curve[N + 1], curve[N] * I);
      }
    }
  }
}

TEST(Entropy, SingleLengthExamples) {
  for (std::size_t N : {8u, 16u, 32u}) {
    const auto h5 = entropy_at(big_pow(2, N - 1), N, 2);
    ASSERT_TRUE(h5);
    EXPECT_NEAR(*h5, 1.0 - 1.0 / static_cast<double>(N), 1e-12);
    const auto h1 = entropy_at(BigInt(1), N, 2);
    ASSERT_TRUE(h1);
    const double n = static_cast<double>(N);
    EXPECT_NEAR(*h1, std::log2(2.0 * (std::pow(2.0, n) - 1.0) / std::pow(2.0, n)) / n, 1e-12);
  }
  EXPECT_FALSE(entropy_at(BigInt(0), 10, 2));
  EXPECT_FALSE(entropy_at(big_pow(2, 10), 10, 2));
  EXPECT_FALSE(entropy_at(BigInt(1), 0, 2));
}

TEST(Entropy, ExpectedFlipsMatchBruteForceOnTomita3) {
  const auto d = build_tomita(3);
  for (std::size_t N = 1; N <= 12; ++N) {
    // label changes along a uniformly random ordering of all length-N words
    const auto mp = static_cast<double>(oracle::count_members([](const Word& w) { return oracle::tomita(3, w); }, 2, N));
    const double total = std::pow(2.0, static_cast<double>(N)), mn = total - mp;
    EXPECT_NEAR(expected_flips(count_accepted(d, N), N, 2), 2.0 * mp * mn / total, 1e-9 * total);
  }
}

TEST(Entropy, KClassGeneralisesTheBinaryForm) {
  for (std::size_t N : {5u, 12u, 40u}) {
    const BigInt total = big_pow(3, N);
    const BigInt mp = total / 3 + 1;
    const std::vector<BigInt> two{mp, total - mp};
    const auto a = entropy_kclass(two, N, 3), b = entropy_at(mp, N, 3);
    ASSERT_TRUE(a && b);
    EXPECT_NEAR(*a, *b, 1e-12);
  }
  const std::vector<BigInt> one{big_pow(2, 6)};
  EXPECT_THROW(entropy_kclass(one, 6, 2), InvalidArgument);
  const std::vector<BigInt> lopsided{big_pow(2, 6), BigInt(0)};
  EXPECT_FALSE(entropy_kclass(lopsided, 6, 2));
  const std::vector<BigInt> three{BigInt(3), BigInt(3), BigInt(2)};
  const double want = std::log2(8.0 - (9.0 + 9.0 + 4.0) / 8.0) / 3.0;
  EXPECT_NEAR(*entropy_kclass(three, 3, 2), want, 1e-12);
}

TEST(Entropy, CurveHasUndefinedLengths) {
  const auto rep = entropy_report(build_tomita(2), 20);
  ASSERT_EQ(rep.h.size(), 21u);
  for (std::size_t N = 1; N <= 20; ++N) EXPECT_EQ(rep.h[N].has_value(), N % 2 == 0) << N;
  EXPECT_THROW(entropy_report(build_tomita(2), 1), InvalidArgument);
}

TEST(Eigen, ModuliAgreeWithReferenceSolver) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int n : {1, 2, 3, 5, 8, 13, 30}) {
    for (int rep = 0; rep < 5; ++rep) {
      Eigen::MatrixXd m(n, n);
      for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
      const auto got = eigen_moduli(m), want = oracle::eigen_moduli(m);
      ASSERT_EQ(got.size(), want.size());
      for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-8) << "n=" << n;
    }
  }
}

TEST(Eigen, TransitionMatricesOfRandomAutomata) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const auto d = minimize(build_random(20, Alphabet::generated(2 + seed % 3), 0.5, seed));
    const auto tm = transition_matrices(d);
    const auto got = eigen_moduli(tm.summed);
    const auto want = oracle::eigen_moduli(tm.summed.cast<double>());
    ASSERT_EQ(got.size(), want.size());
    EXPECT_NEAR(got.front(), static_cast<double>(d.alphabet_size()), 1e-9);
    // reference QR loses accuracy on defective eigenvalues; compare loosely
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], want[i], 1e-3) << seed;
  }
}

TEST(Eigen, TomitaSpectra) {
  for (int k = 1; k <= 7; ++k) {
    const auto mod = eigen_moduli(transition_matrices(minimize(build_tomita(k))).summed);
    EXPECT_NEAR(mod.front(), 2.0, 1e-8) << k;
  }
  const auto t6 = eigen_moduli(transition_matrices(minimize(build_tomita(6))).summed);
  ASSERT_EQ(t6.size(), 3u);
  EXPECT_NEAR(t6[1], 1.0, 1e-8);
  EXPECT_NEAR(t6[2], 1.0, 1e-8);
  // Tomita-7 has a four-fold eigenvalue 1 from a chain of self-loops
  const auto t7 = eigen_moduli(transition_matrices(minimize(build_tomita(7))).summed);
  ASSERT_EQ(t7.size(), 5u);
  for (std::size_t i = 1; i < 5; ++i) EXPECT_NEAR(t7[i], 1.0, 1e-10);
}

TEST(Classify, SpectralTrichotomyOnTomita) {
  for (int k : {1, 2, 7}) EXPECT_EQ(spectral_class(build_tomita(k)), GrowthClass::Polynomial) << k;
  for (int k : {3, 4}) {
    const auto c = classify_spectral(build_tomita(k)).classification;
    EXPECT_EQ(c.cls, GrowthClass::Exponential) << k;
    ASSERT_TRUE(c.entropy);
    EXPECT_GT(*c.entropy, 0.0);
    EXPECT_LT(*c.entropy, 1.0);
  }
  for (int k : {5, 6}) {
    const auto c = classify_spectral(build_tomita(k)).classification;
    EXPECT_EQ(c.cls, GrowthClass::Proportional) << k;
    EXPECT_EQ(c.entropy, 1.0);
  }
  // no-000 strings grow like the tribonacci constant
  EXPECT_NEAR(*classify_spectral(build_tomita(4)).classification.entropy, std::log2(1.8392867552141612), 1e-9);
}

TEST(Classify, EmpiricalAgreesWithSpectral) {
  for (int k = 1; k <= 7; ++k) {
    const auto d = build_tomita(k);
    const auto emp = classify_empirical(count_curve_of(d, 48), 24, 48);
    EXPECT_EQ(emp.cls, spectral_class(d)) << k;
  }
  const auto e4 = classify_empirical(count_curve_of(build_tomita(4), 48), 24, 48);
  EXPECT_NEAR(*e4.entropy, *classify_spectral(build_tomita(4)).classification.entropy, 0.02);
}

TEST(Classify, ComplementHasTheSameClass) {
  for (int k = 1; k <= 7; ++k) {
    const auto d = minimize(build_tomita(k));
    std::vector<bool> flipped(d.size());
    for (State s = 0; s < d.size(); ++s) flipped[s] = !d.is_accepting(s);
    const Dfa c(d.alphabet(), d.size(), d.start(), flipped, d.table());
    EXPECT_EQ(spectral_class(c), spectral_class(d)) << k;
    EXPECT_EQ(classify_empirical(count_curve_of(c, 48), 24, 48).cls,
              classify_empirical(count_curve_of(d, 48), 24, 48).cls)
        << k;
  }
}

TEST(Classify, DegenerateAndOscillatingCases) {
  const Dfa all(Alphabet::binary(), 1, 0, {true}, {0, 0});
  EXPECT_EQ(spectral_class(all), GrowthClass::Degenerate);
  const auto e = classify_empirical(count_curve_of(all, 48), 24, 48);
  EXPECT_EQ(e.cls, GrowthClass::Degenerate);
  EXPECT_FALSE(e.oscillating);
  const auto osc = classify_empirical(count_curve_of(build_tomita(2), 48), 25, 48);
  EXPECT_EQ(osc.cls, GrowthClass::Degenerate);
  EXPECT_TRUE(osc.oscillating);
  EXPECT_THROW(classify_empirical(count_curve_of(all, 48), 4, 48), InvalidArgument);
  EXPECT_THROW(classify_empirical(count_curve_of(all, 30), 24, 48), InvalidArgument);
}

TEST(Classify, LargerAlphabetsNeedTheGeneralisedFlag) {
  EXPECT_THROW(classify_spectral(build_sl4()), UnsupportedAlphabet);
  const auto sp = classify_spectral(build_sp8(), true);
  EXPECT_NEAR(sp.moduli.front(), 4.0, 1e-9);
  EXPECT_EQ(sp.absorbing, 1u);
  const auto rep = entropy_report(build_sl4(), 20);
  EXPECT_FALSE(rep.spectral);
}

TEST(Rings, BitsFollowLexicographicOrder) {
  const auto d = build_tomita(3);
  const auto rings = ring_data(d, 10);
  ASSERT_EQ(rings.size(), 11u);
  for (std::size_t N = 0; N <= 10; ++N) {
    ASSERT_EQ(rings[N].size(), std::size_t{1} << N);
    std::size_t idx = 0;
    oracle::for_each_word(2, N, [&](const Word& w) {
      EXPECT_EQ(rings[N][idx++] == '1', oracle::tomita(3, w));
    });
  }
  EXPECT_THROW(ring_data(d, 17), InvalidArgument);
  EXPECT_THROW(ring_data(build_sl4(), 13), InvalidArgument);
  EXPECT_EQ(rings_csv(ring_data(build_tomita(1), 2)), "N,bits\n0,1\n1,01\n2,0001\n");
}
