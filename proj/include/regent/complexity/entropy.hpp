#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "regent/automata/dfa.hpp"
#include "regent/complexity/counting.hpp"
#include "regent/complexity/eigen.hpp"

namespace regent {

enum class GrowthClass { Polynomial, Exponential, Proportional, Degenerate };

inline std::string to_string(GrowthClass c) {
  switch (c) {
    case GrowthClass::Polynomial: return "polynomial";
    case GrowthClass::Exponential: return "exponential";
    case GrowthClass::Proportional: return "proportional";
    case GrowthClass::Degenerate: return "degenerate";
  }
  return "?";
}

struct Classification {
  GrowthClass cls = GrowthClass::Degenerate;
  // Entropy value implied by the class (0, log_I b, 1); nullopt when degenerate.
  std::optional<double> entropy;
  // Growth base b of the minority count (Exponential only).
  std::optional<double> base;
  // Degenerate because the count vanishes at only one of the probe lengths.
  bool oscillating = false;
  // Estimated growth exponent (log_I of the per-step ratio), empirical path.
  std::optional<double> growth_exponent;
};

/// Exact per-length counts for one grammar.
struct CountCurve {
  std::size_t alphabet_size = 2;
  std::vector<BigInt> accepted;  // m_p(N), N = 0..n_max

  std::size_t n_max() const { return accepted.empty() ? 0 : accepted.size() - 1; }
  BigInt total(std::size_t N) const { return big_pow(alphabet_size, N); }
  BigInt rejected(std::size_t N) const { return total(N) - accepted.at(N); }
};

inline CountCurve count_curve_of(const Dfa& dfa, std::size_t n_max) {
  return CountCurve{dfa.alphabet_size(), count_curve(dfa, n_max)};
}

namespace detail {

inline BigInt minority(const CountCurve& c, std::size_t N) {
  const BigInt rej = c.rejected(N);
  return c.accepted.at(N) < rej ? c.accepted.at(N) : rej;
}

}  // namespace detail

inline constexpr double kPolynomialCut = 0.05;
inline constexpr double kProportionalCut = 0.95;

/// Growth class from exact counts at lengths n1 < mid < n2.
///
/// The growth exponent is fitted on the minority count
/// min(m_p, I^N - m_p), which is what the entropy depends on, using
/// log_I c(N) = a + d log_I N + b N through three lengths so that a
/// polynomial prefactor N^d cancels. Polynomial when b < 0.05, Proportional
/// when b > 0.95, Exponential (base I^b) otherwise.
inline Classification classify_empirical(const CountCurve& curve, std::size_t n1, std::size_t n2) {
  if (n2 <= n1 || n1 < 8) throw InvalidArgument("classify_empirical needs 8 <= N1 < N2");
  if (n2 > curve.n_max()) throw InvalidArgument("count curve too short for N2");
  const double I = static_cast<double>(curve.alphabet_size);
  const double logI = std::log(I);
  std::size_t mid = (n1 + n2) / 2;
  if ((mid - n1) % 2 != 0) ++mid;  // match parity with n1
  if (mid >= n2) mid = n2;

  const BigInt c1 = detail::minority(curve, n1), c2 = detail::minority(curve, n2);
  Classification out;
  if (c1.is_zero() || c2.is_zero()) {
    out.cls = GrowthClass::Degenerate;
    out.oscillating = !(c1.is_zero() && c2.is_zero());
    return out;
  }
  const double y1 = log_big(c1) / logI, y2 = log_big(c2) / logI;
  double b = (y2 - y1) / static_cast<double>(n2 - n1);
  const BigInt cm = detail::minority(curve, mid);
  if (mid != n2 && !cm.is_zero()) {
    // Solve y = a + d * log_I N + b * N through the three points.
    const double ym = log_big(cm) / logI;
    const double x1 = static_cast<double>(n1), xm = static_cast<double>(mid), x2 = static_cast<double>(n2);
    const double l1 = std::log(x1) / logI, lm = std::log(xm) / logI, l2 = std::log(x2) / logI;
    // Eliminate a: (ym - y1) = d (lm - l1) + b (xm - x1); (y2 - y1) = d (l2 - l1) + b (x2 - x1).
    const double a11 = lm - l1, a12 = xm - x1, a21 = l2 - l1, a22 = x2 - x1;
    const double det = a11 * a22 - a12 * a21;
    if (std::abs(det) > 1e-12) b = (a11 * (y2 - y1) - a21 * (ym - y1)) / det;
  }
  out.growth_exponent = b;
  if (b < kPolynomialCut) {
    out.cls = GrowthClass::Polynomial;
    out.entropy = 0.0;
  } else if (b > kProportionalCut) {
    out.cls = GrowthClass::Proportional;
    out.entropy = 1.0;
  } else {
    out.cls = GrowthClass::Exponential;
    out.entropy = b;
    out.base = std::pow(I, b);
  }
  return out;
}

struct SpectralResult {
  Classification classification;
  std::size_t absorbing = 0;
  std::vector<double> moduli;
  // Largest modulus left after removing one copy of the Perron root I.
  double lambda2 = 0.0;
  // True when the literal binary-alphabet condition sigma(T) subset {1, 2} held.
  bool modulus_set_is_one_two = false;
};

inline constexpr double kEigenTolerance = 1e-8;

/// Class and entropy from the minimal DFA's summed transition matrix:
/// k(T) in {0, 2} means Proportional (H = 1); k(T) = 1 splits on the second
/// largest eigenvalue modulus |lambda_2|: Polynomial when it is at most 1,
/// otherwise Exponential with H = log_I |lambda_2|. Alphabets larger than two
/// require `generalized`.
inline SpectralResult classify_spectral(const Dfa& input, bool generalized = false) {
  const std::size_t I = input.alphabet_size();
  if (I > 2 && !generalized)
    throw UnsupportedAlphabet("spectral classification is theorem-exact only for binary alphabets; pass --generalized");
  const Dfa dfa = minimize(input);
  const auto tm = transition_matrices(dfa);
  SpectralResult r;
  r.absorbing = absorbing_count(tm);
  r.moduli = eigen_moduli(tm.summed);
  const double dI = static_cast<double>(I);
  {
    auto rest = r.moduli;
    auto perron = std::min_element(rest.begin(), rest.end(),
                                   [&](double a, double b) { return std::abs(a - dI) < std::abs(b - dI); });
    if (perron != rest.end()) rest.erase(perron);
    r.lambda2 = rest.empty() ? 0.0 : *std::max_element(rest.begin(), rest.end());
  }
  r.modulus_set_is_one_two = std::all_of(r.moduli.begin(), r.moduli.end(), [&](double m) {
    return std::abs(m - 1.0) <= kEigenTolerance || std::abs(m - dI) <= kEigenTolerance;
  });

  auto& c = r.classification;
  if (dfa.size() == 1) {
    // empty or universal language: no label changes at any length
    c.cls = GrowthClass::Degenerate;
    return r;
  }
  if (r.absorbing != 1) {
    c.cls = GrowthClass::Proportional;
    c.entropy = 1.0;
    return r;
  }
  if (r.lambda2 <= 1.0 + kEigenTolerance) {
    c.cls = GrowthClass::Polynomial;
    c.entropy = 0.0;
    return r;
  }
  const double h = std::log(r.lambda2) / std::log(dI);
  if (h >= 1.0 - kEigenTolerance) {
    c.cls = GrowthClass::Proportional;
    c.entropy = 1.0;
  } else {
    c.cls = GrowthClass::Exponential;
    c.entropy = h;
    c.base = r.lambda2;
  }
  return r;
}

/// Per-length entropy curve plus both classifications.
struct EntropyReport {
  CountCurve curve;
  std::vector<std::optional<double>> h;  // H^N, index N
  // lim sup estimate: max of H^N over the last ceil(n_max / 4) defined lengths.
  std::optional<double> entropy_estimate;
  Classification empirical;
  std::optional<SpectralResult> spectral;  // absent for I > 2 without --generalized
};

inline std::vector<std::optional<double>> entropy_curve(const CountCurve& curve) {
  std::vector<std::optional<double>> h(curve.accepted.size());
  for (std::size_t N = 0; N < h.size(); ++N) h[N] = entropy_at(curve.accepted[N], N, curve.alphabet_size);
  return h;
}

inline std::optional<double> limsup_estimate(const std::vector<std::optional<double>>& h) {
  std::vector<double> defined;
  for (const auto& v : h)
    if (v) defined.push_back(*v);
  if (defined.empty()) return std::nullopt;
  const std::size_t n_max = h.size() - 1;
  const std::size_t window = std::max<std::size_t>(1, (n_max + 3) / 4);
  const auto from = defined.size() > window ? defined.end() - static_cast<std::ptrdiff_t>(window) : defined.begin();
  return *std::max_element(from, defined.end());
}

inline EntropyReport entropy_report(const Dfa& dfa, std::size_t n_max, bool generalized = false) {
  if (n_max < 2) throw InvalidArgument("entropy curve needs N_max >= 2");
  EntropyReport rep;
  rep.curve = count_curve_of(dfa, n_max);
  rep.h = entropy_curve(rep.curve);
  rep.entropy_estimate = limsup_estimate(rep.h);
  const std::size_t n2 = n_max;
  const std::size_t n1 = std::max<std::size_t>(8, n_max / 2);
  if (n2 > n1) rep.empirical = classify_empirical(rep.curve, n1, n2);
  if (dfa.alphabet_size() <= 2 || generalized) rep.spectral = classify_spectral(dfa, generalized);
  return rep;
}

inline nlohmann::json to_json(const Classification& c) {
  nlohmann::json j;
  j["class"] = to_string(c.cls);
  j["entropy"] = c.entropy ? nlohmann::json(*c.entropy) : nlohmann::json(nullptr);
  if (c.base) j["base"] = *c.base;
  if (c.growth_exponent) j["growth_exponent"] = *c.growth_exponent;
  if (c.oscillating) j["oscillating"] = true;
  return j;
}

/// {class, spectral_entropy, lambda_moduli[], curve: [{N, m_p, hN|null}], ...}
inline nlohmann::json to_json(const EntropyReport& rep) {
  nlohmann::json j;
  const Classification& headline = rep.spectral ? rep.spectral->classification : rep.empirical;
  j["class"] = to_string(headline.cls);
  if (rep.spectral && rep.spectral->classification.entropy)
    j["spectral_entropy"] = *rep.spectral->classification.entropy;
  else
    j["spectral_entropy"] = nullptr;
  j["lambda_moduli"] = rep.spectral ? nlohmann::json(rep.spectral->moduli) : nlohmann::json::array();
  if (rep.spectral) j["absorbing_count"] = rep.spectral->absorbing;
  j["empirical"] = to_json(rep.empirical);
  j["entropy_estimate"] = rep.entropy_estimate ? nlohmann::json(*rep.entropy_estimate) : nlohmann::json(nullptr);
  j["alphabet_size"] = rep.curve.alphabet_size;
  auto& curve = j["curve"] = nlohmann::json::array();
  for (std::size_t N = 0; N < rep.curve.accepted.size(); ++N) {
    curve.push_back({{"N", N},
                     {"m_p", rep.curve.accepted[N].str()},
                     {"hN", rep.h[N] ? nlohmann::json(*rep.h[N]) : nlohmann::json(nullptr)}});
  }
  return j;
}

/// Acceptance bits for every length-N word in lexicographic order, one
/// string per N in 0..n_max. Refuses n_max > 16 or rings over 2^24 words.
inline std::vector<std::string> ring_data(const Dfa& dfa, std::size_t n_max) {
  if (n_max > 16) throw InvalidArgument("ring data limited to N_max <= 16");
  const auto I = dfa.alphabet_size();
  if (std::pow(static_cast<double>(I), static_cast<double>(n_max)) > static_cast<double>(1u << 24))
    throw InvalidArgument("ring data limited to 2^24 words per ring");
  std::vector<std::string> rings;
  for (std::size_t N = 0; N <= n_max; ++N) {
    // Depth-first over words in lexicographic order, tracking the state.
    std::string bits;
    std::vector<State> states(N + 1);
    Word w(N, 0);
    states[0] = dfa.start();
    for (std::size_t k = 0; k < N; ++k) states[k + 1] = dfa.next(states[k], 0);
    for (;;) {
      bits.push_back(dfa.is_accepting(states[N]) ? '1' : '0');
      std::size_t pos = N;
      bool done = true;
      while (pos > 0) {
        --pos;
        if (++w[pos] < I) {
          done = false;
          break;
        }
        w[pos] = 0;
      }
      if (done) break;
      for (std::size_t k = pos; k < N; ++k) states[k + 1] = dfa.next(states[k], w[k]);
    }
    rings.push_back(std::move(bits));
  }
  return rings;
}

inline std::string rings_csv(const std::vector<std::string>& rings) {
  std::ostringstream out;
  out << "N,bits\n";
  for (std::size_t N = 0; N < rings.size(); ++N) out << N << ',' << rings[N] << '\n';
  return out.str();
}

}  // namespace regent
