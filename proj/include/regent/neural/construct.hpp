#pragma once

#include <Eigen/Core>

#include <cmath>
#include <random>

#include "regent/automata/dfa.hpp"
#include "regent/neural/forward.hpp"

namespace regent {

/// Linear 2-RNN whose slices are the DFA's transition matrices: h^t is the
/// one-hot of the DFA state after t symbols, and the logit is +0.5 on
/// accepting states and -0.5 elsewhere.
inline Model construct_2rnn(const Dfa& dfa) {
  const auto tm = transition_matrices(dfa);
  const int n = static_cast<int>(dfa.size());
  const int I = static_cast<int>(dfa.alphabet_size());
  Model m = Model::zeros(CellSpec::make(CellKind::RNN2, I, n, Activation::Linear));
  auto& W = m.params["W"];
  for (int k = 0; k < I; ++k) detail::slice(W, k, n) = tm.per_symbol[static_cast<std::size_t>(k)].cast<double>();
  auto& w_out = m.params["w_out"];
  for (State s = 0; s < dfa.size(); ++s) w_out(s, 0) = dfa.is_accepting(s) ? 1.0 : 0.0;
  m.params["b_out"](0, 0) = -0.5;
  m.h0(dfa.start()) = 1.0;
  m.alphabet = dfa.alphabet().symbols();
  return m;
}

/// Monte-Carlo mismatch  E_h Σ_k ||T_k h - W_k h||_1  between a 2-RNN and the DFA.
inline double construction_residual(const Dfa& dfa, const Model& rnn2, std::size_t samples = 10000,
                                    std::uint64_t seed = 7) {
  const auto tm = transition_matrices(dfa);
  const int n = static_cast<int>(dfa.size());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double acc = 0.0;
  for (std::size_t s = 0; s < samples; ++s) {
    Eigen::VectorXd h(n);
    for (int j = 0; j < n; ++j) h(j) = u(rng);
    for (std::size_t k = 0; k < tm.per_symbol.size(); ++k)
      acc += (tm.per_symbol[k].cast<double>() * h - detail::slice(rnn2.params["W"], static_cast<int>(k), n) * h)
                 .lpNorm<1>();
  }
  return acc / static_cast<double>(samples);
}

enum class FitMode { SRN, MIRNN };

inline FitMode parse_fit_mode(std::string_view s) {
  if (s == "srn" || s == "SRN") return FitMode::SRN;
  if (s == "mirnn" || s == "MIRNN" || s == "mi") return FitMode::MIRNN;
  throw InvalidArgument("fit mode must be 'srn' or 'mirnn'");
}

struct FirstOrderFit {
  Model model;
  double residual = 0.0;
  double std_error = 0.0;
};

/// Closed-form first-order fit: V is the mean transition matrix, and the
/// residual is a Monte-Carlo estimate over h uniform in [-1, 1]^n.
/// SRN:   E_h Σ_i ||T_i h - V h||_1          (c_i = U x_i = 0)
/// MIRNN: Σ_i ||T_i - (1_n ⊗ U_i^T) ⊙ V||_1  with U all ones; h drops out.
inline FirstOrderFit first_order_fit(const Dfa& dfa, FitMode mode, std::size_t samples = 10000,
                                     std::uint64_t seed = 7) {
  const auto tm = transition_matrices(dfa);
  const int n = static_cast<int>(dfa.size());
  const int I = static_cast<int>(dfa.alphabet_size());
  Eigen::MatrixXd V = tm.summed.cast<double>() / static_cast<double>(I);
  FirstOrderFit fit;
  if (mode == FitMode::SRN) {
    fit.model = Model::zeros(CellSpec::make(CellKind::SRN, I, n, Activation::Linear));
    fit.model.params["V"] = V;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double sum = 0.0, sq = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
      Eigen::VectorXd h(n);
      for (int j = 0; j < n; ++j) h(j) = u(rng);
      const Eigen::VectorXd vh = V * h;
      double f = 0.0;
      for (const auto& T : tm.per_symbol) f += (T.cast<double>() * h - vh).lpNorm<1>();
      sum += f;
      sq += f * f;
    }
    const double N = static_cast<double>(samples);
    fit.residual = sum / N;
    fit.std_error = samples > 1 ? std::sqrt(std::max(0.0, sq / N - fit.residual * fit.residual) / (N - 1.0)) : 0.0;
  } else {
    fit.model = Model::zeros(CellSpec::make(CellKind::MIRNN, I, n, Activation::Linear));
    auto& p = fit.model.params;
    p["U"].setOnes();
    p["V"] = V;
    p["alpha"].setOnes();
    const auto& U = p["U"];
    double f = 0.0;
    for (int i = 0; i < I; ++i) {
      // (1_n ⊗ U_i^T): every row is U_i^T
      const Eigen::MatrixXd K = Eigen::VectorXd::Ones(n) * U.col(i).transpose();
      f += (tm.per_symbol[static_cast<std::size_t>(i)].cast<double>() - K.cwiseProduct(V)).lpNorm<1>();
    }
    fit.residual = f;
  }
  fit.model.alphabet = dfa.alphabet().symbols();
  fit.model.h0(dfa.start()) = 1.0;
  return fit;
}

/// UNI parameters reproducing an SRN, MI-RNN or 2-RNN forward exactly.
///   SRN:   W' = 0,                     U' = U,        V' = V,        b' = b
///   MIRNN: W'_{ijk} = α_j U_ji V_jk,   U' = diag(β2)U, V' = diag(β1)V, b' = b
///   RNN2:  W' = W,                     U' = 0,        V' = 0,        b' = b
inline Model configure_unified(const Model& target) {
  const auto& s = target.spec;
  if (s.kind != CellKind::SRN && s.kind != CellKind::MIRNN && s.kind != CellKind::RNN2)
    throw InvalidArgument("configure_unified supports SRN, MIRNN and RNN2 targets, not " + to_string(s.kind));
  Model uni = Model::zeros(CellSpec::make(CellKind::UNI, s.nx, s.nh, s.activation));
  uni.h0 = target.h0;
  uni.alphabet = target.alphabet;
  const auto& t = target.params;
  auto& p = uni.params;
  switch (s.kind) {
    case CellKind::SRN:
      p["U"] = t["U"];
      p["V"] = t["V"];
      p["b"] = t["b"];
      break;
    case CellKind::MIRNN: {
      const auto& U = t["U"];
      const auto& V = t["V"];
      const Eigen::VectorXd alpha = t["alpha"].col(0);
      for (int i = 0; i < s.nx; ++i)
        detail::slice(p["W"], i, s.nh) = (alpha.cwiseProduct(U.col(i))).asDiagonal() * V;
      p["U"] = t["beta2"].col(0).asDiagonal() * U;
      p["V"] = t["beta1"].col(0).asDiagonal() * V;
      p["b"] = t["b"];
      break;
    }
    default:
      p["W"] = t["W"];
      p["b"] = t["b"];
      break;
  }
  p["w_out"] = t["w_out"];
  p["b_out"] = t["b_out"];
  return uni;
}

/// Checks W'_{ijk} W'_{njm} = W'_{ijm} W'_{njk} for every index tuple, where
/// i, n index input symbols and j, k, m hidden units.
inline bool mi_switch_property_check(const Model& uni, double tol = 1e-9) {
  if (uni.spec.kind != CellKind::UNI) throw InvalidArgument("switch property applies to UNI parameters");
  const int I = uni.spec.nx, nh = uni.spec.nh;
  const auto& W = uni.params["W"];
  auto w = [&](int i, int j, int k) { return W(i * nh + j, k); };
  for (int i = 0; i < I; ++i)
    for (int n = 0; n < I; ++n)
      for (int j = 0; j < nh; ++j)
        for (int k = 0; k < nh; ++k)
          for (int m = 0; m < nh; ++m) {
            const double lhs = w(i, j, k) * w(n, j, m);
            const double rhs = w(i, j, m) * w(n, j, k);
            if (std::abs(lhs - rhs) > tol * std::max(1.0, std::max(std::abs(lhs), std::abs(rhs)))) return false;
          }
  return true;
}

}  // namespace regent
