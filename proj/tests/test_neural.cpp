#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "oracles.hpp"

using namespace regent;

namespace {

Word random_word(std::mt19937_64& rng, int nx, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<int> sym(0, nx - 1);
  Word w(len(rng));
  for (auto& c : w) c = static_cast<Symbol>(sym(rng));
  return w;
}

Eigen::VectorXd random_h0(int nh, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  Eigen::VectorXd h(nh);
  for (int i = 0; i < nh; ++i) h(i) = u(rng);
  return h;
}

double max_abs(const CellParams& p) {
  double m = 0.0;
  for (std::size_t i = 0; i < p.count(); ++i) m = std::max(m, p.at(i).cwiseAbs().maxCoeff());
  return m;
}

}  // namespace

TEST(Cell, KindNamesRoundTrip) {
  for (CellKind k : kAllCellKinds) EXPECT_EQ(parse_cell_kind(to_string(k)), k);
  EXPECT_THROW(parse_cell_kind("transformer"), InvalidArgument);
  EXPECT_THROW(parse_activation("relu"), InvalidArgument);
}

TEST(Cell, LayoutCountsMatchClosedForms) {
  for (CellKind k : kAllCellKinds)
    for (int nx : {2, 4})
      for (int nh : {1, 3, 8}) {
        const auto spec = CellSpec::make(k, nx, nh);
        CellParams p(spec);
        const auto readout = static_cast<std::size_t>(nh + 1);
        EXPECT_EQ(p.scalar_count() - readout, param_count(spec)) << to_string(k);
      }
}

TEST(Cell, BudgetMatchingAtTheSrnAnchor) {
  const auto budget = param_count(CellSpec::make(CellKind::SRN, 2, 10));
  EXPECT_EQ(budget, 130u);
  EXPECT_EQ(match_budget(CellKind::SRN, budget, 2), 10);
  EXPECT_EQ(match_budget(CellKind::RNN2, budget, 2), 7);
  EXPECT_EQ(match_budget(CellKind::MRNN, budget, 2), 6);
  EXPECT_EQ(match_budget(CellKind::UNI, budget, 2), 6);
  for (CellKind k : kAllCellKinds) {
    const int nh = match_budget(k, budget, 2);
    EXPECT_LE(param_count(CellSpec::make(k, 2, nh)), budget);
    EXPECT_GT(param_count(CellSpec::make(k, 2, nh + 1)), budget);
  }
  EXPECT_THROW(match_budget(CellKind::LSTM, 10, 2), InvalidArgument);
}

TEST(Cell, TraceGroupsPerKind) {
  auto names = [](CellKind k) {
    std::string s;
    for (Group g : trace_groups(CellSpec::make(k, 2, 3))) s += to_string(g);
    return s;
  };
  EXPECT_EQ(names(CellKind::SRN), "UVb");
  EXPECT_EQ(names(CellKind::MIRNN), "UVgb");
  EXPECT_EQ(names(CellKind::RNN2), "Wb");
  EXPECT_EQ(names(CellKind::UNI), "WUVb");
  EXPECT_EQ(names(CellKind::MRNN), "WUb");
}

TEST(Cell, InitIsUniformAndSeeded) {
  const auto spec = CellSpec::make(CellKind::UNI, 2, 30);
  const auto a = init_params(spec, 4), b = init_params(spec, 4), c = init_params(spec, 5);
  EXPECT_TRUE(a == b);
  EXPECT_FALSE(a == c);
  double sum = 0.0, sq = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.count(); ++i)
    for (Eigen::Index j = 0; j < a.at(i).size(); ++j) {
      const double v = a.at(i).data()[j];
      EXPECT_LE(std::abs(v), 0.02);
      sum += v;
      sq += v * v;
      ++n;
    }
  const double mean = sum / n, var = sq / n - mean * mean;
  EXPECT_NEAR(mean, 0.0, 4.0 * 0.02 / std::sqrt(3.0 * n));
  EXPECT_NEAR(var, 0.02 * 0.02 / 3.0, 0.1 * 0.02 * 0.02 / 3.0);
  EXPECT_THROW(init_params(spec, 1, 0.1, -0.1), InvalidArgument);
}

TEST(Forward, SrnMatchesScalarLoops) {
  const auto spec = CellSpec::make(CellKind::SRN, 3, 4);
  const auto p = init_params(spec, 2, -0.8, 0.8);
  std::mt19937_64 rng(1);
  const Word w{2, 0, 1, 1, 0};
  const Eigen::VectorXd h0 = random_h0(4, rng);
  std::vector<double> h(h0.data(), h0.data() + 4);
  for (auto k : w) {
    std::vector<double> next(4);
    for (int i = 0; i < 4; ++i) {
      double a = p["U"](i, k) + p["b"](i, 0);
      for (int j = 0; j < 4; ++j) a += p["V"](i, j) * h[static_cast<std::size_t>(j)];
      next[static_cast<std::size_t>(i)] = std::tanh(a);
    }
    h = next;
  }
  double z = p["b_out"](0, 0);
  for (int i = 0; i < 4; ++i) z += p["w_out"](i, 0) * h[static_cast<std::size_t>(i)];
  EXPECT_NEAR(forward(spec, p, w, h0).logit, z, 1e-14);
}

TEST(Forward, LstmSingleUnitByHand) {
  const auto spec = CellSpec::make(CellKind::LSTM, 1, 1);
  CellParams p(spec);
  // gates i, f, o, g: input weight, recurrent weight, bias
  const double in[4] = {0.5, -0.3, 0.8, 1.2}, rec[4] = {0.1, 0.4, -0.2, 0.7}, bias[4] = {0.0, 1.0, 0.2, -0.1};
  const char* names[4] = {"i", "f", "o", "g"};
  for (int g = 0; g < 4; ++g) {
    p[std::string("U_") + names[g]](0, 0) = in[g];
    p[std::string("V_") + names[g]](0, 0) = rec[g];
    p[std::string("b_") + names[g]](0, 0) = bias[g];
  }
  p["w_out"](0, 0) = 2.0;
  p["b_out"](0, 0) = -0.25;
  auto sig = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  double h = 0.0, c = 0.0;
  for (int t = 0; t < 2; ++t) {
    const double i = sig(in[0] + rec[0] * h + bias[0]);
    const double f = sig(in[1] + rec[1] * h + bias[1]);
    const double o = sig(in[2] + rec[2] * h + bias[2]);
    const double g = std::tanh(in[3] + rec[3] * h + bias[3]);
    c = f * c + i * g;
    h = o * std::tanh(c);
  }
  EXPECT_NEAR(forward(spec, p, {0, 0}, Eigen::VectorXd::Zero(1)).logit, 2.0 * h - 0.25, 1e-14);
}

TEST(Forward, RejectsMismatchedInputs) {
  const auto spec = CellSpec::make(CellKind::GRU, 2, 3);
  const auto p = init_params(spec, 1);
  EXPECT_THROW(forward(spec, p, {0, 2}, Eigen::VectorXd::Zero(3)), InvalidArgument);
  EXPECT_THROW(forward(spec, p, {0}, Eigen::VectorXd::Zero(4)), InvalidArgument);
  EXPECT_THROW(forward(CellSpec::make(CellKind::SRN, 2, 3), p, {0}, Eigen::VectorXd::Zero(3)), InvalidArgument);
}

TEST(Forward, BceIsStableForLargeLogits) {
  EXPECT_NEAR(bce_loss(0.0, true), std::log(2.0), 1e-15);
  EXPECT_NEAR(bce_loss(800.0, false), 800.0, 1e-9);
  EXPECT_NEAR(bce_loss(-800.0, true), 800.0, 1e-9);
  EXPECT_NEAR(bce_loss(800.0, true), 0.0, 1e-15);
  EXPECT_NEAR(bce_loss(1.5, true), -std::log(1.0 / (1.0 + std::exp(-1.5))), 1e-14);
}

TEST(Gradients, AllKindsMatchCentralDifferences) {
  for (CellKind k : kAllCellKinds)
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto spec = CellSpec::make(k, 3, 4, seed % 2 ? Activation::Tanh : Activation::Linear);
      const auto p = init_params(spec, seed, -0.6, 0.6);
      std::mt19937_64 rng(seed * 31);
      const Word w = random_word(rng, 3, 12);
      const double err = oracle::gradient_error(spec, p, w, random_h0(4, rng), seed % 3 == 0);
      EXPECT_LE(err, 1e-4) << to_string(k) << " seed " << seed << " |w|=" << w.size();
    }
}

TEST(Gradients, EmptyWordOnlyTouchesTheReadout) {
  for (CellKind k : kAllCellKinds) {
    const auto spec = CellSpec::make(k, 2, 3);
    const auto p = init_params(spec, 3, -0.5, 0.5);
    Eigen::VectorXd h0 = Eigen::VectorXd::Constant(3, 0.3);
    const auto g = backward(spec, p, forward(spec, p, {}, h0), true);
    for (std::size_t a = 0; a + 2 < g.count(); ++a) EXPECT_EQ(g.at(a).cwiseAbs().maxCoeff(), 0.0) << to_string(k);
    EXPECT_GT(g["w_out"].cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LE(oracle::gradient_error(spec, p, {}, h0, true), 1e-4);
  }
}

TEST(Gradients, AbsentSymbolColumnsStayZero) {
  // nx = 3 and nh = 4 keep input-indexed arrays (3 columns) apart from the rest
  for (CellKind k : kAllCellKinds) {
    const auto spec = CellSpec::make(k, 3, 4);
    const auto p = init_params(spec, 8, -0.5, 0.5);
    const auto g = backward(spec, p, forward(spec, p, {0, 1, 0, 1}, Eigen::VectorXd::Constant(4, 0.2)), false);
    for (std::size_t a = 0; a < g.count(); ++a) {
      const auto& shape = g.layout()[a];
      if (shape.cols == 3) {
        EXPECT_EQ(g.at(a).col(2).cwiseAbs().maxCoeff(), 0.0) << to_string(k) << " " << shape.name;
      }
      if (shape.rows == 12) {
        EXPECT_EQ(g.at(a).block(8, 0, 4, 4).cwiseAbs().maxCoeff(), 0.0) << to_string(k) << " " << shape.name;
      }
    }
  }
}

TEST(RmsProp, FirstStepsFollowTheClosedForm) {
  const auto spec = CellSpec::make(CellKind::SRN, 1, 1);
  CellParams p(spec), g(spec);
  for (std::size_t i = 0; i < g.count(); ++i) g.at(i).setConstant(0.5);
  RmsProp opt(spec);
  rmsprop_step(p, g, opt);
  // v = 0.1 * 0.25, step = 0.01 * 0.5 / (sqrt(v) + 1e-8)
  const double v1 = 0.025, s1 = 0.01 * 0.5 / (std::sqrt(v1) + 1e-8);
  EXPECT_NEAR(p["V"](0, 0), -s1, 1e-15);
  rmsprop_step(p, g, opt);
  const double v2 = 0.9 * v1 + 0.025, s2 = 0.01 * 0.5 / (std::sqrt(v2) + 1e-8);
  EXPECT_NEAR(p["V"](0, 0), -s1 - s2, 1e-15);
  EXPECT_NEAR(opt.accum["V"](0, 0), v2, 1e-15);
  // a default-constructed optimizer sizes its state on first use
  RmsProp lazy;
  CellParams q(spec);
  lazy.step(q, g);
  EXPECT_NEAR(q["U"](0, 0), -s1, 1e-15);
}

TEST(Construction, TwoRnnReproducesTomitaExactly) {
  for (int k = 1; k <= 7; ++k) {
    const auto d = minimize(build_tomita(k));
    const auto m = construct_2rnn(d);
    std::size_t bad = 0;
    for (std::size_t L = 0; L <= 10; ++L)
      oracle::for_each_word(2, L, [&](const Word& w) {
        const double z = forward(m, w).logit;
        bad += (z > 0) != accepts(d, w);
        bad += std::abs(std::abs(z) - 0.5) > 1e-12;
      });
    EXPECT_EQ(bad, 0u) << k;
    EXPECT_EQ(construction_residual(d, m, 200), 0.0);
  }
}

TEST(Construction, FirstOrderFitsLeaveAResidual) {
  const auto srn = first_order_fit(minimize(build_tomita(3)), FitMode::SRN, 4000, 3);
  EXPECT_GT(srn.residual, 0.1);
  EXPECT_GT(srn.std_error, 0.0);
  EXPECT_LT(srn.std_error, 0.05 * srn.residual);
  const auto mi = first_order_fit(minimize(build_tomita(3)), FitMode::MIRNN);
  EXPECT_GT(mi.residual, 0.1);
  EXPECT_EQ(mi.std_error, 0.0);
  // each T_i differs from the mean matrix in exactly the columns where the two
  // symbols lead to different states: 2 entries of size 1/2 per such column
  const auto d = minimize(build_tomita(3));
  double want = 0.0;
  for (State j = 0; j < d.size(); ++j) want += d.next(j, 0) != d.next(j, 1) ? 2.0 : 0.0;
  EXPECT_NEAR(mi.residual, want, 1e-12);
  EXPECT_THROW(parse_fit_mode("lstm"), InvalidArgument);
}

TEST(Emulation, UnifiedCellReproducesItsSpecialCases) {
  std::mt19937_64 rng(17);
  for (CellKind k : {CellKind::SRN, CellKind::MIRNN, CellKind::RNN2})
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      Model m = Model::zeros(CellSpec::make(k, 3, 5));
      m.params = init_params(m.spec, seed, -0.7, 0.7);
      m.h0 = random_h0(5, rng);
      const Model uni = configure_unified(m);
      double worst = 0.0;
      for (int s = 0; s < 100; ++s) {
        const Word w = random_word(rng, 3, 20);
        worst = std::max(worst, std::abs(forward(uni, w).logit - forward(m, w).logit));
      }
      EXPECT_LE(worst, 1e-12) << to_string(k);
      if (k == CellKind::MIRNN) {
        EXPECT_TRUE(mi_switch_property_check(uni));
      }
    }
  EXPECT_THROW(configure_unified(Model::zeros(CellSpec::make(CellKind::LSTM, 2, 2))), InvalidArgument);
}

TEST(Emulation, SwitchPropertySeparatesRankOneSlices) {
  Model m = Model::zeros(CellSpec::make(CellKind::UNI, 2, 4));
  m.params = init_params(m.spec, 2, -1.0, 1.0);
  EXPECT_FALSE(mi_switch_property_check(m));
  // W_i = diag(d_i) R shares one row pattern per hidden unit
  Eigen::MatrixXd R = m.params["V"];
  for (int i = 0; i < 2; ++i) {
    Eigen::VectorXd d = Eigen::VectorXd::LinSpaced(4, 0.5 + i, 2.0 - i);
    detail::slice(m.params["W"], i, 4) = d.asDiagonal() * R;
  }
  EXPECT_TRUE(mi_switch_property_check(m));
  EXPECT_THROW(mi_switch_property_check(Model::zeros(CellSpec::make(CellKind::RNN2, 2, 2))), InvalidArgument);
}

TEST(Checkpoint, SaveLoadIsExact) {
  const auto dir = std::filesystem::temp_directory_path() / "regent_ckpt_test";
  std::filesystem::create_directories(dir);
  for (CellKind k : kAllCellKinds) {
    Model m = Model::zeros(CellSpec::make(k, 2, 3, Activation::Linear));
    m.params = init_params(m.spec, 6, -1.0, 1.0);
    m.params.at(0)(0, 0) = 0.1 + 0.2;  // needs all 17 significant digits
    m.h0(1) = 1.0;
    m.alphabet = {"0", "1"};
    const auto path = (dir / (to_string(k) + ".json")).string();
    save_model(path, m, {{"note", "unit"}});
    const Model back = load_model(path);
    EXPECT_EQ(back.spec, m.spec);
    EXPECT_TRUE(back.params == m.params) << to_string(k);
    EXPECT_EQ(back.h0, m.h0);
    EXPECT_EQ(back.alphabet, m.alphabet);
  }
  auto j = to_json(Model::zeros(CellSpec::make(CellKind::SRN, 2, 2)));
  j["format"] = "something else";
  EXPECT_THROW(model_from_json(j), InvalidArgument);
  std::filesystem::remove_all(dir);
}

TEST(Checkpoint, ShapeMismatchIsRejected) {
  auto j = to_json(Model::zeros(CellSpec::make(CellKind::SRN, 2, 2)));
  j["spec"]["nh"] = 3;
  EXPECT_ANY_THROW(model_from_json(j));
}

TEST(Finite, LargeWeightsStayFiniteUnderTanh) {
  const auto spec = CellSpec::make(CellKind::UNI, 2, 4);
  const auto p = init_params(spec, 1, -50.0, 50.0);
  EXPECT_TRUE(p.all_finite());
  EXPECT_GT(max_abs(p), 10.0);
  const auto tr = forward(spec, p, Word(30, 1), Eigen::VectorXd::Zero(4));
  EXPECT_TRUE(std::isfinite(tr.logit));
}
