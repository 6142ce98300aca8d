#pragma once

#include <Eigen/Core>

#include <cmath>
#include <string>
#include <vector>

#include "regent/automata/dfa.hpp"
#include "regent/neural/cell.hpp"

namespace regent {

/// A cell, its weights and its initial hidden state.
struct Model {
  CellSpec spec;
  CellParams params;
  Eigen::VectorXd h0;
  std::vector<std::string> alphabet;

  static Model zeros(const CellSpec& spec) {
    return Model{spec, CellParams(spec), Eigen::VectorXd::Zero(spec.nh), {}};
  }
};

/// Per-step record of one forward pass. h has length |word| + 1 (h[0] = h0);
/// cache[t] holds the kind-specific intermediates of step t + 1.
struct ForwardTrace {
  Word input;
  std::vector<Eigen::VectorXd> h;
  std::vector<std::vector<Eigen::VectorXd>> cache;
  double logit = 0.0;
};

namespace detail {

inline Eigen::VectorXd sigmoid(const Eigen::VectorXd& a) {
  return a.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

inline Eigen::VectorXd tanh_v(const Eigen::VectorXd& a) {
  return a.unaryExpr([](double v) { return std::tanh(v); });
}

inline Eigen::VectorXd activate(Activation act, const Eigen::VectorXd& a) {
  return act == Activation::Tanh ? tanh_v(a) : a;
}

// derivative expressed through the activation's output
inline Eigen::VectorXd activate_grad(Activation act, const Eigen::VectorXd& out) {
  if (act == Activation::Linear) return Eigen::VectorXd::Ones(out.size());
  return (1.0 - out.array().square()).matrix();
}

inline auto slice(const Eigen::MatrixXd& stacked, int k, int nh) { return stacked.block(k * nh, 0, nh, nh); }
inline auto slice(Eigen::MatrixXd& stacked, int k, int nh) { return stacked.block(k * nh, 0, nh, nh); }

}  // namespace detail

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

/// Runs the cell over `word` (one-hot inputs by symbol index) from h0 and
/// reads the label logit w_out . h^T + b_out.
inline ForwardTrace forward(const CellSpec& spec, const CellParams& p, const Word& word, const Eigen::VectorXd& h0) {
  using Eigen::VectorXd;
  spec.validate();
  if (h0.size() != spec.nh) throw InvalidArgument("h0 has size " + std::to_string(h0.size()) + ", expected nh");
  if (p.count() != param_layout(spec).size()) throw InvalidArgument("parameter collection does not match cell spec");
  const int nh = spec.nh;
  ForwardTrace tr;
  tr.input = word;
  tr.h.reserve(word.size() + 1);
  tr.cache.reserve(word.size());
  tr.h.push_back(h0);
  VectorXd c = VectorXd::Zero(nh);  // LSTM cell state
  for (Symbol k : word) {
    if (k >= spec.nx) throw InvalidArgument("input symbol outside the cell's input size");
    const VectorXd& hp = tr.h.back();
    std::vector<VectorXd> cache;
    VectorXd h;
    switch (spec.kind) {
      case CellKind::SRN: {
        h = detail::activate(spec.activation, p.at(0).col(k) + p.at(1) * hp + p.at(2).col(0));
        break;
      }
      case CellKind::MIRNN: {
        const VectorXd u = p.at(0).col(k);
        const VectorXd v = p.at(1) * hp;
        const auto& alpha = p.at(3).col(0).array();
        const VectorXd a = (alpha * u.array() * v.array() + p.at(4).col(0).array() * v.array() +
                            p.at(5).col(0).array() * u.array())
                               .matrix() +
                           p.at(2).col(0);
        h = detail::activate(spec.activation, a);
        cache = {u, v};
        break;
      }
      case CellKind::MRNN: {
        const VectorXd px = p.at(1).col(k);
        const VectorXd qh = p.at(2) * hp;
        const VectorXd f = px.cwiseProduct(qh);
        h = detail::activate(spec.activation, p.at(0) * f + p.at(3).col(k) + p.at(4).col(0));
        cache = {px, qh, f};
        break;
      }
      case CellKind::RNN2: {
        h = detail::activate(spec.activation, detail::slice(p.at(0), k, nh) * hp + p.at(1).col(0));
        break;
      }
      case CellKind::UNI: {
        h = detail::activate(spec.activation,
                             detail::slice(p.at(0), k, nh) * hp + p.at(1).col(k) + p.at(2) * hp + p.at(3).col(0));
        break;
      }
      case CellKind::LSTM: {
        auto gate = [&](int g) { return VectorXd(p.at(3 * g).col(k) + p.at(3 * g + 1) * hp + p.at(3 * g + 2).col(0)); };
        const VectorXd i = detail::sigmoid(gate(0));
        const VectorXd f = detail::sigmoid(gate(1));
        const VectorXd o = detail::sigmoid(gate(2));
        const VectorXd g = detail::tanh_v(gate(3));
        const VectorXd c_prev = c;
        c = c_prev.cwiseProduct(f) + g.cwiseProduct(i);
        const VectorXd tc = detail::tanh_v(c);
        h = tc.cwiseProduct(o);
        cache = {i, f, o, g, c_prev, tc};
        break;
      }
      case CellKind::GRU: {
        const VectorXd z = detail::sigmoid(p.at(0).col(k) + p.at(1) * hp + p.at(2).col(0));
        const VectorXd r = detail::sigmoid(p.at(3).col(k) + p.at(4) * hp + p.at(5).col(0));
        const VectorXd hr = hp.cwiseProduct(r);
        const VectorXd g = detail::tanh_v(p.at(6).col(k) + p.at(7) * hr + p.at(8).col(0));
        h = (VectorXd::Ones(nh) - z).cwiseProduct(g) + z.cwiseProduct(hp);
        cache = {z, r, g};
        break;
      }
    }
    tr.cache.push_back(std::move(cache));
    tr.h.push_back(std::move(h));
  }
  const std::size_t n = p.count();
  tr.logit = p.at(n - 2).col(0).dot(tr.h.back()) + p.at(n - 1)(0, 0);
  return tr;
}

inline ForwardTrace forward(const Model& m, const Word& word) { return forward(m.spec, m.params, word, m.h0); }

inline double logit(const Model& m, const Word& word) { return forward(m, word).logit; }

/// Binary cross-entropy of the final logit against `label`, computed stably.
inline double bce_loss(double z, bool label) {
  // log(1 + e^{-|z|}) + max(z, 0) - z * y
  return std::log1p(std::exp(-std::abs(z))) + std::max(z, 0.0) - (label ? z : 0.0);
}

/// Exact gradients of bce_loss(trace.logit, label) with respect to every
/// parameter array, by reverse accumulation through time.
inline CellParams backward(const CellSpec& spec, const CellParams& p, const ForwardTrace& tr, bool label) {
  using Eigen::VectorXd;
  const int nh = spec.nh;
  CellParams g(spec);
  const std::size_t n = p.count();
  const double dz = sigmoid(tr.logit) - (label ? 1.0 : 0.0);
  g.at(n - 2).col(0) = tr.h.back() * dz;
  g.at(n - 1)(0, 0) = dz;
  VectorXd dh = p.at(n - 2).col(0) * dz;
  VectorXd dc = VectorXd::Zero(nh);
  for (std::size_t t = tr.input.size(); t-- > 0;) {
    const Symbol k = tr.input[t];
    const VectorXd& hp = tr.h[t];
    const VectorXd& hc = tr.h[t + 1];
    const auto& cache = tr.cache[t];
    switch (spec.kind) {
      case CellKind::SRN: {
        const VectorXd da = dh.cwiseProduct(detail::activate_grad(spec.activation, hc));
        g.at(0).col(k) += da;
        g.at(1).noalias() += da * hp.transpose();
        g.at(2).col(0) += da;
        dh = p.at(1).transpose() * da;
        break;
      }
      case CellKind::MIRNN: {
        const VectorXd da = dh.cwiseProduct(detail::activate_grad(spec.activation, hc));
        const VectorXd& u = cache[0];
        const VectorXd& v = cache[1];
        const auto alpha = p.at(3).col(0).array();
        g.at(3).col(0).array() += da.array() * u.array() * v.array();
        g.at(4).col(0).array() += da.array() * v.array();
        g.at(5).col(0).array() += da.array() * u.array();
        g.at(2).col(0) += da;
        const VectorXd du = (da.array() * (alpha * v.array() + p.at(5).col(0).array())).matrix();
        const VectorXd dv = (da.array() * (alpha * u.array() + p.at(4).col(0).array())).matrix();
        g.at(0).col(k) += du;
        g.at(1).noalias() += dv * hp.transpose();
        dh = p.at(1).transpose() * dv;
        break;
      }
      case CellKind::MRNN: {
        const VectorXd da = dh.cwiseProduct(detail::activate_grad(spec.activation, hc));
        const VectorXd& px = cache[0];
        const VectorXd& qh = cache[1];
        const VectorXd& f = cache[2];
        g.at(0).noalias() += da * f.transpose();
        const VectorXd df = p.at(0).transpose() * da;
        g.at(1).col(k) += df.cwiseProduct(qh);
        const VectorXd dq = df.cwiseProduct(px);
        g.at(2).noalias() += dq * hp.transpose();
        g.at(3).col(k) += da;
        g.at(4).col(0) += da;
        dh = p.at(2).transpose() * dq;
        break;
      }
      case CellKind::RNN2: {
        const VectorXd da = dh.cwiseProduct(detail::activate_grad(spec.activation, hc));
        detail::slice(g.at(0), k, nh).noalias() += da * hp.transpose();
        g.at(1).col(0) += da;
        dh = detail::slice(p.at(0), k, nh).transpose() * da;
        break;
      }
      case CellKind::UNI: {
        const VectorXd da = dh.cwiseProduct(detail::activate_grad(spec.activation, hc));
        detail::slice(g.at(0), k, nh).noalias() += da * hp.transpose();
        g.at(1).col(k) += da;
        g.at(2).noalias() += da * hp.transpose();
        g.at(3).col(0) += da;
        dh = (detail::slice(p.at(0), k, nh) + p.at(2)).transpose() * da;
        break;
      }
      case CellKind::LSTM: {
        const VectorXd &i = cache[0], &f = cache[1], &o = cache[2], &gg = cache[3], &c_prev = cache[4],
                       &tc = cache[5];
        const VectorXd d_o = dh.cwiseProduct(tc);
        const VectorXd dct = dc + (dh.array() * o.array() * (1.0 - tc.array().square())).matrix();
        const VectorXd d_f = dct.cwiseProduct(c_prev);
        const VectorXd d_i = dct.cwiseProduct(gg);
        const VectorXd d_g = dct.cwiseProduct(i);
        dc = dct.cwiseProduct(f);
        const VectorXd da[4] = {(d_i.array() * i.array() * (1.0 - i.array())).matrix(),
                                (d_f.array() * f.array() * (1.0 - f.array())).matrix(),
                                (d_o.array() * o.array() * (1.0 - o.array())).matrix(),
                                (d_g.array() * (1.0 - gg.array().square())).matrix()};
        dh = VectorXd::Zero(nh);
        for (int s = 0; s < 4; ++s) {
          g.at(3 * s).col(k) += da[s];
          g.at(3 * s + 1).noalias() += da[s] * hp.transpose();
          g.at(3 * s + 2).col(0) += da[s];
          dh.noalias() += p.at(3 * s + 1).transpose() * da[s];
        }
        break;
      }
      case CellKind::GRU: {
        const VectorXd &z = cache[0], &r = cache[1], &gg = cache[2];
        const VectorXd d_g = dh.cwiseProduct(VectorXd::Ones(nh) - z);
        const VectorXd d_z = dh.cwiseProduct(hp - gg);
        VectorXd dprev = dh.cwiseProduct(z);
        const VectorXd dag = (d_g.array() * (1.0 - gg.array().square())).matrix();
        const VectorXd hr = hp.cwiseProduct(r);
        g.at(6).col(k) += dag;
        g.at(7).noalias() += dag * hr.transpose();
        g.at(8).col(0) += dag;
        const VectorXd dhr = p.at(7).transpose() * dag;
        const VectorXd d_r = dhr.cwiseProduct(hp);
        dprev += dhr.cwiseProduct(r);
        const VectorXd daz = (d_z.array() * z.array() * (1.0 - z.array())).matrix();
        const VectorXd dar = (d_r.array() * r.array() * (1.0 - r.array())).matrix();
        g.at(0).col(k) += daz;
        g.at(1).noalias() += daz * hp.transpose();
        g.at(2).col(0) += daz;
        g.at(3).col(k) += dar;
        g.at(4).noalias() += dar * hp.transpose();
        g.at(5).col(0) += dar;
        dprev.noalias() += p.at(1).transpose() * daz + p.at(4).transpose() * dar;
        dh = dprev;
        break;
      }
    }
  }
  return g;
}

}  // namespace regent
