#pragma once

#include <cmath>

#include "regent/neural/cell.hpp"

namespace regent {

/// RMSprop with a running mean of squared gradients per array entry.
struct RmsProp {
  double lr = 0.01;
  double decay = 0.9;
  double eps = 1e-8;
  CellParams accum;

  RmsProp() = default;
  explicit RmsProp(const CellSpec& spec, double lr_ = 0.01, double decay_ = 0.9, double eps_ = 1e-8)
      : lr(lr_), decay(decay_), eps(eps_), accum(spec) {}

  void step(CellParams& params, const CellParams& grads) {
    if (accum.count() != params.count()) {
      accum = params;
      accum.set_zero();
    }
    for (std::size_t i = 0; i < params.count(); ++i) {
      auto& v = accum.at(i);
      const auto& g = grads.at(i);
      v = decay * v + (1.0 - decay) * g.cwiseAbs2();
      params.at(i).array() -= lr * g.array() / (v.array().sqrt() + eps);
    }
  }
};

inline void rmsprop_step(CellParams& params, const CellParams& grads, RmsProp& state) { state.step(params, grads); }

}  // namespace regent
