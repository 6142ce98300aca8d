#pragma once

#include <nlohmann/json.hpp>

#include <cstddef>

#include "regent/datagen/dataset.hpp"
#include "regent/neural/forward.hpp"

namespace regent {

struct Confusion {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;

  std::size_t total() const noexcept { return tp + fp + fn + tn; }
  void add(bool predicted, bool actual) {
    if (predicted) (actual ? tp : fp)++;
    else (actual ? fn : tn)++;
  }
  friend bool operator==(const Confusion&, const Confusion&) = default;
};

struct Metrics {
  double f1 = 0.0;
  double bcr = 0.0;
  double accuracy = 0.0;
  Confusion confusion;

  friend bool operator==(const Metrics&, const Metrics&) = default;
};

/// F1 on the positive class (0 when precision + recall = 0). BCR averages
/// the true-positive and true-negative rates; a class with no items counts
/// as rate 1.
inline Metrics metrics_from(const Confusion& c) {
  Metrics m;
  m.confusion = c;
  const auto d = [](std::size_t x) { return static_cast<double>(x); };
  const double precision = c.tp + c.fp ? d(c.tp) / d(c.tp + c.fp) : 0.0;
  const double recall = c.tp + c.fn ? d(c.tp) / d(c.tp + c.fn) : 0.0;
  m.f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  const double tpr = c.tp + c.fn ? d(c.tp) / d(c.tp + c.fn) : 1.0;
  const double tnr = c.tn + c.fp ? d(c.tn) / d(c.tn + c.fp) : 1.0;
  m.bcr = 0.5 * (tpr + tnr);
  m.accuracy = c.total() ? d(c.tp + c.tn) / d(c.total()) : 0.0;
  return m;
}

inline bool predict(const Model& m, const Word& w) { return forward(m, w).logit > 0.0; }

inline void check_alphabet(const Model& m, const LabeledDataset& ds) {
  if (static_cast<std::size_t>(m.spec.nx) != ds.alphabet.size())
    throw InvalidArgument("model input size does not match the dataset alphabet");
  if (!m.alphabet.empty() && m.alphabet != ds.alphabet.symbols())
    throw InvalidArgument("model and dataset alphabets differ");
}

inline Metrics evaluate(const Model& m, const LabeledDataset& ds) {
  check_alphabet(m, ds);
  Confusion c;
  for (const auto& it : ds.items) c.add(predict(m, it.word), it.label);
  return metrics_from(c);
}

inline nlohmann::json to_json(const Metrics& m) {
  return {{"f1", m.f1},
          {"bcr", m.bcr},
          {"accuracy", m.accuracy},
          {"tp", m.confusion.tp},
          {"fp", m.confusion.fp},
          {"fn", m.confusion.fn},
          {"tn", m.confusion.tn}};
}

}  // namespace regent
