#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "regent/error.hpp"

namespace regent {

enum class CellKind { SRN, MIRNN, MRNN, RNN2, LSTM, GRU, UNI };
enum class Activation { Tanh, Linear };

inline constexpr CellKind kAllCellKinds[] = {CellKind::SRN,  CellKind::MIRNN, CellKind::MRNN, CellKind::RNN2,
                                             CellKind::LSTM, CellKind::GRU,   CellKind::UNI};

inline std::string to_string(CellKind k) {
  switch (k) {
    case CellKind::SRN: return "SRN";
    case CellKind::MIRNN: return "MIRNN";
    case CellKind::MRNN: return "MRNN";
    case CellKind::RNN2: return "RNN2";
    case CellKind::LSTM: return "LSTM";
    case CellKind::GRU: return "GRU";
    case CellKind::UNI: return "UNI";
  }
  return "?";
}

inline CellKind parse_cell_kind(std::string_view s) {
  std::string u(s);
  std::transform(u.begin(), u.end(), u.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  u.erase(std::remove(u.begin(), u.end(), '-'), u.end());
  if (u == "SRN" || u == "ELMAN") return CellKind::SRN;
  if (u == "MIRNN" || u == "MI") return CellKind::MIRNN;
  if (u == "MRNN") return CellKind::MRNN;
  if (u == "RNN2" || u == "2RNN") return CellKind::RNN2;
  if (u == "LSTM") return CellKind::LSTM;
  if (u == "GRU") return CellKind::GRU;
  if (u == "UNI" || u == "UNIRNN") return CellKind::UNI;
  throw InvalidArgument("unknown cell kind '" + std::string(s) + "'");
}

inline std::string to_string(Activation a) { return a == Activation::Tanh ? "tanh" : "linear"; }

inline Activation parse_activation(std::string_view s) {
  if (s == "tanh") return Activation::Tanh;
  if (s == "linear") return Activation::Linear;
  throw InvalidArgument("unknown activation '" + std::string(s) + "'");
}

/// Shape of a recurrent cell. `nf` is the M-RNN factor size and zero for
/// every other kind. `activation` is the recurrent nonlinearity of
/// SRN/MI-RNN/M-RNN/2-RNN/UNI; LSTM and GRU always use sigmoid gates and tanh.
struct CellSpec {
  CellKind kind = CellKind::SRN;
  int nx = 2;
  int nh = 8;
  int nf = 0;
  Activation activation = Activation::Tanh;

  static CellSpec make(CellKind kind, int nx, int nh, Activation act = Activation::Tanh) {
    return CellSpec{kind, nx, nh, kind == CellKind::MRNN ? nh : 0, act};
  }

  void validate() const {
    if (nx < 1 || nh < 1) throw InvalidArgument("cell sizes must be positive");
    if ((kind == CellKind::MRNN) != (nf > 0)) throw InvalidArgument("nf must be set exactly for M-RNN");
  }

  friend bool operator==(const CellSpec&, const CellSpec&) = default;
};

// Weight groups used for norm traces; readout arrays are in group Out.
enum class Group { W, U, V, Gate, Bias, Out };

inline std::string to_string(Group g) {
  switch (g) {
    case Group::W: return "W";
    case Group::U: return "U";
    case Group::V: return "V";
    case Group::Gate: return "g";
    case Group::Bias: return "b";
    case Group::Out: return "out";
  }
  return "?";
}

struct ArrayShape {
  std::string name;
  int rows;
  int cols;
  Group group;
};

/// Named arrays per kind, in storage order. Three-way tensors (2-RNN W,
/// UNI W') are stored as nx stacked nh x nh slices: rows [k*nh, (k+1)*nh)
/// hold W_k with W_k(i, j) = W_{kij}. Every kind ends with the shared
/// readout w_out (nh x 1) and b_out (1 x 1).
inline std::vector<ArrayShape> param_layout(const CellSpec& s) {
  s.validate();
  const int x = s.nx, h = s.nh, f = s.nf;
  std::vector<ArrayShape> out;
  switch (s.kind) {
    case CellKind::SRN:
      out = {{"U", h, x, Group::U}, {"V", h, h, Group::V}, {"b", h, 1, Group::Bias}};
      break;
    case CellKind::MIRNN:
      out = {{"U", h, x, Group::U},         {"V", h, h, Group::V},          {"b", h, 1, Group::Bias},
             {"alpha", h, 1, Group::Gate}, {"beta1", h, 1, Group::Gate}, {"beta2", h, 1, Group::Gate}};
      break;
    case CellKind::MRNN:
      out = {{"W_hf", h, f, Group::W},
             {"W_fx", f, x, Group::W},
             {"W_fh", f, h, Group::W},
             {"W_hx", h, x, Group::U},
             {"b", h, 1, Group::Bias}};
      break;
    case CellKind::RNN2:
      out = {{"W", x * h, h, Group::W}, {"b", h, 1, Group::Bias}};
      break;
    case CellKind::LSTM:
      for (const char* g : {"i", "f", "o", "g"}) {
        out.push_back({std::string("U_") + g, h, x, Group::U});
        out.push_back({std::string("V_") + g, h, h, Group::V});
        out.push_back({std::string("b_") + g, h, 1, Group::Bias});
      }
      break;
    case CellKind::GRU:
      for (const char* g : {"z", "r", "h"}) {
        out.push_back({std::string("U_") + g, h, x, Group::U});
        out.push_back({std::string("V_") + g, h, h, Group::V});
        out.push_back({std::string("b_") + g, h, 1, Group::Bias});
      }
      break;
    case CellKind::UNI:
      out = {{"W", x * h, h, Group::W}, {"U", h, x, Group::U}, {"V", h, h, Group::V}, {"b", h, 1, Group::Bias}};
      break;
  }
  out.push_back({"w_out", h, 1, Group::Out});
  out.push_back({"b_out", 1, 1, Group::Out});
  return out;
}

/// The named weight collection of one cell (also used for gradients and
/// optimizer state, which share the layout).
class CellParams {
 public:
  CellParams() = default;

  explicit CellParams(const CellSpec& spec) : layout_(param_layout(spec)) {
    for (const auto& a : layout_) arrays_.push_back(Eigen::MatrixXd::Zero(a.rows, a.cols));
  }

  std::size_t count() const noexcept { return arrays_.size(); }
  const std::vector<ArrayShape>& layout() const noexcept { return layout_; }

  Eigen::MatrixXd& at(std::size_t i) { return arrays_.at(i); }
  const Eigen::MatrixXd& at(std::size_t i) const { return arrays_.at(i); }

  std::size_t index_of(std::string_view name) const {
    for (std::size_t i = 0; i < layout_.size(); ++i)
      if (layout_[i].name == name) return i;
    throw InvalidArgument("no parameter array named '" + std::string(name) + "'");
  }
  Eigen::MatrixXd& operator[](std::string_view name) { return arrays_[index_of(name)]; }
  const Eigen::MatrixXd& operator[](std::string_view name) const { return arrays_[index_of(name)]; }

  void set_zero() {
    for (auto& a : arrays_) a.setZero();
  }

  bool all_finite() const {
    return std::all_of(arrays_.begin(), arrays_.end(), [](const auto& a) { return a.allFinite(); });
  }

  std::size_t scalar_count() const {
    std::size_t n = 0;
    for (const auto& a : arrays_) n += static_cast<std::size_t>(a.size());
    return n;
  }

  /// Frobenius norm over all arrays in group g.
  double group_norm(Group g) const {
    double sq = 0.0;
    for (std::size_t i = 0; i < arrays_.size(); ++i)
      if (layout_[i].group == g) sq += arrays_[i].squaredNorm();
    return std::sqrt(sq);
  }

  bool has_group(Group g) const {
    return std::any_of(layout_.begin(), layout_.end(), [g](const auto& a) { return a.group == g; });
  }

  // Accumulate another collection with the same layout.
  CellParams& operator+=(const CellParams& o) {
    for (std::size_t i = 0; i < arrays_.size(); ++i) arrays_[i] += o.arrays_.at(i);
    return *this;
  }
  CellParams& operator*=(double s) {
    for (auto& a : arrays_) a *= s;
    return *this;
  }

  friend bool operator==(const CellParams& a, const CellParams& b) {
    if (a.arrays_.size() != b.arrays_.size()) return false;
    for (std::size_t i = 0; i < a.arrays_.size(); ++i)
      if (a.layout_[i].name != b.layout_[i].name || a.arrays_[i].rows() != b.arrays_[i].rows() ||
          a.arrays_[i].cols() != b.arrays_[i].cols() || a.arrays_[i] != b.arrays_[i])
        return false;
    return true;
  }

 private:
  std::vector<ArrayShape> layout_;
  std::vector<Eigen::MatrixXd> arrays_;
};

/// Weight groups reported in norm traces for a kind (readout excluded).
inline std::vector<Group> trace_groups(const CellSpec& spec) {
  CellParams p(spec);
  std::vector<Group> out;
  for (Group g : {Group::W, Group::U, Group::V, Group::Gate, Group::Bias})
    if (p.has_group(g)) out.push_back(g);
  return out;
}

/// Every entry i.i.d. uniform in [low, high], deterministic in seed.
inline CellParams init_params(const CellSpec& spec, std::uint64_t seed, double low = -0.02, double high = 0.02) {
  if (!(low <= high)) throw InvalidArgument("init range must satisfy low <= high");
  CellParams p(spec);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(low, high);
  for (std::size_t i = 0; i < p.count(); ++i) {
    auto& a = p.at(i);
    for (Eigen::Index r = 0; r < a.rows(); ++r)
      for (Eigen::Index c = 0; c < a.cols(); ++c) a(r, c) = u(rng);
  }
  return p;
}

/// Recurrent-layer parameter count (readout excluded).
inline std::size_t param_count(const CellSpec& spec) {
  spec.validate();
  const std::size_t x = static_cast<std::size_t>(spec.nx), h = static_cast<std::size_t>(spec.nh),
                    f = static_cast<std::size_t>(spec.nf);
  switch (spec.kind) {
    case CellKind::SRN: return h * x + h * h + h;
    case CellKind::MIRNN: return h * x + h * h + 4 * h;
    case CellKind::MRNN: return h * f + f * x + f * h + h * x + h;
    case CellKind::RNN2: return x * h * h + h;
    case CellKind::LSTM: return 4 * (h * x + h * h + h);
    case CellKind::GRU: return 3 * (h * x + h * h + h);
    case CellKind::UNI: return x * h * h + h * x + h * h + h;
  }
  return 0;
}

/// Largest hidden size whose recurrent-layer count stays within `budget`.
inline int match_budget(CellKind kind, std::size_t budget, int nx) {
  auto count_at = [&](int nh) { return param_count(CellSpec::make(kind, nx, nh)); };
  if (count_at(1) > budget)
    throw InvalidArgument("budget " + std::to_string(budget) + " is below the smallest " + to_string(kind) + " cell");
  int nh = 1;
  while (count_at(nh + 1) <= budget) ++nh;
  return nh;
}

}  // namespace regent
