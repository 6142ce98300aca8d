#pragma once

#include <nlohmann/json.hpp>

#include <string>

#include "regent/automata/io.hpp"
#include "regent/neural/forward.hpp"

namespace regent {

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  auto rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, int rows, int cols, const std::string& name) {
  if (!j.is_array() || static_cast<int>(j.size()) != rows)
    throw InvalidArgument("array '" + name + "' must have " + std::to_string(rows) + " rows");
  Eigen::MatrixXd m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != cols)
      throw InvalidArgument("array '" + name + "' row " + std::to_string(r) + " must have " + std::to_string(cols) +
                            " entries");
    for (int c = 0; c < cols; ++c) {
      const auto& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw InvalidArgument("array '" + name + "' holds a non-number");
      m(r, c) = v.get<double>();
    }
  }
  if (!m.allFinite()) throw InvalidArgument("array '" + name + "' holds non-finite values");
  return m;
}

inline nlohmann::json to_json(const CellSpec& s) {
  nlohmann::json j{{"kind", to_string(s.kind)}, {"nx", s.nx}, {"nh", s.nh}, {"activation", to_string(s.activation)}};
  if (s.kind == CellKind::MRNN) j["nf"] = s.nf;
  return j;
}

inline CellSpec cell_spec_from_json(const nlohmann::json& j) {
  CellSpec s;
  s.kind = parse_cell_kind(j.at("kind").get<std::string>());
  s.nx = j.at("nx").get<int>();
  s.nh = j.at("nh").get<int>();
  s.nf = s.kind == CellKind::MRNN ? j.value("nf", s.nh) : 0;
  s.activation = parse_activation(j.value("activation", std::string("tanh")));
  s.validate();
  return s;
}

/// {format, spec, alphabet, h0, arrays{name: rows}, lineage}
inline nlohmann::json to_json(const Model& m, const nlohmann::json& lineage = nlohmann::json::object()) {
  nlohmann::json arrays = nlohmann::json::object();
  for (std::size_t i = 0; i < m.params.count(); ++i) arrays[m.params.layout()[i].name] = matrix_to_json(m.params.at(i));
  auto h0 = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.h0.size(); ++i) h0.push_back(m.h0(i));
  return {{"format", "regent-model v1"}, {"spec", to_json(m.spec)}, {"alphabet", m.alphabet},
          {"h0", h0},                    {"arrays", arrays},        {"lineage", lineage}};
}

inline Model model_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", std::string()) != "regent-model v1") throw InvalidArgument("not a regent-model v1 checkpoint");
    Model m = Model::zeros(cell_spec_from_json(j.at("spec")));
    m.alphabet = j.value("alphabet", std::vector<std::string>{});
    if (!m.alphabet.empty() && static_cast<int>(m.alphabet.size()) != m.spec.nx)
      throw InvalidArgument("alphabet size differs from the cell's input size");
    const auto& arrays = j.at("arrays");
    for (std::size_t i = 0; i < m.params.count(); ++i) {
      const auto& shape = m.params.layout()[i];
      if (!arrays.contains(shape.name)) throw InvalidArgument("checkpoint lacks array '" + shape.name + "'");
      m.params.at(i) = matrix_from_json(arrays.at(shape.name), shape.rows, shape.cols, shape.name);
    }
    if (arrays.size() != m.params.count()) throw InvalidArgument("checkpoint has unexpected arrays");
    const auto& h0 = j.at("h0");
    if (!h0.is_array() || static_cast<int>(h0.size()) != m.spec.nh) throw InvalidArgument("h0 must have nh entries");
    for (int i = 0; i < m.spec.nh; ++i) m.h0(i) = h0[static_cast<std::size_t>(i)].get<double>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed checkpoint: ") + e.what());
  }
}

inline void save_model(const std::string& path, const Model& m, const nlohmann::json& lineage = nlohmann::json::object()) {
  write_text_file(path, to_json(m, lineage).dump(1) + "\n");
}

inline Model load_model(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("cannot parse " + path + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace regent
