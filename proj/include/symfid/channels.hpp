#pragma once

// Quantum channels as Choi matrices. Convention: the Choi matrix of a channel
// N with input dimension d_in is J = (id (x) N)(Phi) on (input copy) (x)
// (output), where Phi is the trace-one maximally entangled state; hence
// tr J = 1 for trace-preserving N and tr_out J = I/d_in.

#include <cmath>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "symfid/linalg.hpp"

namespace symfid {

// Trace-one projector onto (1/sqrt d) sum_i |ii>.
inline CMat maximally_entangled(int d) {
  if (d <= 0) throw std::invalid_argument("maximally_entangled: dimension must be positive");
  CMat phi = CMat::Zero(static_cast<Eigen::Index>(d) * d, static_cast<Eigen::Index>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) phi(i * d + i, j * d + j) = 1.0 / d;
  return phi;
}

struct ChoiMatrix {
  CMat matrix;  // (d_in * d_out) square, ordered (input copy, output)
  int d_in = 0;
  int d_out = 0;
};

struct ChannelSpec {
  std::string name = "custom";
  int d_in = 0;
  int d_out = 0;
  std::vector<CMat> kraus;  // empty when the spec carries a Choi matrix
  bool has_choi = false;
  CMat choi;
};

inline ChoiMatrix choi_from_kraus(const std::vector<CMat>& kraus, int d_in, int d_out) {
  if (d_in <= 0 || d_out <= 0)
    throw std::invalid_argument("choi_from_kraus: dimensions must be positive");
  if (kraus.empty()) throw std::invalid_argument("choi_from_kraus: no Kraus operators");
  for (const auto& k : kraus)
    if (k.rows() != d_out || k.cols() != d_in)
      throw std::invalid_argument("choi_from_kraus: Kraus operator has wrong shape");
  CMat j = CMat::Zero(static_cast<Eigen::Index>(d_in) * d_out,
                      static_cast<Eigen::Index>(d_in) * d_out);
  for (const auto& k : kraus) {
    for (int a = 0; a < d_in; ++a) {
      for (int b = 0; b < d_in; ++b) {
        // block (a, b) of |a><b| (x) K |a><b| K^dag, scaled by 1/d_in
        CMat block = k.col(a) * k.col(b).adjoint() / static_cast<double>(d_in);
        j.block(static_cast<Eigen::Index>(a) * d_out, static_cast<Eigen::Index>(b) * d_out, d_out,
                d_out) += block;
      }
    }
  }
  return ChoiMatrix{std::move(j), d_in, d_out};
}

struct CptpReport {
  double tp_deviation = 0.0;    // || d_in * tr_out(J) - I ||_2
  double cp_deviation = 0.0;    // max(0, -lambda_min(J))
  double herm_deviation = 0.0;  // max-abs of J - J^dag
  bool pass = false;
};

inline CptpReport validate_cptp(const ChoiMatrix& choi, double tol = 1e-9) {
  if (choi.matrix.rows() != static_cast<Eigen::Index>(choi.d_in) * choi.d_out ||
      choi.matrix.cols() != choi.matrix.rows())
    throw std::invalid_argument("validate_cptp: Choi matrix size mismatch");
  CptpReport rep;
  rep.herm_deviation = (choi.matrix - choi.matrix.adjoint()).cwiseAbs().maxCoeff();
  CMat herm = (choi.matrix + choi.matrix.adjoint()) / 2.0;
  CMat marg = partial_trace(herm, {choi.d_in, choi.d_out}, {1});
  CMat dev = static_cast<double>(choi.d_in) * marg - CMat::Identity(choi.d_in, choi.d_in);
  Eigen::SelfAdjointEigenSolver<CMat> mes((dev + dev.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
  rep.tp_deviation = mes.eigenvalues().cwiseAbs().maxCoeff();
  rep.cp_deviation = std::max(0.0, -min_eigenvalue(herm));
  rep.pass = rep.tp_deviation <= tol && rep.cp_deviation <= tol && rep.herm_deviation <= tol;
  return rep;
}

inline ChoiMatrix channel_to_choi(const ChannelSpec& spec) {
  if (spec.has_choi) {
    if (spec.choi.rows() != static_cast<Eigen::Index>(spec.d_in) * spec.d_out ||
        spec.choi.cols() != spec.choi.rows())
      throw std::invalid_argument("channel_to_choi: Choi matrix size mismatch");
    return ChoiMatrix{spec.choi, spec.d_in, spec.d_out};
  }
  return choi_from_kraus(spec.kraus, spec.d_in, spec.d_out);
}

inline bool choi_is_real(const ChoiMatrix& choi, double tol = 1e-13) {
  return choi.matrix.imag().cwiseAbs().maxCoeff() <= tol;
}

inline const std::vector<std::string>& builtin_channel_names() {
  static const std::vector<std::string> names = {"identity", "depolarizing", "dephasing",
                                                 "amplitude_damping", "erasure_like_qubit"};
  return names;
}

// Qubit channel family `name` at noise parameter `param` in [0, 1].
inline ChannelSpec builtin_channel(const std::string& name, double param = 0.0) {
  auto check_param = [&](double p) {
    if (!(p >= 0.0 && p <= 1.0))
      throw std::invalid_argument("builtin_channel: parameter must lie in [0, 1]");
  };
  CMat id2 = CMat::Identity(2, 2);
  ChannelSpec spec;
  spec.name = name;
  spec.d_in = 2;
  spec.d_out = 2;
  if (name == "identity") {
    if (param != 0.0)
      throw std::invalid_argument("builtin_channel: identity takes no parameter");
    spec.kraus = {id2};
  } else if (name == "depolarizing") {
    check_param(param);
    CMat x = CMat::Zero(2, 2), y = CMat::Zero(2, 2), z = CMat::Zero(2, 2);
    x(0, 1) = 1;
    x(1, 0) = 1;
    y(0, 1) = Complex(0, -1);
    y(1, 0) = Complex(0, 1);
    z(0, 0) = 1;
    z(1, 1) = -1;
    spec.kraus = {std::sqrt(1.0 - 0.75 * param) * id2, std::sqrt(param) / 2.0 * x,
                  std::sqrt(param) / 2.0 * y, std::sqrt(param) / 2.0 * z};
  } else if (name == "dephasing") {
    check_param(param);
    CMat z = CMat::Zero(2, 2);
    z(0, 0) = 1;
    z(1, 1) = -1;
    spec.kraus = {std::sqrt(1.0 - param) * id2, std::sqrt(param) * z};
  } else if (name == "amplitude_damping") {
    check_param(param);
    CMat k0 = CMat::Zero(2, 2), k1 = CMat::Zero(2, 2);
    k0(0, 0) = 1;
    k0(1, 1) = std::sqrt(1.0 - param);
    k1(0, 1) = std::sqrt(param);
    spec.kraus = {k0, k1};
  } else if (name == "erasure_like_qubit") {
    // reset-to-|0> with probability p; keeps the output dimension at 2
    check_param(param);
    CMat r0 = CMat::Zero(2, 2), r1 = CMat::Zero(2, 2);
    r0(0, 0) = 1;
    r1(0, 1) = 1;
    spec.kraus = {std::sqrt(1.0 - param) * id2, std::sqrt(param) * r0, std::sqrt(param) * r1};
  } else {
    throw std::invalid_argument("builtin_channel: unknown channel name '" + name + "'");
  }
  return spec;
}

namespace detail {

inline Complex complex_from_json(const nlohmann::json& j) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return Complex(j[0].get<double>(), j[1].get<double>());
  throw std::invalid_argument("channel JSON: complex entry must be a number or [re, im]");
}

inline CMat matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("channel JSON: matrix must be a non-empty array of rows");
  Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  CMat m;
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || row.empty())
      throw std::invalid_argument("channel JSON: matrix row must be a non-empty array");
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw std::invalid_argument("channel JSON: ragged matrix");
    }
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

inline nlohmann::json matrix_to_json(const CMat& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace detail

// Parse {"name": ..., "d_in": ..., "d_out": ..., "kraus": [...]} or the same
// with "choi" instead of "kraus". Unknown fields are rejected.
inline ChannelSpec channel_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("channel JSON: expected an object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (key != "name" && key != "d_in" && key != "d_out" && key != "kraus" && key != "choi")
      throw std::invalid_argument("channel JSON: unknown field '" + key + "'");
  }
  ChannelSpec spec;
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw std::invalid_argument("channel JSON: name must be a string");
    spec.name = j["name"].get<std::string>();
  }
  if (!j.contains("d_in") || !j.contains("d_out") || !j["d_in"].is_number_integer() ||
      !j["d_out"].is_number_integer())
    throw std::invalid_argument("channel JSON: d_in and d_out are required integers");
  spec.d_in = j["d_in"].get<int>();
  spec.d_out = j["d_out"].get<int>();
  if (spec.d_in <= 0 || spec.d_out <= 0)
    throw std::invalid_argument("channel JSON: dimensions must be positive");
  bool has_kraus = j.contains("kraus"), has_choi = j.contains("choi");
  if (has_kraus == has_choi)
    throw std::invalid_argument("channel JSON: provide exactly one of 'kraus' or 'choi'");
  if (has_kraus) {
    if (!j["kraus"].is_array() || j["kraus"].empty())
      throw std::invalid_argument("channel JSON: kraus must be a non-empty array");
    for (const auto& k : j["kraus"]) {
      CMat m = detail::matrix_from_json(k);
      if (m.rows() != spec.d_out || m.cols() != spec.d_in)
        throw std::invalid_argument("channel JSON: Kraus operator must be d_out x d_in");
      spec.kraus.push_back(std::move(m));
    }
  } else {
    CMat m = detail::matrix_from_json(j["choi"]);
    if (m.rows() != static_cast<Eigen::Index>(spec.d_in) * spec.d_out || m.cols() != m.rows())
      throw std::invalid_argument("channel JSON: Choi matrix must be (d_in*d_out) square");
    spec.has_choi = true;
    spec.choi = std::move(m);
  }
  return spec;
}

inline nlohmann::json channel_to_json(const ChannelSpec& spec) {
  nlohmann::json j;
  j["name"] = spec.name;
  j["d_in"] = spec.d_in;
  j["d_out"] = spec.d_out;
  if (spec.has_choi) {
    j["choi"] = detail::matrix_to_json(spec.choi);
  } else {
    nlohmann::json ks = nlohmann::json::array();
    for (const auto& k : spec.kraus) ks.push_back(detail::matrix_to_json(k));
    j["kraus"] = std::move(ks);
  }
  return j;
}

}  // namespace symfid
