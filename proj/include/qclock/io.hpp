#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "qclock/bounds.hpp"
#include "qclock/channels.hpp"
#include "qclock/distinguish.hpp"
#include "qclock/fisher.hpp"
#include "qclock/qstate.hpp"

namespace qclock::io {

using Json = nlohmann::json;

/// Shortest round-trip decimal form; non-finite values become "inf", "-inf", "nan".
[[nodiscard]] inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// JSON has no infinities; they are written as the strings "inf" / "-inf".
[[nodiscard]] inline Json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

[[nodiscard]] inline double read_number(const Json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw Error(ErrorCode::validation, "expected a number", field);
}

[[nodiscard]] inline Json to_json(const CMatrix& m) {
  Json re = Json::array();
  Json im = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json rr = Json::array();
    Json ir = Json::array();
    for (Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ir.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ir));
  }
  return Json{{"dim", m.rows()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

/// {"dim": d, "re": [[...]], "im": [[...]]}; "im" may be omitted for real matrices.
[[nodiscard]] inline CMatrix matrix_from_json(const Json& j, const std::string& where = "matrix") {
  if (!j.is_object() || !j.contains("dim") || !j.contains("re")) {
    throw Error(ErrorCode::validation, "matrix must be an object with dim and re", where);
  }
  const auto dim = j.at("dim").get<Index>();
  if (dim < 1) throw Error(ErrorCode::validation, "matrix dim must be positive", where);
  auto read_part = [&](const char* key) {
    RMatrix part = RMatrix::Zero(dim, dim);
    if (!j.contains(key)) return part;
    const Json& rows = j.at(key);
    if (!rows.is_array() || static_cast<Index>(rows.size()) != dim) {
      throw Error(ErrorCode::validation, std::string("matrix ") + key + " must have dim rows", where);
    }
    for (Index r = 0; r < dim; ++r) {
      const Json& row = rows.at(static_cast<std::size_t>(r));
      if (!row.is_array() || static_cast<Index>(row.size()) != dim) {
        throw Error(ErrorCode::validation, std::string("matrix ") + key + " rows must have dim entries", where);
      }
      for (Index c = 0; c < dim; ++c) part(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    return part;
  };
  const RMatrix re = read_part("re");
  const RMatrix im = read_part("im");
  CMatrix m(dim, dim);
  m.real() = re;
  m.imag() = im;
  return m;
}

[[nodiscard]] inline Json to_json(const DensityMatrix& rho) { return to_json(rho.matrix()); }
[[nodiscard]] inline Json to_json(const Hamiltonian& h) { return to_json(h.matrix()); }

[[nodiscard]] inline Json to_json(const ClockSystem& clock) {
  return Json{{"state", to_json(clock.state())}, {"hamiltonian", to_json(clock.hamiltonian())}};
}

[[nodiscard]] inline ClockSystem clock_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("state") || !j.contains("hamiltonian")) {
    throw Error(ErrorCode::validation, "clock must be an object with state and hamiltonian");
  }
  return ClockSystem(DensityMatrix::from_matrix(matrix_from_json(j.at("state"), "state")),
                     Hamiltonian(matrix_from_json(j.at("hamiltonian"), "hamiltonian")));
}

[[nodiscard]] inline Json to_json(const QuantumChannel& g) {
  return Json{{"dim_in", g.dim_in()}, {"dim_out", g.dim_out()}, {"choi", to_json(g.choi())}};
}

[[nodiscard]] inline QuantumChannel channel_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("dim_in") || !j.contains("dim_out") || !j.contains("choi")) {
    throw Error(ErrorCode::validation, "channel must be an object with dim_in, dim_out and choi");
  }
  return QuantumChannel(j.at("dim_in").get<Index>(), j.at("dim_out").get<Index>(),
                        matrix_from_json(j.at("choi"), "choi"));
}

[[nodiscard]] inline Json to_json(const EnergyMoments& m) {
  return Json{{"mean", m.mean}, {"second_moment", m.second_moment}, {"std_dev", m.std_dev}};
}

[[nodiscard]] inline Json to_json(const SldResult& r) {
  return Json{{"fisher_info", r.fisher_info},
              {"time_uncertainty", number(r.fisher_info > 0.0 ? 1.0 / std::sqrt(r.fisher_info) : kInfinity)},
              {"kernel_dim", r.kernel_dim},
              {"residual", r.residual},
              {"sld", to_json(r.sld)}};
}

[[nodiscard]] inline Json to_json(const CptpReport& r) {
  return Json{{"cp_violation", r.cp_violation}, {"tp_violation", r.tp_violation}, {"ok", r.ok}};
}

[[nodiscard]] inline Json to_json(const CovarianceReport& r) {
  return Json{{"residual", r.residual}, {"is_covariant", r.is_covariant}};
}

[[nodiscard]] inline Json to_json(const DecompositionReport& r) {
  Json subspaces = Json::array();
  for (const CMatrix& b : r.subspaces) {
    // Bases are dim x k; the shared format is square, so emit the projector
    // alongside the raw columns.
    Json cols = Json::array();
    for (Index c = 0; c < b.cols(); ++c) {
      Json re = Json::array();
      Json im = Json::array();
      for (Index k = 0; k < b.rows(); ++k) {
        re.push_back(b(k, c).real());
        im.push_back(b(k, c).imag());
      }
      cols.push_back(Json{{"re", std::move(re)}, {"im", std::move(im)}});
    }
    subspaces.push_back(Json{{"dim", b.cols()}, {"basis", std::move(cols)}, {"projector", to_json(CMatrix(b * b.adjoint()))}});
  }
  Json out{{"subspaces", std::move(subspaces)},
           {"traces_a", r.traces_a},
           {"traces_b", r.traces_b},
           {"distinguishable", r.distinguishable},
           {"commutant_dim", r.commutant_dim}};
  out["witness_index"] = r.witness_index ? Json(*r.witness_index) : Json(nullptr);
  return out;
}

[[nodiscard]] inline Json to_json(const BlockTraceReport& r) {
  return Json{{"block_traces", r.block_traces}, {"max_deviation", r.max_deviation}, {"conserved", r.conserved}};
}

[[nodiscard]] inline Json to_json(const CopyBoundReport& r) {
  return Json{{"f_in", r.f_in},
              {"f1", r.f1},
              {"f2", r.f2},
              {"e2", r.e2},
              {"e2_unshifted", r.e2_unshifted},
              {"energy_gauge", kEnergyGauge},
              {"lhs", number(r.lhs)},
              {"rhs", number(r.rhs)},
              {"margin", number(r.margin)},
              {"satisfied", r.satisfied},
              {"covariance_residual", r.covariance_residual},
              {"dim_in", r.dim_in},
              {"dim_out1", r.dim_out1},
              {"dim_out2", r.dim_out2}};
}

[[nodiscard]] inline Json to_json(const TimeUncertaintyReport& t) {
  return Json{{"dt_in", number(t.dt_in)},
              {"dt1", number(t.dt1)},
              {"dt2", number(t.dt2)},
              {"lhs", number(t.lhs)},
              {"rhs", number(t.rhs)},
              {"satisfied", t.satisfied},
              {"symmetric", t.symmetric},
              {"symmetric_rhs", number(t.symmetric_rhs)},
              {"symmetric_satisfied", t.symmetric_satisfied},
              {"consistent", t.consistent}};
}

[[nodiscard]] inline Json to_json(const MonotonicityReport& r) {
  return Json{{"f_in", r.f_in}, {"f_out", r.f_out}, {"covariance_residual", r.covariance_residual}, {"holds", r.holds}};
}

/// {"family": "gaussian_delay" | "moving_gaussian" | "tabulated", "params": {...}, "grid": {...}}.
[[nodiscard]] inline ClassicalSignalFamily family_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("family")) throw Error(ErrorCode::validation, "signal family needs a family field");
  const auto kind = j.at("family").get<std::string>();
  const Json params = j.value("params", Json::object());
  auto grid = [&] {
    if (!j.contains("grid")) throw Error(ErrorCode::validation, "signal family needs a grid", kind);
    const Json& g = j.at("grid");
    return GridSpec{g.at("min").get<double>(), g.at("max").get<double>(), g.at("points").get<Index>()};
  };
  if (kind == "gaussian_delay") {
    return gaussian_delay_family(params.at("delay_std").get<double>(), grid());
  }
  if (kind == "moving_gaussian") {
    return moving_gaussian_family(params.at("velocity").get<double>(), params.at("position_std").get<double>(),
                                  grid(), params.value("x0", 0.0));
  }
  if (kind == "tabulated") {
    return tabulated_family(params.at("sample_points").get<std::vector<double>>(),
                            params.at("times").get<std::vector<double>>(),
                            params.at("probabilities").get<std::vector<std::vector<double>>>());
  }
  throw Error(ErrorCode::validation, "unknown signal family", kind);
}

[[nodiscard]] inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::validation, "cannot open file", path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::validation, "file is not valid JSON", path + ": " + e.what());
  }
}

}  // namespace qclock::io
