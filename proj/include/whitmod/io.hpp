#pragma once

#include <charconv>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "whitmod/boussinesq.hpp"
#include "whitmod/coalescence.hpp"
#include "whitmod/pencil.hpp"

namespace whitmod {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Shortest decimal string that parses back to exactly the same double.
inline std::string format_double(double x) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s) {
  double out = 0.0;
  const char* last = s.data() + s.size();
  const auto res = std::from_chars(s.data(), last, out);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ConfigError("parse_double: not a number: '" + std::string(s) + "'");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Eigen containers <-> JSON
// ---------------------------------------------------------------------------

inline Json vector_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

inline Eigen::VectorXd vector_from_json(const Json& j, const std::string& name) {
  if (!j.is_array()) throw ConfigError(name + ": expected an array");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(name + ": expected numbers");
    v[static_cast<int>(i)] = j[i].get<double>();
  }
  return v;
}

// Row-major: one inner array per matrix row.
inline Json matrix_json(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(std::move(row));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Structured results -> JSON
// ---------------------------------------------------------------------------

inline Json characteristic_json(const Characteristic& ch) {
  Json j;
  j["re"] = ch.value.real();
  j["im"] = ch.value.imag();
  j["is_real"] = ch.is_real;
  if (ch.sign_char) {
    j["sign"] = *ch.sign_char;
  } else {
    j["sign"] = nullptr;
  }
  j["residual"] = ch.residual;
  j["nearest_gap"] = ch.nearest_gap;
  return j;
}

inline Json characteristics_json(const std::vector<Characteristic>& roots) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  Json arr = Json::array();
  for (const auto& ch : roots) arr.push_back(characteristic_json(ch));
  j["characteristics"] = std::move(arr);
  return j;
}

inline Json coalescence_point_json(const CoalescencePoint& cp) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["omega"] = vector_json(cp.omega);
  j["k"] = vector_json(cp.k);
  j["path_param"] = cp.path_param;
  j["c_g"] = cp.c_g;
  j["zeta"] = vector_json(cp.zeta);
  j["gamma"] = vector_json(cp.gamma);
  j["mu"] = cp.mu;
  j["kappa"] = cp.kappa;
  if (cp.K_disp) {
    j["K_disp"] = *cp.K_disp;
  } else {
    j["K_disp"] = nullptr;
  }
  if (cp.nu) {
    j["nu"] = *cp.nu;
  } else {
    j["nu"] = nullptr;
  }
  Json d;
  d["delta"] = cp.diagnostics.delta;
  d["delta_prime"] = cp.diagnostics.delta_prime;
  d["delta_second"] = cp.diagnostics.delta_second;
  d["chain_residual"] = cp.diagnostics.chain_residual;
  d["sign_pair_before"] = Json::array({cp.diagnostics.sign_pair_before.first,
                                       cp.diagnostics.sign_pair_before.second});
  j["diagnostics"] = std::move(d);
  return j;
}

inline CoalescencePoint coalescence_point_from_json(const Json& j) {
  if (!j.is_object()) {
    throw ConfigError("coalescence point: expected a JSON object");
  }
  const auto need = [&](const char* key) -> const Json& {
    if (!j.contains(key)) {
      throw ConfigError(std::string("coalescence point: missing field '") +
                        key + "'");
    }
    return j.at(key);
  };
  CoalescencePoint cp;
  cp.omega = vector_from_json(need("omega"), "omega");
  cp.k = vector_from_json(need("k"), "k");
  cp.path_param = need("path_param").get<double>();
  cp.c_g = need("c_g").get<double>();
  cp.zeta = vector_from_json(need("zeta"), "zeta");
  cp.gamma = vector_from_json(need("gamma"), "gamma");
  cp.mu = need("mu").get<double>();
  cp.kappa = need("kappa").get<double>();
  if (j.contains("K_disp") && !j.at("K_disp").is_null()) {
    cp.K_disp = j.at("K_disp").get<double>();
  }
  if (j.contains("nu") && !j.at("nu").is_null()) {
    cp.nu = j.at("nu").get<double>();
  }
  if (j.contains("diagnostics")) {
    const Json& d = j.at("diagnostics");
    cp.diagnostics.delta = d.value("delta", 0.0);
    cp.diagnostics.delta_prime = d.value("delta_prime", 0.0);
    cp.diagnostics.delta_second = d.value("delta_second", 0.0);
    cp.diagnostics.chain_residual = d.value("chain_residual", 0.0);
    if (d.contains("sign_pair_before")) {
      const Json& sp = d.at("sign_pair_before");
      cp.diagnostics.sign_pair_before = {sp.at(0).get<int>(),
                                         sp.at(1).get<int>()};
    }
  }
  return cp;
}

inline Json scan_candidate_json(const ScanCandidate& c) {
  Json j;
  j["p_lo"] = c.p_lo;
  j["p_hi"] = c.p_hi;
  j["c_estimate"] = c.c_estimate;
  j["sign_pair"] = Json::array({c.sign_pair.first, c.sign_pair.second});
  j["reason"] = c.reason;
  return j;
}

inline Json boussinesq_setup_json(const BoussinesqSetup& s) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["mu"] = s.mu;
  j["nu"] = s.nu;
  j["kappa"] = s.kappa;
  j["K"] = s.K;
  j["s1"] = s.s1;
  j["s2"] = s.s2;
  j["scale_t"] = s.scale_t;
  j["scale_x"] = s.scale_x;
  j["scale_u"] = s.scale_u;
  j["flip_u"] = s.flip_u;
  j["classification"] = to_string(s.classification);
  return j;
}

inline Json simulation_result_json(const SimulationResult& res) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["dt"] = res.dt;
  j["steps"] = res.steps;
  Json frames = Json::array();
  for (const auto& f : res.frames) {
    Json fj;
    fj["time"] = f.time;
    fj["u"] = vector_json(f.u);
    fj["u_t"] = vector_json(f.u_t);
    frames.push_back(std::move(fj));
  }
  j["frames"] = std::move(frames);
  Json diag = Json::array();
  for (const auto& d : res.diagnostics) {
    Json dj;
    dj["t"] = d.time;
    dj["mass"] = d.mass;
    dj["flux_mean"] = d.flux_mean;
    dj["max_u"] = d.max_abs_u;
    diag.push_back(std::move(dj));
  }
  j["diagnostics"] = std::move(diag);
  return j;
}

// ---------------------------------------------------------------------------
// CSV emitters
// ---------------------------------------------------------------------------

// Columns: p, c_1..c_{2N}, sign_1..sign_{2N}, flags.  Real roots are listed
// ascending; unused columns stay blank.  A sign of 0 marks a real root whose
// sign characteristic could not be resolved (degenerate or near-collision).
inline std::string scan_csv(const ScanResult& res, int n_phases) {
  if (n_phases < 1) throw ConfigError("scan_csv: n_phases must be >= 1");
  const int cols = 2 * n_phases;
  std::ostringstream out;
  out << "p";
  for (int i = 1; i <= cols; ++i) out << ",c_" << i;
  for (int i = 1; i <= cols; ++i) out << ",sign_" << i;
  out << ",flags\n";
  for (const auto& row : res.rows) {
    out << format_double(row.p);
    for (int i = 0; i < cols; ++i) {
      out << ',';
      if (i < static_cast<int>(row.real_roots.size())) {
        out << format_double(row.real_roots[i]);
      }
    }
    for (int i = 0; i < cols; ++i) {
      out << ',';
      if (i < static_cast<int>(row.sign_chars.size())) {
        out << row.sign_chars[i];
      }
    }
    out << ',' << (row.in_domain ? "" : "out_of_domain") << "\n";
  }
  return out.str();
}

inline std::string sign_curve_csv(const std::vector<SignCurveRow>& rows) {
  std::ostringstream out;
  out << "c,delta,sign_dprime\n";
  for (const auto& r : rows) {
    out << format_double(r.c) << ',' << format_double(r.delta) << ','
        << r.sign_dprime << "\n";
  }
  return out.str();
}

inline std::string trajectory_csv(const SimulationResult& res) {
  std::ostringstream out;
  out << "t";
  const int m = res.frames.empty() ? 0 : res.frames.front().size();
  for (int j = 0; j < m; ++j) out << ",xi_" << j;
  out << "\n";
  for (const auto& f : res.frames) {
    out << format_double(f.time);
    for (int j = 0; j < m; ++j) out << ',' << format_double(f.u[j]);
    out << "\n";
  }
  return out.str();
}

inline std::string diagnostics_csv(const SimulationResult& res) {
  std::ostringstream out;
  out << "t,mass,flux_mean,max_u\n";
  for (const auto& d : res.diagnostics) {
    out << format_double(d.time) << ',' << format_double(d.mass) << ','
        << format_double(d.flux_mean) << ',' << format_double(d.max_abs_u)
        << "\n";
  }
  return out.str();
}

// Field-state samples as two columns; values survive a round-trip bit-exactly.
inline std::string field_csv(const FieldState& state) {
  std::ostringstream out;
  out << "u,u_t\n";
  for (int j = 0; j < state.size(); ++j) {
    out << format_double(state.u[j]) << ',' << format_double(state.u_t[j])
        << "\n";
  }
  return out.str();
}

inline FieldState field_from_csv(const std::string& text, double length) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "u,u_t") {
    throw ConfigError("field_from_csv: expected header 'u,u_t'");
  }
  std::vector<double> u, ut;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ConfigError("field_from_csv: line " + std::to_string(lineno) +
                        ": expected two comma-separated values");
    }
    u.push_back(parse_double(std::string_view(line).substr(0, comma)));
    ut.push_back(parse_double(std::string_view(line).substr(comma + 1)));
  }
  FieldState state;
  state.length = length;
  state.u = Eigen::Map<const Eigen::VectorXd>(u.data(), u.size());
  state.u_t = Eigen::Map<const Eigen::VectorXd>(ut.data(), ut.size());
  state.time = 0.0;
  return state;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write file: " + path);
  out << text;
  if (!out) throw ConfigError("write failed: " + path);
}

}  // namespace whitmod
