#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "whitmod/boussinesq.hpp"
#include "whitmod/builtin_models.hpp"
#include "whitmod/coalescence.hpp"
#include "whitmod/config.hpp"
#include "whitmod/errors.hpp"
#include "whitmod/io.hpp"

namespace whitmod {

// Options shared by every subcommand.  Optionals that stay empty fall back to
// the config file's [run] table and then to built-in defaults, so a flag given
// on the command line always wins.
struct RunOptions {
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  bool curve = false;                 // characteristics: also write the sign curve
  std::optional<double> K_override;   // reduce: dispersion coefficient
  std::optional<double> nu_override;  // reduce: unfolding coefficient
};

inline int exit_code(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::Config:
    case ErrorKind::Domain:
      return 2;
    case ErrorKind::BlowUp:
      return 3;
    case ErrorKind::Numerical:
      return 1;
  }
  return 1;
}

inline const char* to_string(HyperbolicityVerdict v) {
  switch (v) {
    case HyperbolicityVerdict::Hyperbolic: return "hyperbolic";
    case HyperbolicityVerdict::NotHyperbolic: return "not_hyperbolic";
    case HyperbolicityVerdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

namespace detail_run {

inline void check_keys(const Json& j, std::initializer_list<const char*> allowed,
                       const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a table");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* key : allowed) ok = ok || item.key() == key;
    if (!ok) throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

inline const Json& section(const Json& cfg, const char* name) {
  if (!cfg.is_object() || !cfg.contains(name)) {
    throw ConfigError(std::string("config is missing the [") + name + "] table");
  }
  return cfg.at(name);
}

inline const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(where + " is missing key '" + key + "'");
  }
  return j.at(key);
}

inline double number_at(const Json& j, const char* key, const std::string& where) {
  const Json& v = field(j, key, where);
  if (!v.is_number()) {
    throw ConfigError(where + "." + key + ": expected a number");
  }
  return v.get<double>();
}

inline double number_or(const Json& j, const char* key, double fallback,
                        const std::string& where) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return number_at(j, key, where);
}

inline long long integer_at(const Json& j, const char* key,
                            const std::string& where) {
  const Json& v = field(j, key, where);
  if (!v.is_number_integer()) {
    throw ConfigError(where + "." + key + ": expected an integer");
  }
  return v.get<long long>();
}

inline long long integer_or(const Json& j, const char* key, long long fallback,
                            const std::string& where) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return integer_at(j, key, where);
}

inline std::string string_at(const Json& j, const char* key,
                             const std::string& where) {
  const Json& v = field(j, key, where);
  if (!v.is_string()) {
    throw ConfigError(where + "." + key + ": expected a string");
  }
  return v.get<std::string>();
}

inline bool boolean_or(const Json& j, const char* key, bool fallback,
                       const std::string& where) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  const Json& v = j.at(key);
  if (!v.is_boolean()) {
    throw ConfigError(where + "." + key + ": expected true or false");
  }
  return v.get<bool>();
}

inline Eigen::VectorXd vector_at(const Json& j, const char* key,
                                 const std::string& where) {
  return vector_from_json(field(j, key, where), where + "." + key);
}

// Merges the optional [run] table into the command-line options; flags win.
inline RunOptions effective_options(const Json& cfg, RunOptions opt) {
  if (cfg.is_object() && cfg.contains("run")) {
    const Json& r = cfg.at("run");
    check_keys(r, {"seed", "tol", "out"}, "run");
    if (!opt.seed && r.contains("seed")) {
      const long long s = integer_at(r, "seed", "run");
      if (s < 0) throw ConfigError("run.seed: expected a non-negative integer");
      opt.seed = static_cast<std::uint64_t>(s);
    }
    if (!opt.tol && r.contains("tol")) opt.tol = number_at(r, "tol", "run");
    if (!opt.out_dir && r.contains("out")) {
      opt.out_dir = string_at(r, "out", "run");
    }
  }
  if (opt.tol && !(*opt.tol > 0.0)) {
    throw ConfigError("tol must be positive");
  }
  return opt;
}

// Paths inside a config file resolve relative to the config file itself.
inline std::string resolve_path(const std::string& raw,
                                const std::string& config_path) {
  const std::filesystem::path p(raw);
  if (p.is_absolute()) return raw;
  return (std::filesystem::path(config_path).parent_path() / p).string();
}

inline void write_output(const RunOptions& opt, const std::string& name,
                         const std::string& text) {
  const std::filesystem::path dir(opt.out_dir ? *opt.out_dir : std::string("."));
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw ConfigError("cannot create output directory '" + dir.string() +
                      "': " + ec.message());
  }
  write_text_file((dir / name).string(), text);
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline BoussinesqSetup setup_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  return normalize(number_at(j, "mu", where), number_at(j, "nu", where),
                   number_at(j, "kappa", where), number_at(j, "K", where));
}

}  // namespace detail_run

// Prints the characteristics at one (omega, k) as JSON; optionally writes the
// determinant sign curve used for the graphical collision criterion.
inline int cmd_characteristics(const RunOptions& raw_opt, std::ostream& out,
                               std::ostream& err) {
  using namespace detail_run;
  try {
    const Json cfg = load_config_file(raw_opt.config_path);
    const RunOptions opt = effective_options(cfg, raw_opt);
    check_keys(cfg, {"model", "point", "curve", "run"}, "config");

    const ModulationModel model = make_model(section(cfg, "model"));
    const Json& jp = section(cfg, "point");
    check_keys(jp, {"omega", "k"}, "point");
    const Eigen::VectorXd omega = vector_at(jp, "omega", "point");
    const Eigen::VectorXd k = vector_at(jp, "k", "point");

    PencilTolerances tol;
    if (opt.tol) tol.root_accept = *opt.tol;
    const QuadraticPencil pen = assemble_pencil(model, omega, k, tol);
    const auto roots = characteristics(pen, tol);
    const auto hyp = hyperbolicity_test(pen, 64, true, opt.seed.value_or(0));

    Json j;
    j["schema_version"] = kSchemaVersion;
    j["model"] = model.name;
    j["omega"] = vector_json(omega);
    j["k"] = vector_json(k);
    j["characteristics"] = characteristics_json(roots).at("characteristics");
    Json hj;
    hj["verdict"] = to_string(hyp.verdict);
    hj["min_margin"] = hyp.min_margin;
    j["hyperbolicity"] = std::move(hj);

    const bool want_curve = opt.curve || cfg.contains("curve");
    if (want_curve) {
      double c_min, c_max;
      int samples = 401;
      if (cfg.contains("curve")) {
        const Json& jc = cfg.at("curve");
        check_keys(jc, {"c_min", "c_max", "samples"}, "curve");
        c_min = number_at(jc, "c_min", "curve");
        c_max = number_at(jc, "c_max", "curve");
        samples = static_cast<int>(integer_or(jc, "samples", 401, "curve"));
      } else {
        // Default window: pad the real spread of the roots by one unit.
        double lo = 0.0, hi = 0.0;
        for (const auto& r : roots) {
          lo = std::min(lo, r.value.real());
          hi = std::max(hi, r.value.real());
        }
        c_min = lo - 1.0;
        c_max = hi + 1.0;
      }
      const auto curve = graphical_sign_data(pen, c_min, c_max, samples);
      write_output(opt, "sign_curve.csv", sign_curve_csv(curve));
    }

    const std::string text = dump(j);
    write_output(opt, "characteristics.json", text);
    out << text;
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e);
  }
}

// Sweeps a straight parameter path, flags candidate collisions, refines each
// one, and attaches the reduction coefficients.  Failures on individual
// candidates are recorded in the output instead of aborting the sweep.
inline int cmd_scan(const RunOptions& raw_opt, std::ostream& out,
                    std::ostream& err) {
  using namespace detail_run;
  try {
    const Json cfg = load_config_file(raw_opt.config_path);
    const RunOptions opt = effective_options(cfg, raw_opt);
    check_keys(cfg, {"model", "path", "scan", "run"}, "config");

    const ModulationModel model = make_model(section(cfg, "model"));
    const Json& jp = section(cfg, "path");
    check_keys(jp, {"omega_start", "omega_end", "k_start", "k_end"}, "path");
    const Eigen::VectorXd w0 = vector_at(jp, "omega_start", "path");
    const Eigen::VectorXd w1 = vector_at(jp, "omega_end", "path");
    const Eigen::VectorXd k0 = vector_at(jp, "k_start", "path");
    const Eigen::VectorXd k1 = vector_at(jp, "k_end", "path");
    if (w0.size() != w1.size() || k0.size() != k1.size()) {
      throw ConfigError("path: start and end vectors must have equal length");
    }
    const ParameterPath path = [=](double p) {
      return std::make_pair(Eigen::VectorXd(w0 + p * (w1 - w0)),
                            Eigen::VectorXd(k0 + p * (k1 - k0)));
    };

    int grid = 40;
    bool refine = true;
    ScanOptions scan_opts;
    AnalyzeOptions analyze_opts;
    if (cfg.contains("scan")) {
      const Json& js = cfg.at("scan");
      check_keys(js, {"grid", "gap_threshold", "refine", "nu_eps"}, "scan");
      grid = static_cast<int>(integer_or(js, "grid", grid, "scan"));
      scan_opts.gap_threshold =
          number_or(js, "gap_threshold", scan_opts.gap_threshold, "scan");
      refine = boolean_or(js, "refine", refine, "scan");
      analyze_opts.nu_eps = number_or(js, "nu_eps", analyze_opts.nu_eps, "scan");
    }
    if (opt.tol) analyze_opts.refine.f_tol = *opt.tol;

    const ScanResult res = scan_path(model, path, grid, scan_opts);

    Json j;
    j["schema_version"] = kSchemaVersion;
    j["model"] = model.name;
    Json cands = Json::array();
    for (const auto& c : res.candidates) cands.push_back(scan_candidate_json(c));
    j["candidates"] = std::move(cands);
    Json points = Json::array();
    Json failures = Json::array();
    if (refine) {
      for (const auto& cand : res.candidates) {
        try {
          const CoalescencePoint cp =
              analyze_coalescence(model, path, cand, analyze_opts);
          Json pj = coalescence_point_json(cp);
          // One standalone file per accepted point so `reduce` can consume it.
          write_output(opt, "point_" + std::to_string(points.size()) + ".json",
                       dump(pj));
          points.push_back(std::move(pj));
        } catch (const Error& e) {
          Json f;
          f["p_lo"] = cand.p_lo;
          f["p_hi"] = cand.p_hi;
          f["reason"] = cand.reason;
          f["error"] = e.what();
          failures.push_back(std::move(f));
        }
      }
    }
    j["points"] = std::move(points);
    j["failures"] = std::move(failures);
    Json warnings = Json::array();
    int outside = 0;
    for (const auto& row : res.rows) outside += row.in_domain ? 0 : 1;
    if (outside > 0) {
      warnings.push_back(std::to_string(outside) + " of " +
                         std::to_string(res.rows.size()) +
                         " samples were outside the model domain");
    }
    j["warnings"] = std::move(warnings);

    write_output(opt, "scan.csv", scan_csv(res, model.n_phases));
    const std::string text = dump(j);
    write_output(opt, "scan.json", text);
    out << text;
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e);
  }
}

// Normalizes the reduction coefficients stored on a coalescence point into the
// scaled long-wave equation and classifies its linear dispersion.
inline int cmd_reduce(const RunOptions& raw_opt, std::ostream& out,
                      std::ostream& err) {
  using namespace detail_run;
  try {
    const Json cfg = load_config_file(raw_opt.config_path);
    const RunOptions opt = effective_options(cfg, raw_opt);
    check_keys(cfg, {"reduce", "run"}, "config");
    const Json& jr = section(cfg, "reduce");
    check_keys(jr, {"point", "K", "nu"}, "reduce");

    const std::string point_path =
        resolve_path(string_at(jr, "point", "reduce"), opt.config_path);
    const CoalescencePoint cp =
        coalescence_point_from_json(load_config_file(point_path));

    // Flag beats config, config beats the value stored on the point.
    std::optional<double> K = opt.K_override;
    if (!K && jr.contains("K")) K = number_at(jr, "K", "reduce");
    if (!K) K = cp.K_disp;
    std::optional<double> nu = opt.nu_override;
    if (!nu && jr.contains("nu")) nu = number_at(jr, "nu", "reduce");
    if (!nu) nu = cp.nu;

    if (cp.kappa == 0.0) {
      throw DegenerateCoefficient(
          "kappa",
          "quadratic coefficient kappa vanishes at this point; the reduction "
          "degenerates and re-modulation leads to a cubic nonlinearity, which "
          "this pipeline does not cover");
    }
    if (!K) {
      throw NumericalError(
          "dispersion coefficient K is not stored on this point: the two-term "
          "Jordan chain determines mu and kappa but not the fourth-derivative "
          "term, so K must come from a model dispersion hook or be supplied "
          "via --K / reduce.K");
    }
    if (!nu) {
      throw NumericalError(
          "unfolding coefficient nu is not stored on this point (it vanishes "
          "exactly at the transition); supply the offset from the transition "
          "via --nu / reduce.nu or rerun the scan with an unfolding step");
    }

    const BoussinesqSetup setup = normalize(cp.mu, *nu, cp.kappa, *K);
    const std::string text = dump(boussinesq_setup_json(setup));
    write_output(opt, "setup.json", text);
    out << text;
    return 0;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e);
  }
}

// Integrates the normalized long-wave equation and writes the trajectory and
// conserved-quantity diagnostics.  A blow-up writes the partial outputs, puts
// the blow-up time in the run summary, and exits with code 3.
inline int cmd_simulate(const RunOptions& raw_opt, std::ostream& out,
                        std::ostream& err) {
  using namespace detail_run;
  try {
    const Json cfg = load_config_file(raw_opt.config_path);
    const RunOptions opt = effective_options(cfg, raw_opt);
    check_keys(cfg, {"setup", "grid", "init", "time", "filter", "run"}, "config");

    const Json& jsetup = section(cfg, "setup");
    BoussinesqSetup setup;
    if (jsetup.contains("file")) {
      check_keys(jsetup, {"file"}, "setup");
      const std::string path =
          resolve_path(string_at(jsetup, "file", "setup"), opt.config_path);
      setup = setup_from_json(load_config_file(path), "setup file");
    } else if (jsetup.contains("s1")) {
      check_keys(jsetup, {"s1", "s2"}, "setup");
      const int s1 = static_cast<int>(integer_at(jsetup, "s1", "setup"));
      const int s2 = static_cast<int>(integer_at(jsetup, "s2", "setup"));
      if (std::abs(s1) != 1 || std::abs(s2) != 1) {
        throw ConfigError("setup: s1 and s2 must be +1 or -1");
      }
      setup = normalize(1.0, s1, 1.0, s2);
    } else {
      check_keys(jsetup, {"mu", "nu", "kappa", "K"}, "setup");
      setup = setup_from_json(jsetup, "setup");
    }

    const Json& jgrid = section(cfg, "grid");
    check_keys(jgrid, {"length", "m"}, "grid");
    const double length = number_at(jgrid, "length", "grid");
    const int m = static_cast<int>(integer_at(jgrid, "m", "grid"));

    const Json& jinit = section(cfg, "init");
    const std::string kind = string_at(jinit, "kind", "init");
    FieldState init;
    if (kind == "solitary") {
      check_keys(jinit, {"kind", "gamma"}, "init");
      const double gamma = number_at(jinit, "gamma", "init");
      init = solitary_wave(setup.s1, setup.s2, gamma, length, m);
    } else if (kind == "mode") {
      check_keys(jinit, {"kind", "index", "amplitude"}, "init");
      const int index = static_cast<int>(integer_at(jinit, "index", "init"));
      const double amplitude = number_at(jinit, "amplitude", "init");
      if (index < 1) throw ConfigError("init.index: expected a positive integer");
      const Eigen::VectorXd xi = grid_points(length, m);
      init.length = length;
      init.u = (2.0 * M_PI * index / length * xi.array()).cos() * amplitude;
      init.u_t = Eigen::VectorXd::Zero(m);
    } else if (kind == "file") {
      check_keys(jinit, {"kind", "path"}, "init");
      const std::string path =
          resolve_path(string_at(jinit, "path", "init"), opt.config_path);
      init = field_from_csv(read_text_file(path), length);
      if (init.size() != m) {
        throw ConfigError("init file has " + std::to_string(init.size()) +
                          " samples but grid.m = " + std::to_string(m));
      }
    } else {
      throw ConfigError("init.kind: expected 'solitary', 'mode', or 'file'");
    }

    const Json& jtime = section(cfg, "time");
    check_keys(jtime, {"t_end", "dt", "cfl", "sample_stride"}, "time");
    SimulateOptions sim;
    sim.t_end = number_at(jtime, "t_end", "time");
    sim.dt = number_or(jtime, "dt", sim.dt, "time");
    sim.cfl = number_or(jtime, "cfl", sim.cfl, "time");
    sim.sample_stride = static_cast<int>(
        integer_or(jtime, "sample_stride", sim.sample_stride, "time"));
    if (cfg.contains("filter")) {
      const Json& jf = cfg.at("filter");
      check_keys(jf, {"alpha", "order"}, "filter");
      sim.filter_alpha = number_at(jf, "alpha", "filter");
      sim.filter_order =
          static_cast<int>(integer_or(jf, "order", sim.filter_order, "filter"));
    }

    Json j;
    j["schema_version"] = kSchemaVersion;
    j["s1"] = setup.s1;
    j["s2"] = setup.s2;
    j["classification"] = to_string(setup.classification);
    j["length"] = length;
    j["m"] = m;
    j["init"] = kind;

    const auto finish = [&](const SimulationResult& res,
                            std::optional<std::pair<double, std::string>> blow) {
      write_output(opt, "trajectory.csv", trajectory_csv(res));
      write_output(opt, "diagnostics.csv", diagnostics_csv(res));
      j["dt"] = res.dt;
      j["steps"] = res.steps;
      j["frames"] = res.frames.size();
      if (blow) {
        Json b;
        b["time"] = blow->first;
        b["message"] = blow->second;
        j["blow_up"] = std::move(b);
      } else {
        j["blow_up"] = nullptr;
      }
      const std::string text = dump(j);
      write_output(opt, "simulation.json", text);
      out << text;
    };

    try {
      const SimulationResult res = simulate(setup, init, sim);
      finish(res, std::nullopt);
      return 0;
    } catch (const SimulationBlowUp& e) {
      finish(e.partial(), std::make_pair(e.time(), std::string(e.what())));
      err << "error: " << e.what() << "\n";
      return exit_code(e);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code(e);
  }
}

}  // namespace whitmod
