#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <string>
#include <unsupported/Eigen/FFT>
#include <utility>
#include <vector>

#include "whitmod/errors.hpp"

namespace whitmod {

// ---------------------------------------------------------------------------
// Normalization of the two-way Boussinesq equation
//
//   mu U_TT + nu U_XX + kappa (U U_X)_X + K U_XXXX = 0
//
// Rescaling tau = a T, xi = b X, U = rho_signed u brings the coefficients to
// (1, s1, 1, s2) with s1 = sign(mu nu), s2 = sign(mu K).  rho is reported
// positive; when mu kappa < 0 the field itself must flip sign (flip_u).
// ---------------------------------------------------------------------------

enum class BoussinesqClass {
  HyperbolicAllK,         // s1 = -1, s2 = +1: stable for every wavenumber
  FiniteBandInstability,  // s1 = -1, s2 = -1: unstable for khat^2 > 1
  CutoffRestabilized,     // s1 = +1, s2 = +1: unstable for 0 < khat^2 < 1
  AllKUnstable,           // s1 = +1, s2 = -1: unstable for every khat != 0
};

inline const char* to_string(BoussinesqClass c) {
  switch (c) {
    case BoussinesqClass::HyperbolicAllK: return "hyperbolic_all_k";
    case BoussinesqClass::FiniteBandInstability: return "finite_band_instability";
    case BoussinesqClass::CutoffRestabilized: return "cutoff_restabilized";
    case BoussinesqClass::AllKUnstable: return "all_k_unstable";
  }
  return "unknown";
}

// omega_hat^2 for the normalized equation at wavenumber khat.
inline double dispersion_omega_squared(int s1, int s2, double khat) {
  const double kk = khat * khat;
  return -s1 * kk + s2 * kk * kk;
}

struct StabilityBand {
  double ksq_lo = 0.0;  // unstable exactly for ksq_lo < khat^2 < ksq_hi
  double ksq_hi = 0.0;
};

struct DispersionClassification {
  BoussinesqClass kind = BoussinesqClass::HyperbolicAllK;
  std::optional<StabilityBand> unstable;  // empty: stable at every wavenumber
};

inline DispersionClassification classify_dispersion(int s1, int s2) {
  if (std::abs(s1) != 1 || std::abs(s2) != 1) {
    throw ConfigError("classify_dispersion: s1 and s2 must be +1 or -1");
  }
  const double inf = std::numeric_limits<double>::infinity();
  DispersionClassification out;
  if (s1 == -1 && s2 == +1) {
    out.kind = BoussinesqClass::HyperbolicAllK;
  } else if (s1 == -1 && s2 == -1) {
    out.kind = BoussinesqClass::FiniteBandInstability;
    out.unstable = StabilityBand{1.0, inf};
  } else if (s1 == +1 && s2 == +1) {
    out.kind = BoussinesqClass::CutoffRestabilized;
    out.unstable = StabilityBand{0.0, 1.0};
  } else {
    out.kind = BoussinesqClass::AllKUnstable;
    out.unstable = StabilityBand{0.0, inf};
  }
  return out;
}

struct BoussinesqSetup {
  double mu = 0.0;  // original coefficients, kept for round-tripping
  double nu = 0.0;
  double kappa = 0.0;
  double K = 0.0;
  int s1 = 0;
  int s2 = 0;
  double scale_t = 0.0;  // a: tau = a T
  double scale_x = 0.0;  // b: xi = b X
  double scale_u = 0.0;  // rho: |U| = rho |u|
  bool flip_u = false;   // U = -rho u (needed exactly when mu kappa < 0)
  BoussinesqClass classification = BoussinesqClass::HyperbolicAllK;
};

inline BoussinesqSetup normalize(double mu, double nu, double kappa, double K) {
  const std::pair<const char*, double> named[] = {
      {"mu", mu}, {"nu", nu}, {"kappa", kappa}, {"K", K}};
  for (const auto& [name, value] : named) {
    if (!std::isfinite(value)) {
      throw ConfigError(std::string("normalize: coefficient ") + name +
                        " is not finite");
    }
    if (value == 0.0) {
      throw DegenerateCoefficient(
          name, std::string("normalize: coefficient ") + name +
                    " vanished; the reduction is higher order there");
    }
  }
  BoussinesqSetup s;
  s.mu = mu;
  s.nu = nu;
  s.kappa = kappa;
  s.K = K;
  s.s1 = mu * nu > 0.0 ? +1 : -1;
  s.s2 = mu * K > 0.0 ? +1 : -1;
  s.scale_x = std::sqrt(std::abs(nu) / std::abs(K));
  s.scale_t = s.scale_x * std::sqrt(std::abs(nu) / std::abs(mu));
  s.scale_u = std::abs(nu) / std::abs(kappa);
  s.flip_u = mu * kappa < 0.0;
  s.classification = classify_dispersion(s.s1, s.s2).kind;
  return s;
}

// The four coefficients after applying the stored scalings, in the order
// (mu, nu, kappa, K).  Equals (1, s1, 1, s2) up to rounding.
inline std::array<double, 4> normalized_coefficients(const BoussinesqSetup& s) {
  const double rho = s.flip_u ? -s.scale_u : s.scale_u;
  const double a2 = s.scale_t * s.scale_t;
  const double b2 = s.scale_x * s.scale_x;
  const double overall = s.mu * rho * a2;
  return {s.mu * rho * a2 / overall, s.nu * rho * b2 / overall,
          s.kappa * rho * rho * b2 / overall, s.K * rho * b2 * b2 / overall};
}

// Inverse transform: rebuild the physical coefficients from the signs and
// scalings alone (the overall factor is fixed by the stored mu).
inline std::array<double, 4> denormalize(const BoussinesqSetup& s) {
  const double rho = s.flip_u ? -s.scale_u : s.scale_u;
  const double a2 = s.scale_t * s.scale_t;
  const double b2 = s.scale_x * s.scale_x;
  const double overall = s.mu * rho * a2;
  return {overall / (rho * a2), overall * s.s1 / (rho * b2),
          overall / (rho * rho * b2), overall * s.s2 / (rho * b2 * b2)};
}

// ---------------------------------------------------------------------------
// Discrete fields on a periodic grid
// ---------------------------------------------------------------------------

struct FieldState {
  double length = 0.0;  // periodic domain [0, length)
  Eigen::VectorXd u;
  Eigen::VectorXd u_t;
  double time = 0.0;
  int size() const { return static_cast<int>(u.size()); }
};

inline bool is_power_of_two(int m) { return m > 0 && (m & (m - 1)) == 0; }

inline Eigen::VectorXd grid_points(double length, int m) {
  if (length <= 0.0) throw ConfigError("grid_points: length must be positive");
  if (!is_power_of_two(m)) {
    throw ConfigError("grid_points: grid size must be a power of two");
  }
  Eigen::VectorXd xi(m);
  for (int j = 0; j < m; ++j) xi[j] = length * j / m;
  return xi;
}

namespace detail {

inline void check_field(const FieldState& state, const char* where) {
  const int m = state.size();
  if (!is_power_of_two(m) || m < 8) {
    throw ConfigError(std::string(where) +
                      ": grid size must be a power of two >= 8");
  }
  if (state.u_t.size() != m) {
    throw ConfigError(std::string(where) + ": u and u_t sizes differ");
  }
  if (state.length <= 0.0) {
    throw ConfigError(std::string(where) + ": domain length must be positive");
  }
}

// Signed integer wavenumber index for bin j of an m-point transform.
inline int signed_index(int j, int m) { return j <= m / 2 ? j : j - m; }

}  // namespace detail

// Spectral derivative of given order on the periodic grid.  The odd-order
// Nyquist mode has no well-defined sign and is zeroed.
inline Eigen::VectorXd spectral_derivative(const Eigen::VectorXd& u,
                                           double length, int order) {
  const int m = static_cast<int>(u.size());
  if (!is_power_of_two(m)) {
    throw ConfigError("spectral_derivative: grid size must be a power of two");
  }
  if (length <= 0.0 || order < 1) {
    throw ConfigError("spectral_derivative: need length > 0 and order >= 1");
  }
  Eigen::FFT<double> fft;
  Eigen::VectorXcd uhat;
  Eigen::VectorXd in = u;
  fft.fwd(uhat, in);
  const double base = 2.0 * M_PI / length;
  for (int j = 0; j < m; ++j) {
    const int sj = detail::signed_index(j, m);
    if (order % 2 == 1 && j == m / 2) {
      uhat[j] = 0.0;
      continue;
    }
    const std::complex<double> ik(0.0, base * sj);
    uhat[j] *= std::pow(ik, order);
  }
  Eigen::VectorXd out;
  fft.inv(out, uhat);
  return out;
}

// ---------------------------------------------------------------------------
// Solitary waves of the normalized equation
//
// The travelling ansatz u = uhat(xi - gamma tau) reduces, after integrating
// twice with zero constants, to  s2 uhat'' + (s1 + gamma^2) uhat + uhat^2/2
// = 0, solved by uhat = -3 p sech^2(W xi), p = s1 + gamma^2, W =
// sqrt(-p/(4 s2)), which requires p/s2 < 0.
// ---------------------------------------------------------------------------

inline FieldState solitary_wave(int s1, int s2, double gamma, double length,
                                int m) {
  if (std::abs(s1) != 1 || std::abs(s2) != 1) {
    throw ConfigError("solitary_wave: s1 and s2 must be +1 or -1");
  }
  const double p = s1 + gamma * gamma;
  if (p / s2 >= 0.0) {
    throw NoSolitaryWave(
        "solitary_wave: (s1 + gamma^2)/s2 = " + std::to_string(p / s2) +
        " is not negative; no localized profile exists");
  }
  const Eigen::VectorXd xi = grid_points(length, m);
  const double w = std::sqrt(-p / (4.0 * s2));
  FieldState state;
  state.length = length;
  state.u.resize(m);
  state.u_t.resize(m);
  for (int j = 0; j < m; ++j) {
    const double z = w * (xi[j] - 0.5 * length);
    const double sech = 1.0 / std::cosh(z);
    const double profile = -3.0 * p * sech * sech;
    state.u[j] = profile;
    // d/dxi of -3p sech^2 is 6 p W sech^2 tanh; u_t = -gamma d(u)/dxi moves
    // the crest toward +xi for gamma > 0.
    state.u_t[j] = -gamma * 6.0 * p * w * sech * sech * std::tanh(z);
  }
  state.time = 0.0;
  return state;
}

// ---------------------------------------------------------------------------
// Conserved diagnostics
// ---------------------------------------------------------------------------

struct ConservedQuantities {
  double mass = 0.0;       // integral of u over the period
  double flux_mean = 0.0;  // integral of u_t; exactly conserved by the flow
};

inline ConservedQuantities conserved_quantities(const FieldState& state) {
  detail::check_field(state, "conserved_quantities");
  const double dxi = state.length / state.size();
  return {state.u.sum() * dxi, state.u_t.sum() * dxi};
}

// ---------------------------------------------------------------------------
// Pseudo-spectral time integration of the normalized equation
//
//   u_tautau = -s1 u_xixi - (u^2/2)_xixi - s2 u_xixixixi
//
// as the first-order system (u, v = u_tau), classical RK4 in time, 2/3-rule
// dealiasing of the quadratic term.
// ---------------------------------------------------------------------------

struct SimulateOptions {
  double dt = 0.0;     // <= 0: use the stability bound
  double t_end = 0.0;  // required positive
  bool dealias = true;
  double cfl = 0.2;           // C in dt <= C dxi^2 / max(1, sqrt|s2|)
  double filter_alpha = 0.0;  // exponential high-mode filter; 0 disables
  int filter_order = 8;
  int sample_stride = 0;  // 0: max(1, steps/200)
  double blowup_threshold = 1e6;
};

struct TrajectoryDiagnostics {
  double time = 0.0;
  double mass = 0.0;
  double flux_mean = 0.0;
  double max_abs_u = 0.0;
};

struct SimulationResult {
  std::vector<FieldState> frames;
  std::vector<TrajectoryDiagnostics> diagnostics;
  double dt = 0.0;
  int steps = 0;
};

class SimulationBlowUp : public BlowUpError {
 public:
  SimulationBlowUp(double time, std::string m, SimulationResult partial)
      : BlowUpError(time, std::move(m)), partial_(std::move(partial)) {}
  const SimulationResult& partial() const { return partial_; }

 private:
  SimulationResult partial_;
};

inline SimulationResult simulate(const BoussinesqSetup& setup,
                                 const FieldState& init,
                                 const SimulateOptions& opts) {
  if (std::abs(setup.s1) != 1 || std::abs(setup.s2) != 1) {
    throw ConfigError("simulate: setup is not normalized (s1, s2 must be +-1)");
  }
  detail::check_field(init, "simulate");
  if (!init.u.allFinite() || !init.u_t.allFinite()) {
    throw ConfigError("simulate: initial data must be finite");
  }
  if (opts.t_end <= 0.0) throw ConfigError("simulate: t_end must be positive");
  if (opts.cfl <= 0.0) throw ConfigError("simulate: cfl must be positive");

  const int m = init.size();
  const double dxi = init.length / m;
  const double bound =
      opts.cfl * dxi * dxi / std::max(1.0, std::sqrt(std::abs(double(setup.s2))));
  double dt = opts.dt;
  if (dt <= 0.0) {
    dt = bound;
  } else if (dt > bound * (1.0 + 1e-12)) {
    throw UnstableStep("simulate: dt = " + std::to_string(dt) +
                       " exceeds the stability bound " + std::to_string(bound));
  }
  const int steps =
      std::max(1, static_cast<int>(std::ceil(opts.t_end / dt - 1e-9)));
  dt = opts.t_end / steps;  // land exactly on t_end; only shrinks dt

  // Wavenumber tables and the 2/3-rule mask.
  const double base = 2.0 * M_PI / init.length;
  Eigen::VectorXd lin(m), quad(m);
  std::vector<bool> masked(m, false);
  for (int j = 0; j < m; ++j) {
    const double k = base * detail::signed_index(j, m);
    const double k2 = k * k;
    lin[j] = setup.s1 * k2 - setup.s2 * k2 * k2;
    quad[j] = k2;
    masked[j] = 3 * std::abs(detail::signed_index(j, m)) > m;
  }
  Eigen::VectorXd filter;
  if (opts.filter_alpha > 0.0) {
    filter.resize(m);
    const double kmax = base * (m / 2);
    for (int j = 0; j < m; ++j) {
      const double k = std::abs(base * detail::signed_index(j, m));
      filter[j] = std::exp(-opts.filter_alpha *
                           std::pow(k / kmax, opts.filter_order));
    }
  }

  Eigen::FFT<double> fft;
  Eigen::VectorXcd uhat(m), what(m);
  Eigen::VectorXd work(m);
  // v_tau in spectral form: (s1 k^2 - s2 k^4) uhat + k^2 (u^2/2)^hat.
  const auto accel = [&](const Eigen::VectorXd& u) {
    fft.fwd(uhat, u);
    work = 0.5 * u.array().square();
    fft.fwd(what, work);
    if (opts.dealias) {
      for (int j = 0; j < m; ++j) {
        if (masked[j]) what[j] = 0.0;
      }
    }
    for (int j = 0; j < m; ++j) {
      uhat[j] = lin[j] * uhat[j] + quad[j] * what[j];
    }
    Eigen::VectorXd out;
    fft.inv(out, uhat);
    return out;
  };
  const auto apply_filter = [&](Eigen::VectorXd& f) {
    fft.fwd(uhat, f);
    for (int j = 0; j < m; ++j) uhat[j] *= filter[j];
    fft.inv(f, uhat);
  };

  const int stride = opts.sample_stride > 0 ? opts.sample_stride
                                            : std::max(1, steps / 200);
  SimulationResult result;
  result.dt = dt;
  result.steps = steps;
  const auto record = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                          double t) {
    FieldState s;
    s.length = init.length;
    s.u = u;
    s.u_t = v;
    s.time = t;
    const ConservedQuantities q = conserved_quantities(s);
    result.diagnostics.push_back(
        {t, q.mass, q.flux_mean, u.cwiseAbs().maxCoeff()});
    result.frames.push_back(std::move(s));
  };

  Eigen::VectorXd u = init.u, v = init.u_t;
  record(u, v, init.time);
  for (int step = 1; step <= steps; ++step) {
    const Eigen::VectorXd a1 = accel(u);
    const Eigen::VectorXd u2 = u + 0.5 * dt * v;
    const Eigen::VectorXd v2 = v + 0.5 * dt * a1;
    const Eigen::VectorXd a2 = accel(u2);
    const Eigen::VectorXd u3 = u + 0.5 * dt * v2;
    const Eigen::VectorXd v3 = v + 0.5 * dt * a2;
    const Eigen::VectorXd a3 = accel(u3);
    const Eigen::VectorXd u4 = u + dt * v3;
    const Eigen::VectorXd v4 = v + dt * a3;
    const Eigen::VectorXd a4 = accel(u4);
    u += dt / 6.0 * (v + 2.0 * v2 + 2.0 * v3 + v4);
    v += dt / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    if (opts.filter_alpha > 0.0) {
      apply_filter(u);
      apply_filter(v);
    }
    const double t = init.time + step * dt;
    const bool finite = u.allFinite() && v.allFinite();
    if (!finite || u.cwiseAbs().maxCoeff() > opts.blowup_threshold) {
      throw SimulationBlowUp(
          t, "simulate: blow-up at t = " + std::to_string(t) +
                 (finite ? " (amplitude exceeded threshold)"
                         : " (non-finite values)"),
          std::move(result));
    }
    if (step % stride == 0 || step == steps) record(u, v, t);
  }
  return result;
}

}  // namespace whitmod
