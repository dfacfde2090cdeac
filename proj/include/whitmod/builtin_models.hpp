#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <json.hpp>
#include <optional>
#include <string>
#include <utility>

#include "whitmod/errors.hpp"
#include "whitmod/model.hpp"

namespace whitmod {

using Json = nlohmann::ordered_json;

// Two coupled NLS components: i psi_j,t + alpha_j psi_j,xx +
// (sum_l beta_jl |psi_l|^2) psi_j = 0 with a symmetric interaction matrix.
struct CnlsParams {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  double beta11 = 0.0;
  double beta12 = 0.0;
  double beta22 = 0.0;

  double beta_det() const { return beta11 * beta22 - beta12 * beta12; }
  Eigen::Vector2d alpha() const { return {alpha1, alpha2}; }
  Eigen::Matrix2d beta() const {
    Eigen::Matrix2d b;
    b << beta11, beta12, beta12, beta22;
    return b;
  }
  Eigen::Matrix2d beta_inverse() const {
    const double d = beta_det();
    Eigen::Matrix2d inv;
    inv << beta22 / d, -beta12 / d, -beta12 / d, beta11 / d;
    return inv;
  }
};

inline void validate(const CnlsParams& p) {
  const double scale = p.beta11 * p.beta11 + 2.0 * p.beta12 * p.beta12 +
                       p.beta22 * p.beta22;
  if (std::abs(p.beta_det()) <= 1e-14 * (1.0 + scale)) {
    throw ConfigError("cnls: interaction matrix beta must be invertible");
  }
}

namespace detail {

// m_j = omega_j + alpha_j k_j^2; squared amplitudes are beta^{-1} m.
inline Eigen::Vector2d cnls_m(const CnlsParams& p, const Eigen::VectorXd& omega,
                              const Eigen::VectorXd& k) {
  return {omega[0] + p.alpha1 * k[0] * k[0], omega[1] + p.alpha2 * k[1] * k[1]};
}

inline Eigen::Vector2d cnls_amp_vector(const CnlsParams& p,
                                       const Eigen::VectorXd& omega,
                                       const Eigen::VectorXd& k) {
  return p.beta_inverse() * cnls_m(p, omega, k);
}

}  // namespace detail

// Squared plane-wave amplitudes (|Psi_1|^2, |Psi_2|^2) carried by (omega, k).
inline std::pair<double, double> cnls_amplitudes(const CnlsParams& p,
                                                 const Eigen::VectorXd& omega,
                                                 const Eigen::VectorXd& k) {
  validate(p);
  const Eigen::Vector2d a = detail::cnls_amp_vector(p, omega, k);
  if (!(a[0] > 0.0) || !(a[1] > 0.0)) {
    throw NonexistentWavetrain(
        "cnls: squared amplitudes (" + std::to_string(a[0]) + ", " +
        std::to_string(a[1]) + ") are not both positive at this (omega, k)");
  }
  return {a[0], a[1]};
}

// Closed-form coefficients of det E(c) = c0 c^4 + c1 c^3 + c2 c^2 + c3 c + c4,
// returned in descending powers to match determinant_coefficients.
inline std::array<double, 5> cnls_quartic_coefficients(
    const CnlsParams& p, const Eigen::VectorXd& omega, const Eigen::VectorXd& k) {
  const auto [a1, a2] = cnls_amplitudes(p, omega, k);
  const double b = p.beta_det();
  const double t1 = p.beta11 * a1 + 2.0 * p.alpha1 * k[0] * k[0];
  const double t2 = p.beta22 * a2 + 2.0 * p.alpha2 * k[1] * k[1];
  std::array<double, 5> c{};
  c[0] = 1.0 / (4.0 * b);
  c[1] = (p.alpha1 * k[0] + p.alpha2 * k[1]) / b;
  c[2] = (p.alpha1 * t1 + p.alpha2 * t2 +
          8.0 * p.alpha1 * p.alpha2 * k[0] * k[1]) /
         (2.0 * b);
  c[3] = 2.0 * p.alpha1 * p.alpha2 * (k[0] * t2 + k[1] * t1) / b;
  c[4] = p.alpha1 * p.alpha2 * (t1 * t2 - a1 * a2 * p.beta12 * p.beta12) / b;
  return c;
}

// Full modulation model: analytic action maps, Jacobians, Hessians, the
// averaged Lagrangian 1/4 m' beta^{-1} m, and a standing-wave dispersion hook.
inline ModulationModel cnls_model(const CnlsParams& p) {
  validate(p);
  const Eigen::Matrix2d binv = p.beta_inverse();
  const Eigen::Vector2d al = p.alpha();

  ModulationModel m;
  m.n_phases = 2;
  m.name = "cnls";
  m.lagrangian = [p, binv](const Eigen::VectorXd& w, const Eigen::VectorXd& k) {
    const Eigen::Vector2d mm = detail::cnls_m(p, w, k);
    return 0.25 * mm.dot(binv * mm);
  };
  m.domain_guard = [p](const Eigen::VectorXd& w, const Eigen::VectorXd& k) {
    const Eigen::Vector2d a = detail::cnls_amp_vector(p, w, k);
    return a[0] > 0.0 && a[1] > 0.0;
  };
  m.action_maps = [p, binv, al](const Eigen::VectorXd& w,
                                const Eigen::VectorXd& k) {
    const Eigen::Vector2d a = detail::cnls_amp_vector(p, w, k);
    Eigen::VectorXd action = 0.5 * a;
    Eigen::VectorXd flux(2);
    flux << al[0] * k[0] * a[0], al[1] * k[1] * a[1];
    return std::make_pair(action, flux);
  };
  m.analytic_jacobians = [binv, al](const Eigen::VectorXd& w,
                                    const Eigen::VectorXd& k) {
    Eigen::Matrix2d akdiag = Eigen::Matrix2d::Zero();
    akdiag(0, 0) = al[0] * k[0];
    akdiag(1, 1) = al[1] * k[1];
    Eigen::Vector2d m2(w[0] + al[0] * k[0] * k[0], w[1] + al[1] * k[1] * k[1]);
    const Eigen::Vector2d a = binv * m2;
    JacobianSet js;
    js.dwa = 0.5 * binv;
    js.dka = binv * akdiag;
    js.dwb = akdiag * binv;
    js.dkb = Eigen::Matrix2d(Eigen::Vector2d(al[0] * a[0], al[1] * a[1])
                                 .asDiagonal()) +
             2.0 * akdiag * binv * akdiag;
    return js;
  };
  m.action_hessians = [binv, al](const Eigen::VectorXd&,
                                 const Eigen::VectorXd& k) {
    ActionHessians h;
    for (int i = 0; i < 2; ++i) {
      Eigen::MatrixXd ha = Eigen::MatrixXd::Zero(4, 4);
      for (int j = 0; j < 2; ++j) ha(2 + j, 2 + j) = binv(i, j) * al[j];
      h.a_hess.push_back(ha);

      Eigen::MatrixXd hb = Eigen::MatrixXd::Zero(4, 4);
      for (int j = 0; j < 2; ++j) {
        hb(j, 2 + i) += al[i] * binv(i, j);
        hb(2 + i, j) += al[i] * binv(i, j);
      }
      for (int j = 0; j < 2; ++j) {
        for (int l = 0; l < 2; ++l) {
          double v = 0.0;
          if (i == j) v += 2.0 * al[i] * al[l] * k[l] * binv(i, l);
          if (j == l) v += 2.0 * al[i] * al[j] * binv(i, j) * k[i];
          if (i == l) v += 2.0 * al[i] * al[j] * binv(i, j) * k[j];
          hb(2 + j, 2 + l) += v;
        }
      }
      h.b_hess.push_back(0.5 * (hb + hb.transpose()));
    }
    return h;
  };
  m.dispersion_hook = [p](const DispersionContext& ctx) -> std::optional<double> {
    // Closed form only at standing waves (k = 0); travelling-wave dispersion
    // would need the full operator chain, which has no closed form here.
    if (ctx.k.norm() > 1e-9 * (1.0 + ctx.omega.norm())) return std::nullopt;
    const auto [a1, a2] =
        cnls_amplitudes(p, ctx.omega, Eigen::Vector2d::Zero().eval());
    const double x = p.alpha1 * p.beta11 * a1;
    const double y = p.alpha2 * p.beta22 * a2;
    if (std::abs(x - y) <= 1e-12 * (1.0 + std::abs(x) + std::abs(y))) {
      throw DegenerateCoefficient(
          "curly_k", "cnls standing wave: dispersion denominator x - y "
                     "vanishes; coefficient is not defined here");
    }
    const double k_tilde =
        (p.alpha2 * a1 - p.alpha1 * a2) / (4.0 * a1 * a2 * (x - y));
    const double cg_sq = ctx.c_g * ctx.c_g;
    if (cg_sq <= 0.0) {
      throw DegenerateDenominator(
          "cnls dispersion hook: group velocity vanishes");
    }
    return ctx.mu * k_tilde / cg_sq;
  };
  return m;
}

// A standing-wave point where two characteristics coalesce, with every
// reduction coefficient in closed form. mu_tilde, kappa_tilde, K_tilde are
// the time-derivative, nonlinear, and dispersive coefficients of the reduced
// two-way Boussinesq equation once the shared factor mu / cg_sq is divided
// out: kappa / mu = kappa_tilde / cg_sq and K / mu = K_tilde / cg_sq.
struct StandingWaveCoalescence {
  double amp1_sq = 0.0;
  double amp2_sq = 0.0;
  double cg_sq = 0.0;
  int branch = +1;
  Eigen::Vector2d omega{0.0, 0.0};  // standing-wave frequencies (k = 0)
  Eigen::Vector2d zeta{0.0, 0.0};
  Eigen::Vector2d gamma{0.0, 0.0};
  double kappa0 = 0.0;  // shared scale 4 beta_det * zeta_2
  double mu = 0.0;      // termination coefficient, 2 cg_sq * zeta_2
  double mu_tilde = 0.0;
  double kappa_tilde = 0.0;
  double K_tilde = 0.0;
};

// Solves the coalescence line for amp2_sq given amp1_sq and a branch sign,
// then evaluates the closed-form Jordan chain and reduction coefficients.
inline StandingWaveCoalescence cnls_standing_coalescence(const CnlsParams& p,
                                                         double amp1_sq,
                                                         int branch) {
  validate(p);
  const double b = p.beta_det();
  if (!(b < 0.0) || !(p.alpha1 * p.alpha2 < 0.0)) {
    throw ConfigError(
        "cnls standing coalescence requires beta_det < 0 and "
        "alpha1 * alpha2 < 0 for real group velocities");
  }
  if (!(amp1_sq > 0.0)) {
    throw ConfigError("cnls standing coalescence: amp1_sq must be positive");
  }
  if (branch != +1 && branch != -1) {
    throw ConfigError("cnls standing coalescence: branch must be +1 or -1");
  }

  const double ratio =
      p.alpha1 *
      (p.beta11 * p.beta22 - 2.0 * p.beta12 * p.beta12 +
       branch * 2.0 * std::abs(p.beta12) * std::sqrt(-b)) /
      (p.alpha2 * p.beta22 * p.beta22);
  const double amp2_sq = ratio * amp1_sq;
  if (!(amp2_sq > 0.0)) {
    throw InvalidBranch("cnls standing coalescence: branch " +
                        std::to_string(branch) +
                        " gives nonpositive amp2_sq = " +
                        std::to_string(amp2_sq));
  }

  const double x = p.alpha1 * p.beta11 * amp1_sq;
  const double y = p.alpha2 * p.beta22 * amp2_sq;
  const double cg_sq = -x - y;
  if (!(cg_sq > 0.0)) {
    throw EllipticSide(
        "cnls standing coalescence: cg_sq = " + std::to_string(cg_sq) +
        " is not positive; the double root is not real here");
  }
  // On the coalescence line the biquadratic discriminant vanishes.
  const double disc = (x + y) * (x + y) -
                      4.0 * b * p.alpha1 * p.alpha2 * amp1_sq * amp2_sq;
  const double disc_scale =
      (x + y) * (x + y) +
      std::abs(4.0 * b * p.alpha1 * p.alpha2 * amp1_sq * amp2_sq) + 1.0;
  if (std::abs(disc) > 1e-10 * disc_scale) {
    throw NumericalError(
        "cnls standing coalescence: discriminant did not vanish (residual " +
        std::to_string(disc) + ")");
  }

  const double c_g = std::sqrt(cg_sq);
  StandingWaveCoalescence sc;
  sc.amp1_sq = amp1_sq;
  sc.amp2_sq = amp2_sq;
  sc.cg_sq = cg_sq;
  sc.branch = branch;
  sc.omega = p.beta() * Eigen::Vector2d(amp1_sq, amp2_sq);
  sc.zeta = {cg_sq * p.beta12, p.beta22 * cg_sq + 2.0 * p.alpha1 * b * amp1_sq};
  if (std::abs(sc.zeta[1]) <=
      1e-14 * (1.0 + cg_sq * std::abs(p.beta22) +
               2.0 * std::abs(p.alpha1 * b * amp1_sq))) {
    throw DegenerateDenominator(
        "cnls standing coalescence: zeta_2 vanishes, generalized eigenvector "
        "formula degenerates");
  }
  sc.gamma = {4.0 * b * c_g * p.alpha1 * p.beta12 * amp1_sq / sc.zeta[1], 0.0};
  sc.kappa0 = 4.0 * b * sc.zeta[1];
  sc.mu = 2.0 * cg_sq * sc.zeta[1];
  sc.mu_tilde = cg_sq;
  sc.kappa_tilde = -(3.0 * c_g * cg_sq / (4.0 * amp2_sq)) * (x - y) *
                   (x - y + 2.0 * p.alpha1 * p.beta12 * amp2_sq);
  sc.K_tilde = (p.alpha2 * amp1_sq - p.alpha1 * amp2_sq) /
               (4.0 * amp1_sq * amp2_sq * (x - y));
  return sc;
}

// Shallow water as a one-phase model: L = -(omega + k^2/2)^2 / (2g) with
// depth h = -(omega + k^2/2)/g > 0, so A = h and B = h k. The dispersive
// surface-tension-like term sigma is accepted for config compatibility but
// does not enter the dispersionless averaged Lagrangian, so it is ignored.
inline ModulationModel shallow_water_model(double g, double sigma = 0.0) {
  if (!(g > 0.0)) throw ConfigError("shallow_water: g must be positive");
  (void)sigma;

  ModulationModel m;
  m.n_phases = 1;
  m.name = "shallow_water";
  m.lagrangian = [g](const Eigen::VectorXd& w, const Eigen::VectorXd& k) {
    const double s = w[0] + 0.5 * k[0] * k[0];
    return -s * s / (2.0 * g);
  };
  m.domain_guard = [](const Eigen::VectorXd& w, const Eigen::VectorXd& k) {
    return w[0] + 0.5 * k[0] * k[0] < 0.0;
  };
  m.action_maps = [g](const Eigen::VectorXd& w, const Eigen::VectorXd& k) {
    const double h = -(w[0] + 0.5 * k[0] * k[0]) / g;
    Eigen::VectorXd a(1), b(1);
    a << h;
    b << h * k[0];
    return std::make_pair(a, b);
  };
  m.analytic_jacobians = [g](const Eigen::VectorXd& w,
                             const Eigen::VectorXd& k) {
    const double h = -(w[0] + 0.5 * k[0] * k[0]) / g;
    JacobianSet js;
    js.dwa.resize(1, 1);
    js.dka.resize(1, 1);
    js.dwb.resize(1, 1);
    js.dkb.resize(1, 1);
    js.dwa << -1.0 / g;
    js.dka << -k[0] / g;
    js.dwb << -k[0] / g;
    js.dkb << h - k[0] * k[0] / g;
    return js;
  };
  m.action_hessians = [g](const Eigen::VectorXd&, const Eigen::VectorXd& k) {
    ActionHessians h;
    Eigen::MatrixXd ha = Eigen::MatrixXd::Zero(2, 2);
    ha(1, 1) = -1.0 / g;
    h.a_hess.push_back(ha);
    Eigen::MatrixXd hb = Eigen::MatrixXd::Zero(2, 2);
    hb(0, 1) = -1.0 / g;
    hb(1, 0) = -1.0 / g;
    hb(1, 1) = -3.0 * k[0] / g;
    h.b_hess.push_back(hb);
    return h;
  };
  return m;
}

namespace detail {

inline void reject_unknown_keys(const Json& cfg,
                                std::initializer_list<const char*> allowed) {
  for (const auto& item : cfg.items()) {
    bool ok = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        ok = true;
        break;
      }
    }
    if (!ok) {
      throw ConfigError("unknown model parameter '" + item.key() + "'");
    }
  }
}

}  // namespace detail

// Builds a registered model from its JSON parameter table. Recognized names:
//   { "model": "cnls", "alpha": [a1, a2], "beta": [[b11, b12], [b12, b22]] }
//   { "model": "shallow_water", "g": 9.81, "sigma": 0.0 }
inline ModulationModel make_model(const Json& cfg) {
  if (!cfg.is_object() || !cfg.contains("model")) {
    throw ConfigError("model table must contain a 'model' name");
  }
  const std::string name = cfg.at("model").get<std::string>();
  if (name == "cnls") {
    detail::reject_unknown_keys(cfg, {"model", "alpha", "beta"});
    if (!cfg.contains("alpha") || !cfg.contains("beta")) {
      throw ConfigError("cnls model requires 'alpha' and 'beta'");
    }
    const Json& alpha = cfg.at("alpha");
    const Json& beta = cfg.at("beta");
    if (!alpha.is_array() || alpha.size() != 2) {
      throw ConfigError("cnls 'alpha' must be an array of 2 numbers");
    }
    if (!beta.is_array() || beta.size() != 2 || !beta[0].is_array() ||
        beta[0].size() != 2 || !beta[1].is_array() || beta[1].size() != 2) {
      throw ConfigError("cnls 'beta' must be a 2x2 nested array");
    }
    CnlsParams p;
    p.alpha1 = alpha[0].get<double>();
    p.alpha2 = alpha[1].get<double>();
    p.beta11 = beta[0][0].get<double>();
    p.beta12 = beta[0][1].get<double>();
    p.beta22 = beta[1][1].get<double>();
    const double b21 = beta[1][0].get<double>();
    if (std::abs(b21 - p.beta12) >
        1e-12 * (1.0 + std::abs(b21) + std::abs(p.beta12))) {
      throw ConfigError("cnls 'beta' must be symmetric (beta[0][1] != beta[1][0])");
    }
    return cnls_model(p);
  }
  if (name == "shallow_water") {
    detail::reject_unknown_keys(cfg, {"model", "g", "sigma"});
    if (!cfg.contains("g")) {
      throw ConfigError("shallow_water model requires 'g'");
    }
    const double g = cfg.at("g").get<double>();
    const double sigma = cfg.contains("sigma") ? cfg.at("sigma").get<double>() : 0.0;
    return shallow_water_model(g, sigma);
  }
  throw ConfigError("unknown model '" + name +
                    "' (registered: cnls, shallow_water)");
}

}  // namespace whitmod
