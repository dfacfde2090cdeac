#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "whitmod/errors.hpp"
#include "whitmod/model.hpp"
#include "whitmod/pencil.hpp"

namespace whitmod {

// A one-parameter curve p in [0,1] -> (omega(p), k(p)).
using ParameterPath =
    std::function<std::pair<Eigen::VectorXd, Eigen::VectorXd>(double)>;

struct CoalescenceDiagnostics {
  double delta = 0.0;
  double delta_prime = 0.0;
  double delta_second = 0.0;
  double chain_residual = 0.0;
  // Sign characteristics of the two merging roots at the last sample before
  // the collision; (0, 0) when the point was not produced by a scan.
  std::pair<int, int> sign_pair_before{0, 0};
};

struct CoalescencePoint {
  Eigen::VectorXd omega, k;
  double path_param = 0.0;
  double c_g = 0.0;
  Eigen::VectorXd zeta;   // unit kernel vector, deterministic orientation
  Eigen::VectorXd gamma;  // generalized eigenvector, perpendicular to zeta
  double mu = 0.0;
  double kappa = 0.0;
  std::optional<double> K_disp;
  std::optional<double> nu;
  CoalescenceDiagnostics diagnostics;
};

struct ScanRow {
  double p = 0.0;
  bool in_domain = true;
  std::vector<double> real_roots;  // ascending
  std::vector<int> sign_chars;     // parallel to real_roots; 0 when unset
};

struct ScanCandidate {
  double p_lo = 0.0;
  double p_hi = 0.0;
  double c_estimate = 0.0;
  std::pair<int, int> sign_pair{0, 0};
  std::string reason;  // "real_pair_lost" or "approach"
};

struct ScanResult {
  std::vector<ScanRow> rows;
  std::vector<ScanCandidate> candidates;
};

struct ScanOptions {
  // Adjacent opposite-sign roots closer than gap_threshold * (1 + |c|) are
  // flagged as an approach candidate.
  double gap_threshold = 0.1;
  PencilTolerances tol;
};

// Samples the characteristic roots along the path and flags cells where a
// collision may occur: either a real pair vanishes between samples
// (hyperbolic -> elliptic) or two opposite-sign roots draw close.
inline ScanResult scan_path(const ModulationModel& m, const ParameterPath& path,
                            int grid, const ScanOptions& opts = {}) {
  if (grid < 1) throw ConfigError("scan_path requires grid >= 1");
  if (!path) throw ConfigError("scan_path requires a path");

  ScanResult out;
  out.rows.reserve(grid + 1);
  for (int j = 0; j <= grid; ++j) {
    ScanRow row;
    row.p = static_cast<double>(j) / grid;
    const auto [w, k] = path(row.p);
    try {
      const QuadraticPencil pen = assemble_pencil(m, w, k, opts.tol);
      const auto roots = characteristics(pen, opts.tol);
      for (const auto& r : roots) {
        if (!r.is_real) continue;
        row.real_roots.push_back(r.value.real());
        row.sign_chars.push_back(r.sign_char.value_or(0));
      }
    } catch (const OutsideDomain&) {
      row.in_domain = false;
    }
    out.rows.push_back(std::move(row));
  }

  // Pass 1: real pairs that disappear between consecutive in-domain samples.
  for (size_t r = 1; r < out.rows.size(); ++r) {
    const ScanRow& prev = out.rows[r - 1];
    const ScanRow& cur = out.rows[r];
    if (!prev.in_domain || !cur.in_domain) continue;
    const int lost =
        static_cast<int>(prev.real_roots.size()) - static_cast<int>(cur.real_roots.size());
    if (lost < 2) continue;
    // Match each surviving root to its nearest predecessor; leftover
    // predecessors are the merged pairs.
    std::vector<bool> used(prev.real_roots.size(), false);
    for (double c : cur.real_roots) {
      int best = -1;
      double best_d = std::numeric_limits<double>::infinity();
      for (size_t i = 0; i < prev.real_roots.size(); ++i) {
        if (used[i]) continue;
        const double d = std::abs(prev.real_roots[i] - c);
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(i);
        }
      }
      if (best >= 0) used[best] = true;
    }
    std::vector<int> orphan;
    for (size_t i = 0; i < prev.real_roots.size(); ++i) {
      if (!used[i]) orphan.push_back(static_cast<int>(i));
    }
    // Orphans are ascending; consecutive ones merged with each other.
    for (size_t i = 0; i + 1 < orphan.size(); i += 2) {
      ScanCandidate cand;
      cand.p_lo = prev.p;
      cand.p_hi = cur.p;
      cand.c_estimate =
          0.5 * (prev.real_roots[orphan[i]] + prev.real_roots[orphan[i + 1]]);
      cand.sign_pair = {prev.sign_chars[orphan[i]], prev.sign_chars[orphan[i + 1]]};
      cand.reason = "real_pair_lost";
      out.candidates.push_back(std::move(cand));
    }
  }

  // Pass 2: adjacent roots drawing close without disappearing (flagged at the
  // locally minimal gap so a single approach yields a single candidate).
  auto min_adjacent_gap_near = [&](const ScanRow& row, double c) {
    double best = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i + 1 < row.real_roots.size(); ++i) {
      const double mid = 0.5 * (row.real_roots[i] + row.real_roots[i + 1]);
      if (std::abs(mid - c) > 0.5 * (1.0 + std::abs(c))) continue;
      best = std::min(best, row.real_roots[i + 1] - row.real_roots[i]);
    }
    return best;
  };
  for (size_t r = 0; r < out.rows.size(); ++r) {
    const ScanRow& row = out.rows[r];
    if (!row.in_domain) continue;
    for (size_t i = 0; i + 1 < row.real_roots.size(); ++i) {
      const double gap = row.real_roots[i + 1] - row.real_roots[i];
      const double mid = 0.5 * (row.real_roots[i] + row.real_roots[i + 1]);
      if (gap >= opts.gap_threshold * (1.0 + std::abs(mid))) continue;
      const double gap_before =
          r > 0 && out.rows[r - 1].in_domain
              ? min_adjacent_gap_near(out.rows[r - 1], mid)
              : std::numeric_limits<double>::infinity();
      const double gap_after =
          r + 1 < out.rows.size() && out.rows[r + 1].in_domain
              ? min_adjacent_gap_near(out.rows[r + 1], mid)
              : std::numeric_limits<double>::infinity();
      if (gap > gap_before || gap > gap_after) continue;
      // Skip if a lost-pair candidate already covers this neighborhood.
      bool covered = false;
      for (const auto& c : out.candidates) {
        if (c.reason == "real_pair_lost" && row.p >= c.p_lo - 1.0 / grid &&
            row.p <= c.p_hi + 1.0 / grid &&
            std::abs(c.c_estimate - mid) < 0.5 * (1.0 + std::abs(mid))) {
          covered = true;
          break;
        }
      }
      if (covered) continue;
      ScanCandidate cand;
      cand.p_lo = r > 0 ? out.rows[r - 1].p : row.p;
      cand.p_hi = r + 1 < out.rows.size() ? out.rows[r + 1].p : row.p;
      cand.c_estimate = mid;
      cand.sign_pair = {row.sign_chars[i], row.sign_chars[i + 1]};
      cand.reason = "approach";
      out.candidates.push_back(std::move(cand));
    }
  }
  std::sort(out.candidates.begin(), out.candidates.end(),
            [](const ScanCandidate& a, const ScanCandidate& b) {
              if (a.p_lo != b.p_lo) return a.p_lo < b.p_lo;
              return a.c_estimate < b.c_estimate;
            });
  return out;
}

struct RefineOptions {
  int max_iter = 50;
  double f_tol = 1e-10;              // ||F|| < f_tol * delta scale
  double delta_second_tol = 1e-6;    // smaller |Delta''| is a higher degeneracy
  PencilTolerances tol;
};

// Two-variable Newton iteration on F(c, p) = (Delta(c; p), dDelta/dc(c; p)).
// Fills the location, kernel vector, and determinant diagnostics; the chain
// and coefficients are added by analyze_coalescence.
inline CoalescencePoint refine_coalescence(const ModulationModel& m,
                                           const ParameterPath& path,
                                           double p_guess, double c_guess,
                                           const RefineOptions& opts = {},
                                           int* iterations_out = nullptr) {
  if (!path) throw ConfigError("refine_coalescence requires a path");

  auto pencil_at = [&](double p) {
    const auto [w, k] = path(p);
    return assemble_pencil(m, w, k, opts.tol);
  };

  const QuadraticPencil p0 = pencil_at(p_guess);
  const double scale = detail::delta_scale(p0, std::abs(c_guess) + 1.0);

  double c = c_guess, p = p_guess;
  QuadraticPencil pen = p0;
  Eigen::Vector2d f(determinant(pen, c), determinant_derivative(pen, c));
  int iters = 0;
  for (; iters < opts.max_iter; ++iters) {
    if (f.cwiseAbs().maxCoeff() < opts.f_tol * scale) break;

    const double hc = 1e-6 * (1.0 + std::abs(c));
    const double hp = 1e-6 * (1.0 + std::abs(p));
    QuadraticPencil pen_plus, pen_minus;
    try {
      pen_plus = pencil_at(p + hp);
      pen_minus = pencil_at(p - hp);
    } catch (const OutsideDomain&) {
      throw NoConvergence(
          "refine_coalescence: iteration reached the domain boundary at p = " +
          std::to_string(p));
    }
    Eigen::Matrix2d jac;
    jac(0, 0) = determinant_derivative(pen, c);
    jac(0, 1) = (determinant(pen_plus, c) - determinant(pen_minus, c)) / (2.0 * hp);
    jac(1, 0) = (determinant_derivative(pen, c + hc) -
                 determinant_derivative(pen, c - hc)) /
                (2.0 * hc);
    jac(1, 1) = (determinant_derivative(pen_plus, c) -
                 determinant_derivative(pen_minus, c)) /
                (2.0 * hp);
    if (std::abs(jac.determinant()) <
        1e-14 * (1.0 + jac.cwiseAbs().maxCoeff() * jac.cwiseAbs().maxCoeff())) {
      throw NoConvergence("refine_coalescence: singular Newton system at (c=" +
                          std::to_string(c) + ", p=" + std::to_string(p) + ")");
    }
    const Eigen::Vector2d step = jac.lu().solve(f);

    double lambda = 1.0;
    bool stepped = false;
    for (int bt = 0; bt < 12; ++bt, lambda *= 0.5) {
      const double c_try = c - lambda * step[0];
      const double p_try = p - lambda * step[1];
      try {
        const QuadraticPencil pen_try = pencil_at(p_try);
        const Eigen::Vector2d f_try(determinant(pen_try, c_try),
                                    determinant_derivative(pen_try, c_try));
        if (f_try.cwiseAbs().maxCoeff() <= f.cwiseAbs().maxCoeff() ||
            lambda <= 1.0 / 2048.0) {
          c = c_try;
          p = p_try;
          pen = pen_try;
          f = f_try;
          stepped = true;
          break;
        }
      } catch (const OutsideDomain&) {
        // try a shorter step
      }
    }
    if (!stepped) {
      throw NoConvergence(
          "refine_coalescence: no admissible step from (c=" + std::to_string(c) +
          ", p=" + std::to_string(p) + ")");
    }
  }
  if (f.cwiseAbs().maxCoeff() >= opts.f_tol * scale) {
    throw NoConvergence("refine_coalescence: " + std::to_string(opts.max_iter) +
                        " iterations without meeting tolerance (residual " +
                        std::to_string(f.cwiseAbs().maxCoeff()) + ")");
  }
  if (iterations_out) *iterations_out = iters;

  const double hc = 1e-6 * (1.0 + std::abs(c));
  const double delta_second =
      (determinant_derivative(pen, c + hc) - determinant_derivative(pen, c - hc)) /
      (2.0 * hc);
  if (std::abs(delta_second) <= opts.delta_second_tol * scale) {
    throw HigherDegeneracy(
        "refine_coalescence: |Delta''| = " + std::to_string(delta_second) +
        " is below tolerance; more than two characteristics collide here");
  }
  // A kernel of dimension >= 2 is likewise beyond the double-root theory.
  {
    const Eigen::MatrixXd e = evaluate_pencil(pen, c);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(e);
    const auto& sv = svd.singularValues();
    const int n = static_cast<int>(sv.size());
    if (n >= 2 && sv[n - 2] <= opts.tol.kernel_accept * sv[0]) {
      throw HigherDegeneracy(
          "refine_coalescence: kernel dimension >= 2 at the refined point");
    }
  }

  CoalescencePoint cp;
  const auto [w, k] = path(p);
  cp.omega = w;
  cp.k = k;
  cp.path_param = p;
  cp.c_g = c;
  cp.zeta = kernel_vector(pen, c, opts.tol);
  cp.diagnostics.delta = f[0];
  cp.diagnostics.delta_prime = f[1];
  cp.diagnostics.delta_second = delta_second;
  return cp;
}

// c_g = -<zeta, dka zeta> / <zeta, dwa zeta>, valid only where the pencil has
// a double root (it restates <zeta, E'(c_g) zeta> = 0).
inline double group_velocity_formula(const JacobianSet& js,
                                     const Eigen::VectorXd& zeta) {
  const double den = zeta.dot(js.dwa * zeta);
  const double num = zeta.dot(js.dka * zeta);
  if (std::abs(den) <=
      1e-12 * (1.0 + js.dwa.norm() * zeta.squaredNorm())) {
    throw DegenerateDenominator(
        "group_velocity_formula: <zeta, dwa zeta> vanishes (standing wave); "
        "use the refined root instead");
  }
  return -num / den;
}

// Generalized eigenvector: minimal-norm least-squares solution of
// E(c_g) gamma = -E'(c_g) zeta with the zeta-component projected out.
inline Eigen::VectorXd jordan_gamma(const QuadraticPencil& p, double c_g,
                                    const Eigen::VectorXd& zeta,
                                    const PencilTolerances& tol = {},
                                    double* residual_out = nullptr) {
  const Eigen::MatrixXd e = evaluate_pencil(p, c_g);
  const Eigen::MatrixXd ep = pencil_derivative(p, c_g, 1);
  const Eigen::VectorXd zhat = zeta.normalized();

  // Solvability: the right-hand side must be orthogonal to the kernel.
  const double solv = std::abs(zhat.dot(ep * zhat));
  if (solv > tol.degenerate_sign * (1.0 + ep.norm())) {
    throw NotSolvable(
        "jordan_gamma: <zeta, E' zeta> = " + std::to_string(solv) +
        " is nonzero; the root is simple and no chain of length two exists");
  }

  const Eigen::VectorXd rhs = -(ep * zeta);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(e, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = tol.kernel_accept * (sv.size() > 0 ? sv[0] : 0.0);
  Eigen::VectorXd inv_sv = Eigen::VectorXd::Zero(sv.size());
  for (int i = 0; i < sv.size(); ++i) {
    if (sv[i] > cutoff) inv_sv[i] = 1.0 / sv[i];
  }
  Eigen::VectorXd gamma =
      svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose() * rhs;
  gamma -= zhat.dot(gamma) * zhat;

  const double residual = (e * gamma - rhs).norm();
  if (residual_out) *residual_out = residual;
  if (residual > 1e-8 * (1.0 + rhs.norm())) {
    throw NotSolvable("jordan_gamma: projected residual " +
                      std::to_string(residual) +
                      " exceeds tolerance; zeta is not a Jordan root");
  }
  return gamma;
}

// Termination coefficient of the Jordan chain:
// mu = <zeta, E'(c_g) gamma> + 1/2 <zeta, E''(c_g) zeta>.
// The chain equation makes this equal to 1/2 <zeta, E'' zeta> - <gamma, E gamma>;
// both are computed and must agree.
inline double mu_coefficient(const QuadraticPencil& p, double c_g,
                             const Eigen::VectorXd& zeta,
                             const Eigen::VectorXd& gamma,
                             const PencilTolerances& tol = {}) {
  (void)tol;
  const Eigen::MatrixXd e = evaluate_pencil(p, c_g);
  const Eigen::MatrixXd ep = pencil_derivative(p, c_g, 1);
  const Eigen::MatrixXd epp = pencil_derivative(p, c_g, 2);

  const double quad = 0.5 * zeta.dot(epp * zeta);
  const double mu1 = zeta.dot(ep * gamma) + quad;
  const double mu2 = quad - gamma.dot(e * gamma);
  const double term_scale = std::abs(quad) + std::abs(zeta.dot(ep * gamma)) +
                            std::abs(gamma.dot(e * gamma));
  if (std::abs(mu1 - mu2) > 1e-8 * (1.0 + term_scale)) {
    throw NumericalError(
        "mu_coefficient: the two equivalent formulas disagree (" +
        std::to_string(mu1) + " vs " + std::to_string(mu2) +
        "); the chain input is inconsistent");
  }
  const double mu_scale =
      1.0 + ep.norm() * zeta.norm() * (zeta.norm() + gamma.norm());
  if (std::abs(mu1) < 1e-10 * mu_scale) {
    throw ChainTerminationFailure(
        "mu_coefficient: mu = " + std::to_string(mu1) +
        " vanishes; the Jordan chain does not terminate at length two");
  }
  return mu1;
}

// Nonlinear coefficient: third directional derivative of the averaged
// Lagrangian along (c_g zeta, zeta). When the model exposes action Hessians
// the tensor assembly sum_i [c_g zeta_i d'HA_i d + zeta_i d'HB_i d] with
// d = (c_g zeta; zeta) must agree with the stencil value.
inline double kappa_coefficient(const ModulationModel& m,
                                const Eigen::VectorXd& omega,
                                const Eigen::VectorXd& k, double c_g,
                                const Eigen::VectorXd& zeta) {
  const Eigen::VectorXd dw = c_g * zeta;
  const double fd = directional_lagrangian_derivative(m, omega, k, dw, zeta, 3);
  if (m.action_hessians) {
    const ActionHessians h = m.action_hessians(omega, k);
    const int n = m.n_phases;
    Eigen::VectorXd d(2 * n);
    d << dw, zeta;
    double tensor = 0.0;
    for (int i = 0; i < n; ++i) {
      tensor += dw[i] * d.dot(h.a_hess[i] * d);
      tensor += zeta[i] * d.dot(h.b_hess[i] * d);
    }
    if (std::abs(fd - tensor) > 1e-5 * (1.0 + std::abs(tensor))) {
      throw NumericalError("kappa_coefficient: stencil value " +
                           std::to_string(fd) +
                           " disagrees with the tensor assembly " +
                           std::to_string(tensor));
    }
  }
  return fd;
}

// Lagrangian route to mu: second derivatives of L along zeta in omega only,
// minus the second derivative along (c_g gamma, gamma). The difference (not
// the sum) equals <zeta, D_w A zeta> - <gamma, E(c_g) gamma>, which is mu.
inline double mu_lagrangian_form(const ModulationModel& m,
                                 const Eigen::VectorXd& omega,
                                 const Eigen::VectorXd& k, double c_g,
                                 const Eigen::VectorXd& zeta,
                                 const Eigen::VectorXd& gamma) {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(zeta.size());
  const double t1 = directional_lagrangian_derivative(m, omega, k, zeta, zero, 2);
  if (gamma.norm() == 0.0) return t1;
  const Eigen::VectorXd dwg = c_g * gamma;
  const double t2 = directional_lagrangian_derivative(m, omega, k, dwg, gamma, 2);
  return t1 - t2;
}

struct ParameterPerturbation {
  Eigen::VectorXd domega, dk;
};

// Unfolding coefficient: perturb the base point by eps * direction, find how
// the double root splits, and fit mu (c - c_g)^2 + nu = 0. Real splitting
// gives nu = -mu ((c+ - c-)/2)^2, complex splitting nu = +mu (Im c+)^2, so
// sign(mu nu) < 0 on the hyperbolic side. nu is reported per perturbed point
// (it is not normalized by eps).
inline double unfolding_nu(const ModulationModel& m, const CoalescencePoint& cp,
                           const ParameterPerturbation& dir, double eps = 1e-3,
                           const PencilTolerances& tol = {}) {
  const Eigen::VectorXd w = cp.omega + eps * dir.domega;
  const Eigen::VectorXd k = cp.k + eps * dir.dk;
  const QuadraticPencil pen = assemble_pencil(m, w, k, tol);
  auto roots = characteristics(pen, tol);
  std::sort(roots.begin(), roots.end(),
            [&](const Characteristic& a, const Characteristic& b) {
              return std::abs(a.value - std::complex<double>(cp.c_g, 0.0)) <
                     std::abs(b.value - std::complex<double>(cp.c_g, 0.0));
            });
  if (roots.size() < 2) {
    throw NumericalError("unfolding_nu: fewer than two characteristics");
  }
  const Characteristic& c1 = roots[0];
  const Characteristic& c2 = roots[1];
  if (c1.is_real != c2.is_real) {
    throw NumericalError(
        "unfolding_nu: the two roots nearest c_g split asymmetrically");
  }
  const double half_split = c1.is_real
                                ? 0.5 * std::abs(c1.value.real() - c2.value.real())
                                : std::abs(c1.value.imag());
  if (half_split <= tol.double_root * (1.0 + std::abs(cp.c_g))) {
    throw NoSplitDetected(
        "unfolding_nu: perturbation by eps = " + std::to_string(eps) +
        " did not split the double root (half-splitting " +
        std::to_string(half_split) + ")");
  }
  const double sq = half_split * half_split;
  return c1.is_real ? -cp.mu * sq : cp.mu * sq;
}

// Dispersive coefficient: delegated to the model's closed-form hook. Absent
// when the model has none (the generic value needs the Jordan chain of the
// full linearized operator, which is outside this library's scope) or when
// the hook does not apply at this point.
inline std::optional<double> dispersion_coefficient(const ModulationModel& m,
                                                    const CoalescencePoint& cp) {
  if (!m.dispersion_hook) return std::nullopt;
  DispersionContext ctx;
  ctx.omega = cp.omega;
  ctx.k = cp.k;
  ctx.c_g = cp.c_g;
  ctx.zeta = cp.zeta;
  ctx.mu = cp.mu;
  return m.dispersion_hook(ctx);
}

struct AnalyzeOptions {
  RefineOptions refine;
  bool compute_nu = true;
  double nu_eps = 1e-3;
};

// Full pipeline for one candidate: refine the location, build the chain,
// attach every reduction coefficient. The unfolding direction is the path
// tangent at the refined parameter; a perturbation that fails to split the
// roots leaves nu unset rather than rejecting the point.
inline CoalescencePoint analyze_coalescence(const ModulationModel& m,
                                            const ParameterPath& path,
                                            double p_guess, double c_guess,
                                            const AnalyzeOptions& opts = {}) {
  CoalescencePoint cp =
      refine_coalescence(m, path, p_guess, c_guess, opts.refine);
  const QuadraticPencil pen = assemble_pencil(m, cp.omega, cp.k, opts.refine.tol);
  cp.gamma = jordan_gamma(pen, cp.c_g, cp.zeta, opts.refine.tol,
                          &cp.diagnostics.chain_residual);
  cp.mu = mu_coefficient(pen, cp.c_g, cp.zeta, cp.gamma, opts.refine.tol);
  cp.kappa = kappa_coefficient(m, cp.omega, cp.k, cp.c_g, cp.zeta);
  cp.K_disp = dispersion_coefficient(m, cp);
  if (opts.compute_nu) {
    const double hp = 1e-6;
    const auto [wp, kp] = path(cp.path_param + hp);
    const auto [wm, km] = path(cp.path_param - hp);
    ParameterPerturbation tangent;
    tangent.domega = (wp - wm) / (2.0 * hp);
    tangent.dk = (kp - km) / (2.0 * hp);
    const double tangent_norm =
        std::sqrt(tangent.domega.squaredNorm() + tangent.dk.squaredNorm());
    if (tangent_norm > 1e-12) {
      try {
        cp.nu = unfolding_nu(m, cp, tangent, opts.nu_eps, opts.refine.tol);
      } catch (const NoSplitDetected&) {
        cp.nu.reset();
      }
    }
  }
  return cp;
}

// Convenience overload carrying the scan candidate's bracketing and sign data.
inline CoalescencePoint analyze_coalescence(const ModulationModel& m,
                                            const ParameterPath& path,
                                            const ScanCandidate& cand,
                                            const AnalyzeOptions& opts = {}) {
  CoalescencePoint cp = analyze_coalescence(
      m, path, 0.5 * (cand.p_lo + cand.p_hi), cand.c_estimate, opts);
  cp.diagnostics.sign_pair_before = cand.sign_pair;
  return cp;
}

}  // namespace whitmod
