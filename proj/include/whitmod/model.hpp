#pragma once

// Modulation-model interface: an averaged scalar function L(omega, k) together
// with its gradient maps A = D_omega L (wave action) and B = D_k L (flux),
// their Jacobians, numerical differentiation with Richardson refinement, and
// assembly of the quadratic pencil a2 = D_w A, a1 = D_k A + D_w B, a0 = D_k B.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "whitmod/errors.hpp"
#include "whitmod/pencil.hpp"

namespace whitmod {

struct JacobianSet {
  Eigen::MatrixXd dwa, dka, dwb, dkb;
  // Relative defect ||dka - dwb^T|| / (1 + max(||dka||, ||dwb||)).  The cross
  // derivative identity makes dka the transpose of dwb for any potential L.
  double symmetry_defect = 0.0;
};

// Passed to a model's dispersion hook after a coalescence has been analyzed.
struct DispersionContext {
  Eigen::VectorXd omega, k;
  double c_g = 0.0;
  Eigen::VectorXd zeta;
  double mu = 0.0;
};

// Full (omega, k) Hessians of each component of A and B, in stacked
// coordinates x = (omega_1..omega_N, k_1..k_N).  Optional; enables the tensor
// route to the cubic coefficient kappa.
struct ActionHessians {
  std::vector<Eigen::MatrixXd> a_hess;  // a_hess[i] is the 2N x 2N Hessian of A_i
  std::vector<Eigen::MatrixXd> b_hess;
};

struct ModulationModel {
  int n_phases = 0;
  std::string name;
  std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)> lagrangian;
  std::function<std::pair<Eigen::VectorXd, Eigen::VectorXd>(
      const Eigen::VectorXd&, const Eigen::VectorXd&)>
      action_maps;
  std::function<JacobianSet(const Eigen::VectorXd&, const Eigen::VectorXd&)>
      analytic_jacobians;
  std::function<std::optional<double>(const DispersionContext&)> dispersion_hook;
  std::function<bool(const Eigen::VectorXd&, const Eigen::VectorXd&)> domain_guard;
  std::function<ActionHessians(const Eigen::VectorXd&, const Eigen::VectorXd&)>
      action_hessians;
};

inline bool in_domain(const ModulationModel& m, const Eigen::VectorXd& omega,
                      const Eigen::VectorXd& k) {
  return !m.domain_guard || m.domain_guard(omega, k);
}

namespace detail {

inline void require_in_domain(const ModulationModel& m,
                              const Eigen::VectorXd& omega,
                              const Eigen::VectorXd& k) {
  if (!in_domain(m, omega, k)) {
    throw OutsideDomain("(omega, k) outside the model's domain guard");
  }
}

inline double guarded_lagrangian(const ModulationModel& m,
                                 const Eigen::VectorXd& omega,
                                 const Eigen::VectorXd& k) {
  require_in_domain(m, omega, k);
  return m.lagrangian(omega, k);
}

// Central stencil for the order-p derivative of F(s) = L(omega + s dw, k + s dk)
// at s = 0, using the given step.  Orders 1..3 use 2-, 3-, 5-point stencils.
inline double directional_stencil(const ModulationModel& m,
                                  const Eigen::VectorXd& omega,
                                  const Eigen::VectorXd& k,
                                  const Eigen::VectorXd& dw,
                                  const Eigen::VectorXd& dk, int order,
                                  double h) {
  auto f = [&](double s) {
    return guarded_lagrangian(m, omega + s * dw, k + s * dk);
  };
  switch (order) {
    case 1:
      return (f(h) - f(-h)) / (2.0 * h);
    case 2:
      return (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h);
    case 3:
      return (f(2.0 * h) - 2.0 * f(h) + 2.0 * f(-h) - f(-2.0 * h)) /
             (2.0 * h * h * h);
    default:
      throw ConfigError("directional derivative order must be 1, 2 or 3");
  }
}

}  // namespace detail

// Order-p derivative of s -> L(omega + s dw, k + s dk) at s = 0.  Step size
// h = eps^(1/(p+2)) (1 + ||(omega,k)||); one Richardson halving cancels the
// O(h^2) truncation term of each central stencil.  If a stencil point exits
// the domain guard, h is shrunk (up to 3 times) before giving up.
inline double directional_lagrangian_derivative(
    const ModulationModel& m, const Eigen::VectorXd& omega,
    const Eigen::VectorXd& k, const Eigen::VectorXd& dw,
    const Eigen::VectorXd& dk, int order) {
  if (!m.lagrangian) {
    throw ConfigError("model '" + m.name + "' does not provide a Lagrangian");
  }
  if (order < 1 || order > 3) {
    throw ConfigError("directional derivative order must be 1, 2 or 3");
  }
  const double eps = std::numeric_limits<double>::epsilon();
  const double point_norm =
      std::sqrt(omega.squaredNorm() + k.squaredNorm());
  double h = std::pow(eps, 1.0 / (order + 2)) * (1.0 + point_norm);
  for (int attempt = 0;; ++attempt) {
    try {
      const double coarse = detail::directional_stencil(m, omega, k, dw, dk, order, h);
      const double fine = detail::directional_stencil(m, omega, k, dw, dk, order, 0.5 * h);
      return (4.0 * fine - coarse) / 3.0;
    } catch (const OutsideDomain&) {
      if (attempt >= 3) throw;
      h *= 0.5;
    }
  }
}

// (A, B) at (omega, k): analytic maps if present, else gradients of L.
inline std::pair<Eigen::VectorXd, Eigen::VectorXd> wave_action(
    const ModulationModel& m, const Eigen::VectorXd& omega,
    const Eigen::VectorXd& k) {
  detail::require_in_domain(m, omega, k);
  if (m.action_maps) return m.action_maps(omega, k);
  if (!m.lagrangian) {
    throw ConfigError("model '" + m.name +
                      "' provides neither action maps nor a Lagrangian");
  }
  const int n = m.n_phases;
  Eigen::VectorXd a(n), b(n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
    e[i] = 1.0;
    a[i] = directional_lagrangian_derivative(m, omega, k, e, Eigen::VectorXd::Zero(n), 1);
    b[i] = directional_lagrangian_derivative(m, omega, k, Eigen::VectorXd::Zero(n), e, 1);
  }
  return {a, b};
}

namespace detail {

inline double jacobian_symmetry_defect(const Eigen::MatrixXd& dka,
                                       const Eigen::MatrixXd& dwb) {
  const double scale = 1.0 + std::max(dka.norm(), dwb.norm());
  return (dka - dwb.transpose()).norm() / scale;
}

}  // namespace detail

// Jacobians of (A, B): analytic if provided, else central differences of
// wave_action with one Richardson halving.  SymmetryViolation flags an
// inconsistent user model (dka far from dwb^T).
inline JacobianSet jacobians(const ModulationModel& m,
                             const Eigen::VectorXd& omega,
                             const Eigen::VectorXd& k) {
  detail::require_in_domain(m, omega, k);
  JacobianSet js;
  if (m.analytic_jacobians) {
    js = m.analytic_jacobians(omega, k);
  } else {
    const int n = m.n_phases;
    js.dwa.resize(n, n);
    js.dka.resize(n, n);
    js.dwb.resize(n, n);
    js.dkb.resize(n, n);
    const double eps = std::numeric_limits<double>::epsilon();
    const double point_norm = std::sqrt(omega.squaredNorm() + k.squaredNorm());
    const double h0 = std::pow(eps, 1.0 / 3.0) * (1.0 + point_norm);
    auto column = [&](bool wrt_omega, int j, double h) {
      Eigen::VectorXd dw = omega, dk = k;
      (wrt_omega ? dw[j] : dk[j]) += h;
      auto plus = wave_action(m, dw, dk);
      (wrt_omega ? dw[j] : dk[j]) -= 2.0 * h;
      auto minus = wave_action(m, dw, dk);
      Eigen::VectorXd col(2 * n);
      col << (plus.first - minus.first) / (2.0 * h),
          (plus.second - minus.second) / (2.0 * h);
      return col;
    };
    for (int j = 0; j < n; ++j) {
      for (bool wrt_omega : {true, false}) {
        Eigen::VectorXd col;
        double h = h0;
        for (int attempt = 0;; ++attempt) {
          try {
            const Eigen::VectorXd coarse = column(wrt_omega, j, h);
            const Eigen::VectorXd fine = column(wrt_omega, j, 0.5 * h);
            col = (4.0 * fine - coarse) / 3.0;
            break;
          } catch (const OutsideDomain&) {
            if (attempt >= 3) throw;
            h *= 0.5;
          }
        }
        if (wrt_omega) {
          js.dwa.col(j) = col.head(n);
          js.dwb.col(j) = col.tail(n);
        } else {
          js.dka.col(j) = col.head(n);
          js.dkb.col(j) = col.tail(n);
        }
      }
    }
  }
  js.symmetry_defect = detail::jacobian_symmetry_defect(js.dka, js.dwb);
  if (js.symmetry_defect > 1e-4) {
    throw SymmetryViolation("Jacobian symmetry defect " +
                            std::to_string(js.symmetry_defect) +
                            " exceeds 1e-4: inconsistent model");
  }
  return js;
}

inline QuadraticPencil assemble_pencil(const ModulationModel& m,
                                       const Eigen::VectorXd& omega,
                                       const Eigen::VectorXd& k,
                                       const PencilTolerances& tol = {}) {
  const JacobianSet js = jacobians(m, omega, k);
  // Symmetrize before validation; FD Jacobians carry harmless asymmetry noise.
  auto sym = [](const Eigen::MatrixXd& x) {
    return Eigen::MatrixXd(0.5 * (x + x.transpose()));
  };
  return make_pencil(sym(js.dwa), sym(js.dka + js.dwb), sym(js.dkb), tol);
}

}  // namespace whitmod
