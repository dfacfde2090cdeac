#pragma once

// Quadratic symmetric matrix pencil E(c) = a2*c^2 + a1*c + a0: evaluation,
// determinant Delta(c) = det E(c), the 2N characteristic roots, per-root sign
// characteristics sign<zeta, E'(c0) zeta>, a sampled hyperbolicity test, and
// tabulated (c, Delta, sign Delta') data for plotting.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <vector>

#include "whitmod/errors.hpp"
#include "whitmod/random.hpp"

namespace whitmod {

struct PencilTolerances {
  double symmetry_rel = 1e-12;     // admissible asymmetry of a2, a1, a0
  double root_accept = 1e-8;       // |Delta(c)| <= root_accept * delta_scale
  double double_root = 1e-6;       // roots closer than this (times 1+|c|) cluster
  double kernel_accept = 1e-8;     // sigma_min < kernel_accept * ||E|| accepts zeta
  double degenerate_sign = 1e-8;   // |<zeta,E' zeta>| below this (times scale) is degenerate
  double singular_leading = 1e-12; // |det a2| threshold relative to ||a2||^N
  double real_snap = 1e-9;         // |Im c| below this (times 1+|Re c|) snaps to real
  int newton_max_iter = 10;
};

struct QuadraticPencil {
  int dim = 0;
  Eigen::MatrixXd a2, a1, a0;  // exactly symmetric after construction
};

namespace detail {

inline double asymmetry_rel(const Eigen::MatrixXd& m) {
  const double scale = std::max(1.0, m.norm());
  return (m - m.transpose()).norm() / scale;
}

// Adjugate via explicit cofactors; pencil dimensions are small (N <= 4 in
// practice), so the O(N^5) cost is irrelevant.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> adjugate(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m) {
  using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const int n = static_cast<int>(m.rows());
  if (n == 1) {
    Mat r(1, 1);
    r(0, 0) = Scalar(1);
    return r;
  }
  Mat adj(n, n);
  Mat minor(n - 1, n - 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int r = 0, mr = 0; r < n; ++r) {
        if (r == i) continue;
        for (int c = 0, mc = 0; c < n; ++c) {
          if (c == j) continue;
          minor(mr, mc++) = m(r, c);
        }
        ++mr;
      }
      const Scalar cof = ((i + j) % 2 == 0 ? Scalar(1) : Scalar(-1)) *
                         Eigen::PartialPivLU<Mat>(minor).determinant();
      adj(j, i) = cof;  // adjugate is the transposed cofactor matrix
    }
  }
  return adj;
}

}  // namespace detail

// Validates symmetry (1e-12 relative Frobenius per coefficient), then stores
// the exactly symmetrized matrices.
inline QuadraticPencil make_pencil(const Eigen::MatrixXd& a2,
                                   const Eigen::MatrixXd& a1,
                                   const Eigen::MatrixXd& a0,
                                   const PencilTolerances& tol = {}) {
  const int n = static_cast<int>(a2.rows());
  if (n < 1 || a2.cols() != n || a1.rows() != n || a1.cols() != n ||
      a0.rows() != n || a0.cols() != n) {
    throw ConfigError("pencil coefficients must be square matrices of equal dimension");
  }
  for (const auto* m : {&a2, &a1, &a0}) {
    if (detail::asymmetry_rel(*m) > tol.symmetry_rel) {
      throw ConfigError("pencil coefficient matrix is not symmetric within tolerance");
    }
  }
  QuadraticPencil p;
  p.dim = n;
  p.a2 = 0.5 * (a2 + a2.transpose());
  p.a1 = 0.5 * (a1 + a1.transpose());
  p.a0 = 0.5 * (a0 + a0.transpose());
  return p;
}

inline Eigen::MatrixXd evaluate_pencil(const QuadraticPencil& p, double c) {
  Eigen::MatrixXd e = p.a2 * (c * c) + p.a1 * c + p.a0;
  return 0.5 * (e + e.transpose());
}

inline Eigen::MatrixXcd evaluate_pencil(const QuadraticPencil& p,
                                        std::complex<double> c) {
  return p.a2.cast<std::complex<double>>() * (c * c) +
         p.a1.cast<std::complex<double>>() * c +
         p.a0.cast<std::complex<double>>();
}

// order 1: E'(c) = 2c a2 + a1;  order 2: E''(c) = 2 a2.
inline Eigen::MatrixXd pencil_derivative(const QuadraticPencil& p, double c,
                                         int order) {
  if (order == 1) return 2.0 * c * p.a2 + p.a1;
  if (order == 2) return 2.0 * p.a2;
  throw ConfigError("pencil_derivative order must be 1 or 2");
}

inline double determinant(const QuadraticPencil& p, double c) {
  return Eigen::PartialPivLU<Eigen::MatrixXd>(evaluate_pencil(p, c)).determinant();
}

inline std::complex<double> determinant(const QuadraticPencil& p,
                                        std::complex<double> c) {
  return Eigen::PartialPivLU<Eigen::MatrixXcd>(evaluate_pencil(p, c)).determinant();
}

// Delta'(c) = tr(adj(E(c)) E'(c)) (Jacobi's formula).
inline double determinant_derivative(const QuadraticPencil& p, double c) {
  const Eigen::MatrixXd adj = detail::adjugate<double>(evaluate_pencil(p, c));
  return (adj * pencil_derivative(p, c, 1)).trace();
}

inline std::complex<double> determinant_derivative(const QuadraticPencil& p,
                                                   std::complex<double> c) {
  using Mat = Eigen::MatrixXcd;
  const Mat e = evaluate_pencil(p, c);
  const Mat ep = (2.0 * c) * p.a2.cast<std::complex<double>>() +
                 p.a1.cast<std::complex<double>>();
  return (detail::adjugate<std::complex<double>>(e) * ep).trace();
}

// Exact polynomial coefficients of Delta(c), highest power of c first.
// Exposed for N <= 2 only; the entries of det expand into short products.
inline std::vector<double> determinant_coefficients(const QuadraticPencil& p) {
  if (p.dim == 1) {
    return {p.a2(0, 0), p.a1(0, 0), p.a0(0, 0)};
  }
  if (p.dim == 2) {
    // det = q00*q11 - q01*q10 with q_ij(c) = a2_ij c^2 + a1_ij c + a0_ij.
    auto entry = [&](int i, int j) {
      return std::array<double, 3>{p.a2(i, j), p.a1(i, j), p.a0(i, j)};
    };
    auto conv = [](const std::array<double, 3>& u, const std::array<double, 3>& v) {
      std::array<double, 5> w{};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) w[i + j] += u[i] * v[j];
      return w;
    };
    const auto d = conv(entry(0, 0), entry(1, 1));
    const auto o = conv(entry(0, 1), entry(1, 0));
    std::vector<double> coeffs(5);
    for (int i = 0; i < 5; ++i) coeffs[i] = d[i] - o[i];
    return coeffs;
  }
  throw ConfigError("determinant_coefficients is exposed only for dim <= 2");
}

struct Characteristic {
  std::complex<double> value;
  bool is_real = false;
  std::optional<int> sign_char;  // set iff real and simple
  double residual = 0.0;         // |Delta(value)|
  double nearest_gap = 0.0;      // distance to the nearest other root
};

namespace detail {

// Scale used for root-acceptance checks: 1 + max |Delta| sampled on
// [-R, R] with R = 1 + 2 max|c| over the candidate roots (64 uniform points).
inline double delta_scale(const QuadraticPencil& p, double max_abs_c) {
  const double r = 1.0 + 2.0 * max_abs_c;
  double m = 0.0;
  const int samples = 64;
  for (int i = 0; i < samples; ++i) {
    const double c = -r + 2.0 * r * i / (samples - 1);
    m = std::max(m, std::abs(determinant(p, c)));
  }
  return 1.0 + m;
}

inline void check_leading_coefficient(const QuadraticPencil& p,
                                      const PencilTolerances& tol) {
  const double det2 = Eigen::PartialPivLU<Eigen::MatrixXd>(p.a2).determinant();
  const double scale = std::pow(std::max(1.0, p.a2.norm()), p.dim);
  if (std::abs(det2) <= tol.singular_leading * scale) {
    throw SingularLeadingCoefficient(
        "leading pencil coefficient a2 is singular to tolerance");
  }
}

// Raw eigenvalues of the companion linearization.  Falls back to the
// generalized (QZ) form when a2 is poorly conditioned but still regular.
inline std::vector<std::complex<double>> companion_roots(
    const QuadraticPencil& p) {
  const int n = p.dim;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(p.a2);
  const double det2 = lu.determinant();
  const double well_conditioned_floor =
      1e-10 * std::pow(std::max(1.0, p.a2.norm()), n);
  std::vector<std::complex<double>> roots;
  roots.reserve(2 * n);
  if (std::abs(det2) > well_conditioned_floor) {
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    comp.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    comp.bottomLeftCorner(n, n) = -lu.solve(p.a0);
    comp.bottomRightCorner(n, n) = -lu.solve(p.a1);
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
    for (int i = 0; i < 2 * n; ++i) roots.push_back(es.eigenvalues()[i]);
  } else {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    Eigen::MatrixXd b = Eigen::MatrixXd::Identity(2 * n, 2 * n);
    a.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    a.bottomLeftCorner(n, n) = -p.a0;
    a.bottomRightCorner(n, n) = -p.a1;
    b.bottomRightCorner(n, n) = p.a2;
    Eigen::GeneralizedEigenSolver<Eigen::MatrixXd> ges(a, b, false);
    for (int i = 0; i < 2 * n; ++i) {
      const std::complex<double> alpha = ges.alphas()[i];
      const double beta = ges.betas()[i];
      if (std::abs(beta) < 1e-300) {
        throw SingularLeadingCoefficient(
            "infinite characteristic: leading coefficient effectively singular");
      }
      roots.push_back(alpha / beta);
    }
  }
  return roots;
}

inline std::complex<double> polish_root(const QuadraticPencil& p,
                                        std::complex<double> c, int max_iter) {
  std::complex<double> best = c;
  double best_abs = std::abs(determinant(p, c));
  for (int it = 0; it < max_iter; ++it) {
    const std::complex<double> f = determinant(p, c);
    const std::complex<double> fp = determinant_derivative(p, c);
    if (std::abs(fp) < 1e-300) break;  // at or near a multiple root
    const std::complex<double> step = f / fp;
    c -= step;
    const double fa = std::abs(determinant(p, c));
    if (fa < best_abs) {
      best_abs = fa;
      best = c;
    }
    if (std::abs(step) < 1e-16 * (1.0 + std::abs(c))) break;
  }
  return best;
}

}  // namespace detail

Eigen::VectorXd kernel_vector(const QuadraticPencil& p, double c0,
                              const PencilTolerances& tol);
int sign_characteristic(const QuadraticPencil& p, double c0,
                        const PencilTolerances& tol);

// All 2N characteristics: companion linearization, Newton polish, conjugate
// pairing, then residual/gap/sign bookkeeping.  Output sorted by (Re, Im).
inline std::vector<Characteristic> characteristics(
    const QuadraticPencil& p, const PencilTolerances& tol = {}) {
  detail::check_leading_coefficient(p, tol);
  std::vector<std::complex<double>> roots = detail::companion_roots(p);
  for (auto& c : roots) c = detail::polish_root(p, c, tol.newton_max_iter);

  // Snap nearly real roots onto the real axis, then enforce exact conjugate
  // symmetry on the remaining ones by averaging matched pairs.
  std::vector<std::complex<double>> fixed;
  std::vector<bool> used(roots.size(), false);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    const std::complex<double> c = roots[i];
    if (std::abs(c.imag()) <= tol.real_snap * (1.0 + std::abs(c.real()))) {
      used[i] = true;
      fixed.emplace_back(c.real(), 0.0);
      continue;
    }
    std::size_t partner = i;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < roots.size(); ++j) {
      if (j == i || used[j]) continue;
      const double d = std::abs(roots[j] - std::conj(c));
      if (d < best) {
        best = d;
        partner = j;
      }
    }
    used[i] = true;
    if (partner != i) {
      used[partner] = true;
      const std::complex<double> z = 0.5 * (c + std::conj(roots[partner]));
      fixed.push_back(z);
      fixed.push_back(std::conj(z));
    } else {
      fixed.push_back(c);  // unmatched; kept as computed
    }
  }
  std::sort(fixed.begin(), fixed.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });

  double max_abs = 0.0;
  for (const auto& c : fixed) max_abs = std::max(max_abs, std::abs(c));
  const double scale = detail::delta_scale(p, max_abs);

  std::vector<Characteristic> out(fixed.size());
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    Characteristic& ch = out[i];
    ch.value = fixed[i];
    ch.is_real = fixed[i].imag() == 0.0;
    ch.residual = std::abs(determinant(p, fixed[i]));
    if (ch.residual > tol.root_accept * scale) {
      throw NumericalError("characteristic root residual " +
                           std::to_string(ch.residual) +
                           " exceeds acceptance tolerance");
    }
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < fixed.size(); ++j) {
      if (j != i) gap = std::min(gap, std::abs(fixed[i] - fixed[j]));
    }
    ch.nearest_gap = gap;
    const bool simple =
        ch.nearest_gap > tol.double_root * (1.0 + std::abs(ch.value));
    if (ch.is_real && simple) {
      try {
        ch.sign_char = sign_characteristic(p, ch.value.real(), tol);
      } catch (const NumericalError&) {
        ch.sign_char.reset();  // degenerate or unresolved: leave unset
      }
    }
  }
  return out;
}

// Unit kernel vector of E(c0), sign-normalized so the first component of
// largest magnitude is positive.
inline Eigen::VectorXd kernel_vector(const QuadraticPencil& p, double c0,
                                     const PencilTolerances& tol = {}) {
  const Eigen::MatrixXd e = evaluate_pencil(p, c0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(e, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  // Cutoff relative to the pencil's natural entry scale at c0 rather than to
  // sigma_max of E(c0) itself, which is tiny at a root of a 1x1 pencil.
  const double entry_scale = p.a2.norm() * c0 * c0 +
                             p.a1.norm() * std::abs(c0) + p.a0.norm();
  const double cutoff =
      tol.kernel_accept * std::max({sv(0), entry_scale, 1e-300});
  const double smin = sv(p.dim - 1);
  if (smin >= cutoff) {
    throw NotARoot("E(c0) has no kernel to tolerance: smallest singular value " +
                   std::to_string(smin));
  }
  Eigen::VectorXd zeta = svd.matrixV().col(p.dim - 1);
  zeta.normalize();
  int imax = 0;
  double vmax = 0.0;
  for (int i = 0; i < p.dim; ++i) {
    if (std::abs(zeta[i]) > vmax) {
      vmax = std::abs(zeta[i]);
      imax = i;
    }
  }
  if (zeta[imax] < 0.0) zeta = -zeta;
  return zeta;
}

// sign<zeta, E'(c0) zeta> at a simple real root c0.
inline int sign_characteristic(const QuadraticPencil& p, double c0,
                               const PencilTolerances& tol = {}) {
  const double scale = detail::delta_scale(p, std::abs(c0));
  if (std::abs(determinant(p, c0)) > tol.root_accept * scale) {
    throw NotARoot("sign_characteristic: Delta(c0) exceeds acceptance tolerance");
  }
  const Eigen::MatrixXd e = evaluate_pencil(p, c0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(e, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (p.dim >= 2 &&
      sv(p.dim - 2) < tol.kernel_accept * std::max(1e-300, sv(0))) {
    throw DegenerateRoot("kernel dimension >= 2 at c0");
  }
  const Eigen::VectorXd zeta = kernel_vector(p, c0, tol);
  const Eigen::MatrixXd ep = pencil_derivative(p, c0, 1);
  const double s = zeta.dot(ep * zeta);
  if (std::abs(s) <= tol.degenerate_sign * (1.0 + ep.norm())) {
    throw DegenerateRoot("sign characteristic degenerate: <zeta,E' zeta> ~ 0");
  }
  return s > 0.0 ? 1 : -1;
}

enum class HyperbolicityVerdict { Hyperbolic, NotHyperbolic, Inconclusive };

struct HyperbolicityResult {
  HyperbolicityVerdict verdict = HyperbolicityVerdict::Inconclusive;
  double min_margin = 0.0;       // min over samples of beta^2 - alpha*gamma
  Eigen::VectorXd witness;       // minimizing direction (set when NotHyperbolic)
};

namespace detail {

inline double hyperbolicity_margin(const QuadraticPencil& p,
                                   const Eigen::VectorXd& u) {
  const double alpha = u.dot(p.a2 * u);
  const double beta = 0.5 * u.dot(p.a1 * u);
  const double gamma = u.dot(p.a0 * u);
  return beta * beta - alpha * gamma;
}

inline Eigen::VectorXd hyperbolicity_gradient(const QuadraticPencil& p,
                                              const Eigen::VectorXd& u) {
  const double alpha = u.dot(p.a2 * u);
  const double beta = 0.5 * u.dot(p.a1 * u);
  const double gamma = u.dot(p.a0 * u);
  return 2.0 * beta * (p.a1 * u) - 2.0 * gamma * (p.a2 * u) -
         2.0 * alpha * (p.a0 * u);
}

}  // namespace detail

// Samples beta^2 - alpha gamma over the unit sphere (alpha = <u,a2 u>,
// beta = <u,a1 u>/2, gamma = <u,a0 u>).  Exact for N = 1; probabilistic
// otherwise.  `refine` runs a projected descent from the worst sample.
inline HyperbolicityResult hyperbolicity_test(const QuadraticPencil& p,
                                              int n_samples, bool refine,
                                              std::uint64_t seed = 0) {
  if (n_samples < 1) throw ConfigError("hyperbolicity_test requires n_samples >= 1");
  HyperbolicityResult res;
  if (p.dim == 1) {
    Eigen::VectorXd u(1);
    u[0] = 1.0;
    res.min_margin = detail::hyperbolicity_margin(p, u);
    res.witness = u;
    res.verdict = res.min_margin > 0.0 ? HyperbolicityVerdict::Hyperbolic
                                       : HyperbolicityVerdict::NotHyperbolic;
    if (res.verdict == HyperbolicityVerdict::Hyperbolic) res.witness.resize(0);
    return res;
  }

  Rng rng(seed);
  Eigen::VectorXd argmin;
  double minval = std::numeric_limits<double>::infinity();
  double maxabs = 0.0;
  for (int i = 0; i < n_samples; ++i) {
    const Eigen::VectorXd u = rng.unit_vector(p.dim);
    const double f = detail::hyperbolicity_margin(p, u);
    maxabs = std::max(maxabs, std::abs(f));
    if (f < minval) {
      minval = f;
      argmin = u;
    }
  }
  if (refine) {
    Eigen::VectorXd u = argmin;
    double f = minval;
    double step = 0.1;
    for (int it = 0; it < 200 && step > 1e-14; ++it) {
      Eigen::VectorXd g = detail::hyperbolicity_gradient(p, u);
      g -= g.dot(u) * u;  // tangent projection
      if (g.norm() < 1e-14 * (1.0 + std::abs(f))) break;
      Eigen::VectorXd trial = (u - step * g).normalized();
      const double ft = detail::hyperbolicity_margin(p, trial);
      if (ft < f) {
        u = trial;
        f = ft;
        step *= 1.2;
      } else {
        step *= 0.5;
      }
    }
    if (f < minval) {
      minval = f;
      argmin = u;
    }
  }
  res.min_margin = minval;
  const double boundary = 1e-8 * (1.0 + maxabs);
  if (minval <= 0.0) {
    res.verdict = HyperbolicityVerdict::NotHyperbolic;
    res.witness = argmin;
  } else if (minval <= boundary) {
    res.verdict = HyperbolicityVerdict::Inconclusive;
    res.witness = argmin;
  } else {
    res.verdict = HyperbolicityVerdict::Hyperbolic;
  }
  return res;
}

struct SignCurveRow {
  double c = 0.0;
  double delta = 0.0;
  int sign_dprime = 0;  // sign of Delta'(c): -1, 0, +1
};

inline std::vector<SignCurveRow> graphical_sign_data(const QuadraticPencil& p,
                                                     double c_min, double c_max,
                                                     int samples) {
  if (!(c_min < c_max)) throw ConfigError("graphical_sign_data requires c_min < c_max");
  if (samples < 2) throw ConfigError("graphical_sign_data requires samples >= 2");
  std::vector<SignCurveRow> rows(samples);
  for (int i = 0; i < samples; ++i) {
    const double c = c_min + (c_max - c_min) * i / (samples - 1);
    rows[i].c = c;
    rows[i].delta = determinant(p, c);
    const double dp = determinant_derivative(p, c);
    rows[i].sign_dprime = dp > 0.0 ? 1 : (dp < 0.0 ? -1 : 0);
  }
  return rows;
}

}  // namespace whitmod
