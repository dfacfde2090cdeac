#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>

namespace whitmod {

// Deterministic Gaussian / unit-sphere sampler.  std::normal_distribution is
// implementation-defined, so a fixed Box-Muller over mt19937_64 is used to make
// seeded output reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  double uniform01() {
    // 53-bit mantissa uniform in [0, 1).
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  Eigen::VectorXd gaussian_vector(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = gaussian();
    return v;
  }

  // Uniform on the unit sphere in R^n.
  Eigen::VectorXd unit_vector(int n) {
    Eigen::VectorXd v = gaussian_vector(n);
    double nrm = v.norm();
    while (nrm < 1e-12) {
      v = gaussian_vector(n);
      nrm = v.norm();
    }
    return v / nrm;
  }

  Eigen::MatrixXd gaussian_matrix(int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = gaussian();
    return m;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace whitmod
