#include "bihamkit/random.hpp"

#include <Eigen/QR>

namespace bihamkit {

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double gaussian(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

CMatrix random_matrix(std::size_t n, Rng& rng, double scale) {
  CMatrix X(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double re = gaussian(rng);
      const double im = gaussian(rng);
      X(i, j) = scale * Complex(re, im);
    }
  }
  return X;
}

CMatrix random_hermitian(std::size_t n, Rng& rng, double scale) {
  return herm_part(random_matrix(n, rng, scale));
}

CMatrix random_anti_hermitian(std::size_t n, Rng& rng, double scale) {
  return anti_part(random_matrix(n, rng, scale));
}

CMatrix random_unitary(std::size_t n, Rng& rng) {
  const CMatrix Z = random_matrix(n, rng);
  Eigen::HouseholderQR<CMatrix> qr(Z);
  CMatrix Q = qr.householderQ();
  const CMatrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  // Haar measure: fix the phases of R's diagonal.
  for (std::size_t j = 0; j < n; ++j) {
    const Complex d = R(j, j);
    if (std::abs(d) > 0) Q.col(j) *= d / std::abs(d);
  }
  return Q;
}

CMatrix random_torus(std::size_t n, Rng& rng) {
  CMatrix T = CMatrix::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) T(i, i) = std::polar(1.0, uniform(rng, -M_PI, M_PI));
  return T;
}

RVector random_regular_q(std::size_t n, Rng& rng, double min_gap) {
  RVector q(n);
  double value = uniform(rng, -0.5, 0.5) + 0.5 * (static_cast<double>(n) - 1.0) * min_gap;
  for (std::size_t i = 0; i < n; ++i) {
    q(i) = value;
    value -= min_gap + uniform(rng, 0.0, 0.7);
  }
  return q;
}

CMatrix random_group_element(std::size_t n, Rng& rng, double scale) {
  CMatrix X = random_matrix(n, rng);
  X /= max_abs(X);
  return matrix_exp(scale * X);
}

}  // namespace bihamkit
