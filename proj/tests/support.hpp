#pragma once

#include "bihamkit/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace testing_support {

using bihamkit::CMatrix;
using bihamkit::Complex;

inline const Complex I1(0.0, 1.0);

// Matrix unit E_ab, 0-based.
inline CMatrix E(std::size_t n, std::size_t a, std::size_t b) {
  CMatrix M = CMatrix::Zero(n, n);
  M(a, b) = 1.0;
  return M;
}

inline CMatrix mat2(Complex a, Complex b, Complex c, Complex d) {
  CMatrix M(2, 2);
  M << a, b, c, d;
  return M;
}

inline double scale_of(double a, double b = 0.0, double c = 0.0) {
  return std::max({1.0, std::abs(a), std::abs(b), std::abs(c)});
}

}  // namespace testing_support
