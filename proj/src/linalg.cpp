#include "bihamkit/linalg.hpp"

#include "bihamkit/errors.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <string>

namespace bihamkit {

namespace {

constexpr double kSmallGap = 1e-4;

}  // namespace

void require_square(const CMatrix& X, const char* what) {
  if (X.rows() == 0 || X.rows() != X.cols()) {
    throw DomainError(std::string(what) + ": matrix must be square and non-empty");
  }
  if (!X.allFinite()) {
    throw DomainError(std::string(what) + ": non-finite matrix entry");
  }
}

void require_same_size(const CMatrix& X, const CMatrix& Y, const char* what) {
  if (X.rows() != Y.rows() || X.cols() != Y.cols()) {
    throw DomainError(std::string(what) + ": size mismatch");
  }
}

TriangularParts triangular_split(const CMatrix& X) {
  const Eigen::Index n = X.rows();
  TriangularParts parts{CMatrix::Zero(n, n), CMatrix::Zero(n, n), CMatrix::Zero(n, n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i < j) {
        parts.upper(i, j) = X(i, j);
      } else if (i == j) {
        parts.diag(i, j) = X(i, j);
      } else {
        parts.lower(i, j) = X(i, j);
      }
    }
  }
  return parts;
}

HermitianParts hermitian_split(const CMatrix& X) { return {anti_part(X), herm_part(X)}; }

CMatrix diagonal_part(const CMatrix& X) {
  CMatrix D = CMatrix::Zero(X.rows(), X.cols());
  D.diagonal() = X.diagonal();
  return D;
}

CMatrix off_diagonal_part(const CMatrix& X) {
  CMatrix Y = X;
  Y.diagonal().setZero();
  return Y;
}

double pairing(const CMatrix& X, const CMatrix& Y) {
  require_same_size(X, Y, "pairing");
  // Re tr(XY) = Re sum_ij X_ij Y_ji without forming the product.
  return (X.array() * Y.transpose().array()).sum().real();
}

CMatrix r_map(const CMatrix& X) {
  CMatrix R = CMatrix::Zero(X.rows(), X.cols());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      if (i < j) {
        R(i, j) = 0.5 * X(i, j);
      } else if (i > j) {
        R(i, j) = -0.5 * X(i, j);
      }
    }
  }
  return R;
}

CMatrix r_plus(const CMatrix& X) { return r_map(X) + 0.5 * X; }
CMatrix r_minus(const CMatrix& X) { return r_map(X) - 0.5 * X; }

void require_regular(const RVector& q) {
  if (q.size() == 0 || !q.allFinite()) {
    throw DomainError("q must be a non-empty finite vector");
  }
  for (Eigen::Index i = 0; i + 1 < q.size(); ++i) {
    if (q(i) - q(i + 1) <= kRegularityGap) {
      throw RegularityError("irregular point: q must be strictly decreasing with gap > 1e-8 (q_" +
                            std::to_string(i + 1) + " - q_" + std::to_string(i + 2) + " = " +
                            std::to_string(q(i) - q(i + 1)) + ")");
    }
  }
}

double coth_safe(double x) {
  if (std::abs(x) < kSmallGap) {
    return 1.0 / x + x / 3.0;
  }
  return 1.0 / std::tanh(x);
}

double inv_sinh_safe(double x) {
  if (std::abs(x) < kSmallGap) {
    return 1.0 / x - x / 6.0;
  }
  return 1.0 / std::sinh(x);
}

CMatrix R_q(const RVector& q, const CMatrix& X) {
  require_regular(q);
  if (X.rows() != q.size()) {
    throw DomainError("R_q: size mismatch");
  }
  const Eigen::Index n = X.rows();
  CMatrix Y = CMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j) {
        Y(i, j) = X(i, j) * coth_safe(q(i) - q(j));
      }
    }
  }
  return Y;
}

CMatrix ad_q_function(const RVector& q, const CMatrix& X, AdFunction kind) {
  if (X.rows() != q.size()) {
    throw DomainError("ad_q_function: size mismatch");
  }
  const Eigen::Index n = X.rows();
  CMatrix Y = X;
  switch (kind) {
    case AdFunction::Sinh:
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) Y(i, j) *= std::sinh(q(i) - q(j));
      }
      break;
    case AdFunction::Cosh:
      for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) Y(i, j) *= std::cosh(q(i) - q(j));
      }
      break;
    case AdFunction::InvSinh:
      require_regular(q);
      for (Eigen::Index i = 0; i < n; ++i) {
        if (X(i, i) != Complex(0.0, 0.0)) {
          throw DomainError("ad_q_function: 1/sinh(ad_q) needs a zero-diagonal argument");
        }
        for (Eigen::Index j = 0; j < n; ++j) {
          if (i != j) Y(i, j) *= inv_sinh_safe(q(i) - q(j));
        }
      }
      break;
  }
  return Y;
}

CMatrix diag_matrix(const RVector& d) {
  CMatrix D = CMatrix::Zero(d.size(), d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) D(i, i) = d(i);
  return D;
}

CMatrix exp_diag(const RVector& q) {
  CMatrix D = CMatrix::Zero(q.size(), q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) D(i, i) = std::exp(q(i));
  return D;
}

RVector real_diagonal(const CMatrix& X) { return X.diagonal().real(); }

CartanFactors cartan_decompose(const CMatrix& g) {
  require_square(g, "cartan_decompose");
  Eigen::JacobiSVD<CMatrix> svd(g, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector sigma = svd.singularValues();
  const Eigen::Index n = g.rows();
  if (!(sigma(n - 1) > 1e-14 * std::max(1.0, sigma(0)))) {
    throw SingularMatrixError("singular g: smallest singular value " + std::to_string(sigma(n - 1)));
  }
  CartanFactors f{svd.matrixU(), sigma.array().log().matrix(), svd.matrixV()};
  require_regular(f.q);

  // Torus gauge: (A, B) -> (A tau, B tau).
  for (Eigen::Index c = 0; c < n; ++c) {
    const double top = f.A.col(c).cwiseAbs().maxCoeff();
    Eigen::Index pivot = 0;
    while (std::abs(f.A(pivot, c)) < top * (1.0 - 1e-12)) ++pivot;
    const Complex phase = std::conj(f.A(pivot, c)) / std::abs(f.A(pivot, c));
    f.A.col(c) *= phase;
    f.B.col(c) *= phase;
    f.A(pivot, c) = std::abs(f.A(pivot, c));
  }
  return f;
}

namespace {

// Diagonal (6,6) Pade coefficients of exp.
constexpr double kPade6[] = {1.0,
                             1.0 / 2.0,
                             5.0 / 44.0,
                             1.0 / 66.0,
                             1.0 / 792.0,
                             1.0 / 15840.0,
                             1.0 / 665280.0};

double one_norm(const CMatrix& X) { return X.cwiseAbs().colwise().sum().maxCoeff(); }

}  // namespace

CMatrix matrix_exp(const CMatrix& X) {
  require_square(X, "matrix_exp");
  const Eigen::Index n = X.rows();
  const double norm = one_norm(X);
  int squarings = 0;
  if (norm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  }
  const CMatrix A = X / std::ldexp(1.0, squarings);
  const CMatrix I = CMatrix::Identity(n, n);

  // N(A) = sum c_k A^k, D(A) = N(-A).
  CMatrix power = I;
  CMatrix even = kPade6[0] * I;
  CMatrix odd = CMatrix::Zero(n, n);
  for (int k = 1; k <= 6; ++k) {
    power = power * A;
    if (k % 2 == 0) {
      even += kPade6[k] * power;
    } else {
      odd += kPade6[k] * power;
    }
  }
  CMatrix E = (even - odd).partialPivLu().solve(even + odd);
  for (int s = 0; s < squarings; ++s) E = E * E;
  return E;
}

CMatrix matrix_power(const CMatrix& X, int k) {
  if (k < 0) throw DomainError("matrix_power: negative exponent");
  CMatrix P = CMatrix::Identity(X.rows(), X.cols());
  for (int i = 0; i < k; ++i) P = P * X;
  return P;
}

double max_abs(const CMatrix& X) { return X.size() == 0 ? 0.0 : X.cwiseAbs().maxCoeff(); }

CMatrix basis_element(std::size_t n, std::size_t index) {
  if (index >= real_dimension(n)) throw DomainError("basis_element: index out of range");
  CMatrix T = CMatrix::Zero(n, n);
  const std::size_t slot = index % (n * n);
  const Complex value = index < n * n ? Complex(1.0, 0.0) : Complex(0.0, 1.0);
  T(slot / n, slot % n) = value;
  return T;
}

}  // namespace bihamkit
