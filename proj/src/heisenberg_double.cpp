#include "bihamkit/heisenberg_double.hpp"

#include "bihamkit/errors.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace bihamkit {

namespace {

void require_invertible(const CMatrix& g, const char* what) {
  const RVector sigma = Eigen::JacobiSVD<CMatrix>(g).singularValues();
  if (!(sigma(sigma.size() - 1) > 1e-13 * std::max(1.0, sigma(0)))) {
    throw SingularMatrixError(std::string("singular ") + what + ": the group element is not invertible");
  }
}

// Reverses rows and columns: conjugation by the antidiagonal permutation.
CMatrix flip(const CMatrix& M) { return M.reverse(); }

// Doolittle M = L D U without pivoting.
void ldu(const CMatrix& M, CMatrix& L, CVector& D, CMatrix& U) {
  const Eigen::Index n = M.rows();
  const double tol = 1e-12 * std::max(1.0, max_abs(M));
  CMatrix A = M;
  L = CMatrix::Identity(n, n);
  U = CMatrix::Identity(n, n);
  D = CVector::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex pivot = A(k, k);
    if (std::abs(pivot) < tol) throw FactorizationError("Gauss factorization failed: vanishing leading minor");
    D(k) = pivot;
    for (Eigen::Index i = k + 1; i < n; ++i) L(i, k) = A(i, k) / pivot;
    for (Eigen::Index j = k + 1; j < n; ++j) U(k, j) = A(k, j) / pivot;
    for (Eigen::Index i = k + 1; i < n; ++i) {
      for (Eigen::Index j = k + 1; j < n; ++j) A(i, j) -= L(i, k) * pivot * U(k, j);
    }
  }
}

CMatrix diag_of(const CVector& d) { return d.asDiagonal(); }

}  // namespace

void DoublePoint::validate() const {
  require_square(g1, "double point g1");
  require_square(g2, "double point g2");
  require_same_size(g1, g2, "double point");
  if (!g1.allFinite() || !g2.allFinite()) throw DomainError("double point: non-finite entries");
  require_invertible(g1, "g1");
  require_invertible(g2, "g2");
}

double pairing2(const MatrixPair& X, const MatrixPair& Y) {
  return pairing(X.first, Y.first) - pairing(X.second, Y.second);
}

DoubleSplit split_double(const MatrixPair& X) {
  require_same_size(X.first, X.second, "split_double");
  const CMatrix Z = X.first - X.second;
  return {X.first - r_plus(Z), Z};
}

MatrixPair rho(const MatrixPair& X) {
  const DoubleSplit s = split_double(X);
  const CMatrix rp = r_plus(s.dual), rm = r_minus(s.dual);
  return {0.5 * (s.diagonal - rp), 0.5 * (s.diagonal - rm)};
}

DoubleGradient double_gradients(const DoubleFunction& F, const DoublePoint& x, double h) {
  const std::size_t n = x.n();
  DoubleGradient out;
  out.left.first = fd_gradient(n, h, [&](const CMatrix& d) { return F({x.g1 + d * x.g1, x.g2}); });
  out.left.second = -fd_gradient(n, h, [&](const CMatrix& d) { return F({x.g1, x.g2 + d * x.g2}); });
  out.right.first = fd_gradient(n, h, [&](const CMatrix& d) { return F({x.g1 + x.g1 * d, x.g2}); });
  out.right.second = -fd_gradient(n, h, [&](const CMatrix& d) { return F({x.g1, x.g2 + x.g2 * d}); });
  return out;
}

double double_pb(DoubleSign sign, const DoubleGradient& f, const DoubleGradient& h) {
  const double left = pairing2(f.left, rho(h.left));
  const double right = pairing2(f.right, rho(h.right));
  return sign == DoubleSign::Plus ? left + right : left - right;
}

double double_pb(DoubleSign sign, const DoubleFunction& F, const DoubleFunction& H, const DoublePoint& x) {
  x.validate();
  return double_pb(sign, double_gradients(F, x), double_gradients(H, x));
}

double double_jacobi_residual(DoubleSign sign, const DoubleFunction& F, const DoubleFunction& G,
                              const DoubleFunction& H, const DoublePoint& x, double* scale) {
  auto bracket = [sign](const DoubleFunction& A, const DoubleFunction& B) -> DoubleFunction {
    return [sign, A, B](const DoublePoint& y) { return double_pb(sign, A, B, y); };
  };
  auto outer = [&](const DoubleFunction& A, const DoubleFunction& B) {
    return double_pb(sign, double_gradients(A, x, kDoubleNestedFdStep), double_gradients(B, x));
  };
  const double t1 = outer(bracket(F, G), H);
  const double t2 = outer(bracket(G, H), F);
  const double t3 = outer(bracket(H, F), G);
  if (scale != nullptr) *scale = std::max({std::abs(t1), std::abs(t2), std::abs(t3)});
  return t1 + t2 + t3;
}

UdlFactors udl_factorization(const CMatrix& M) {
  require_square(M, "udl_factorization");
  CMatrix L, U;
  CVector D;
  ldu(flip(M), L, D, U);
  return {flip(L), D.reverse(), flip(U)};
}

CVector principal_sqrt(const CVector& d) {
  CVector out(d.size());
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const Complex z = d(i);
    if (z.real() < 0.0 && std::abs(z.imag()) <= 1e-8 * std::abs(z)) {
      throw FactorizationError("square root on the branch cut: diagonal factor near the negative real axis");
    }
    out(i) = std::sqrt(z);
  }
  return out;
}

PhasePoint psi_map(const DoublePoint& x) {
  x.validate();
  const CMatrix g1_inv = x.g1.inverse();
  const CMatrix J = g1_inv * x.g2;
  // J itself must admit the Gauss factorization of the dual factor.
  udl_factorization(J);
  const UdlFactors f = udl_factorization(x.g1 * x.g2.inverse());
  const CVector a0 = principal_sqrt(f.diagonal);
  return {g1_inv * f.upper * diag_of(a0), J};
}

DoublePoint psi_inverse(const PhasePoint& y) {
  y.validate();
  const CMatrix g_inv = y.g.inverse();
  const UdlFactors f = udl_factorization(g_inv * y.J * y.g);
  const CVector d = principal_sqrt(f.diagonal.cwiseInverse());
  return {diag_of(d) * f.upper.inverse() * g_inv, diag_of(d.cwiseInverse()) * f.lower * g_inv};
}

DoublePoint random_near_identity(std::size_t n, Rng& rng, double eps) {
  CMatrix A = random_matrix(n, rng), B = random_matrix(n, rng);
  A /= A.norm();
  B /= B.norm();
  return {matrix_exp(eps * A), matrix_exp(eps * B)};
}

double verify_transport(const Observable& F, const Observable& H, const DoublePoint& x) {
  const PhasePoint y = psi_map(x);
  const DoubleFunction Fd = [F](const DoublePoint& z) { return F(psi_map(z)); };
  const DoubleFunction Hd = [H](const DoublePoint& z) { return H(psi_map(z)); };
  return std::abs(pb2(F, H, y) - double_pb(DoubleSign::Plus, Fd, Hd, x));
}

RVector poisson_tensor_singular_values(DoubleSign sign, const DoublePoint& x) {
  x.validate();
  const std::size_t n = x.n();
  const Complex i1(0.0, 1.0);
  // Exact derivatives of Re/Im of the matrix entries of g1 and g2.
  std::vector<DoubleGradient> grads;
  for (int which = 0; which < 2; ++which) {
    const CMatrix& g = which == 0 ? x.g1 : x.g2;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        CMatrix E = CMatrix::Zero(n, n);
        E(b, a) = 1.0;
        for (const Complex w : {Complex(1.0), -i1}) {
          const CMatrix left = w * g * E, right = w * E * g, zero = CMatrix::Zero(n, n);
          DoubleGradient d;
          if (which == 0) {
            d.left = {left, zero};
            d.right = {right, zero};
          } else {
            d.left = {zero, -left};
            d.right = {zero, -right};
          }
          grads.push_back(d);
        }
      }
    }
  }
  const auto m = static_cast<Eigen::Index>(grads.size());
  Eigen::MatrixXd P(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) P(i, j) = double_pb(sign, grads[i], grads[j]);
  }
  return Eigen::JacobiSVD<Eigen::MatrixXd>(P).singularValues();
}

}  // namespace bihamkit
