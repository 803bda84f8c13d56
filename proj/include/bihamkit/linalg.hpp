#pragma once

// Matrix foundation: gl(n,C) viewed as a real vector space, its splittings,
// the trace pairing, the standard r-matrix, the coth(ad_q) operator and the
// Cartan (singular value) decomposition.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>

namespace bihamkit {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
// Real diagonal matrices (q, p, ...) are stored as their diagonal.
using RVector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;

// Absolute gap below which neighbouring q-entries count as coinciding.
inline constexpr double kRegularityGap = 1e-8;

struct TriangularParts {
  CMatrix upper;  // strictly upper triangular
  CMatrix diag;
  CMatrix lower;  // strictly lower triangular
};

// X = X^+ + X^- with X^+ anti-Hermitian and X^- Hermitian.
struct HermitianParts {
  CMatrix anti;
  CMatrix herm;
};

struct CartanFactors {
  CMatrix A;  // unitary
  RVector q;  // strictly decreasing
  CMatrix B;  // unitary
};

enum class AdFunction { Sinh, Cosh, InvSinh };

// Throws DomainError for non-square input or non-finite entries.
void require_square(const CMatrix& X, const char* what);
void require_same_size(const CMatrix& X, const CMatrix& Y, const char* what);

TriangularParts triangular_split(const CMatrix& X);
HermitianParts hermitian_split(const CMatrix& X);

inline CMatrix anti_part(const CMatrix& X) { return (X - X.adjoint()) / 2.0; }
inline CMatrix herm_part(const CMatrix& X) { return (X + X.adjoint()) / 2.0; }
CMatrix diagonal_part(const CMatrix& X);
CMatrix off_diagonal_part(const CMatrix& X);

// <X, Y> = Re tr(XY).
double pairing(const CMatrix& X, const CMatrix& Y);

inline CMatrix commutator(const CMatrix& X, const CMatrix& Y) { return X * Y - Y * X; }

// r(X) = (X_> - X_<)/2 and r_pm = r +- id/2.
CMatrix r_map(const CMatrix& X);
CMatrix r_plus(const CMatrix& X);
CMatrix r_minus(const CMatrix& X);

// Throws RegularityError unless q_1 > q_2 > ... > q_n with gaps above
// kRegularityGap.
void require_regular(const RVector& q);

// Scalar kernels with a series branch for small arguments.
double coth_safe(double x);
double inv_sinh_safe(double x);

// (R(q)X)_ii = 0, (R(q)X)_ij = coth(q_i - q_j) X_ij.
CMatrix R_q(const RVector& q, const CMatrix& X);

// Entrywise multiplication by sinh, cosh or 1/sinh of (q_i - q_j); the last
// one is only defined on zero-diagonal X.
CMatrix ad_q_function(const RVector& q, const CMatrix& X, AdFunction kind);

CMatrix diag_matrix(const RVector& d);
CMatrix exp_diag(const RVector& q);
RVector real_diagonal(const CMatrix& X);

// g = A exp(q) B^{-1}, torus gauge fixed so that in each column of A the
// entry of largest modulus is real and positive.
CartanFactors cartan_decompose(const CMatrix& g);

// Scaling and squaring around a diagonal (6,6) Pade approximant.
CMatrix matrix_exp(const CMatrix& X);

CMatrix matrix_power(const CMatrix& X, int k);

// Max-abs entry norm.
double max_abs(const CMatrix& X);

// Canonical real basis of gl(n,C): E_ab in row-major order, then i E_ab.
CMatrix basis_element(std::size_t n, std::size_t index);
inline std::size_t real_dimension(std::size_t n) { return 2 * n * n; }

}  // namespace bihamkit
