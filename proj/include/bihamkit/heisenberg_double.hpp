#pragma once

// G x G with the indefinite pairing <(X1,X2),(Y1,Y2)>_2 = <X1,Y1> - <X2,Y2>,
// its splitting into the diagonal subalgebra {(X,X)} and the dual one
// {(r+(Z), r-(Z))}, the Drinfeld (minus) and Heisenberg (plus) brackets, and
// the factorization map psi that carries the Heisenberg bracket to the
// quadratic bracket on G x gl(n).

#include "bihamkit/brackets.hpp"

#include <functional>
#include <utility>

namespace bihamkit {

struct DoublePoint {
  CMatrix g1;
  CMatrix g2;

  std::size_t n() const { return static_cast<std::size_t>(g1.rows()); }
  // Square, same size, finite, both numerically invertible.
  void validate() const;
};

struct MatrixPair {
  CMatrix first;
  CMatrix second;
};

double pairing2(const MatrixPair& X, const MatrixPair& Y);

// (X1, X2) = (Y, Y) + (r+(Z), r-(Z)) with Z = X1 - X2, Y = X1 - r+(Z).
struct DoubleSplit {
  CMatrix diagonal;  // Y
  CMatrix dual;      // Z
};
DoubleSplit split_double(const MatrixPair& X);

// rho = (P_diag - P_dual) / 2.
MatrixPair rho(const MatrixPair& X);

// Left and right derivatives against <.,.>_2:
//   <D F, (X1,X2)>_2  = d/dt F(e^{tX1} g1, e^{tX2} g2)
//   <D' F, (X1,X2)>_2 = d/dt F(g1 e^{tX1}, g2 e^{tX2})
struct DoubleGradient {
  MatrixPair left;
  MatrixPair right;
};

using DoubleFunction = std::function<double(const DoublePoint&)>;

// Functions on G x G are differentiated with a fourth-order stencil, which
// keeps nested brackets accurate enough for Jacobi checks.
inline constexpr double kDoubleFdStep = 1e-3;
inline constexpr double kDoubleNestedFdStep = 1e-2;

DoubleGradient double_gradients(const DoubleFunction& F, const DoublePoint& x, double h = kDoubleFdStep);

enum class DoubleSign { Plus, Minus };

// <D F, rho D H>_2 +- <D' F, rho D' H>_2; Minus is the Drinfeld double
// bracket, Plus the Heisenberg double bracket.
double double_pb(DoubleSign sign, const DoubleGradient& f, const DoubleGradient& h);
double double_pb(DoubleSign sign, const DoubleFunction& F, const DoubleFunction& H, const DoublePoint& x);

// {{F,G},H} + cyclic with the outer derivatives at kDoubleNestedFdStep.
double double_jacobi_residual(DoubleSign sign, const DoubleFunction& F, const DoubleFunction& G,
                              const DoubleFunction& H, const DoublePoint& x, double* scale = nullptr);

// ---- Gauss factorizations ----

// M = U D L with U unit upper, D diagonal, L unit lower; no pivoting.
// FactorizationError when a pivot is below 1e-12 relative to max|M|.
struct UdlFactors {
  CMatrix upper;
  CVector diagonal;
  CMatrix lower;
};
UdlFactors udl_factorization(const CMatrix& M);

// Principal square root of each entry; FactorizationError near the
// negative real axis.
CVector principal_sqrt(const CVector& d);

// (g1, g2) -> (g, J): J = g1^{-1} g2, and g = g1^{-1} a_> a_0 with
// g1 g2^{-1} = a_> a_0^2 a_< (UDL, a_0 principal root).
PhasePoint psi_map(const DoublePoint& x);
// Inverse: g^{-1} J g = U D L, d = D^{-1/2}, g1 = diag(d) U^{-1} g^{-1},
// g2 = diag(d)^{-1} L g^{-1}.
DoublePoint psi_inverse(const PhasePoint& y);

// g1 = exp(eps A), g2 = exp(eps B) with A, B of unit Frobenius norm.
DoublePoint random_near_identity(std::size_t n, Rng& rng, double eps = 0.1);

// |pb2(F, H, psi(x)) - double_pb(Plus, F o psi, H o psi, x)|.
double verify_transport(const Observable& F, const Observable& H, const DoublePoint& x);

// Singular values of the matrix {x_a, x_b} over the 4n^2 real coordinates
// of (g1, g2), in decreasing order. A symplectic bracket has all of them
// nonzero.
RVector poisson_tensor_singular_values(DoubleSign sign, const DoublePoint& x);

}  // namespace bihamkit
