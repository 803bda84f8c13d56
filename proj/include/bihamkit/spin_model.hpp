#pragma once

// Two-spin coordinates (q, p, xi^l, xi^r) on the reduced slice, the spin
// Sutherland Hamiltonians, and the first reduced bracket written in these
// coordinates.

#include "bihamkit/reduction.hpp"

#include <functional>

namespace bihamkit {

struct SpinCoordinates {
  RVector q;
  RVector p;
  CMatrix xi_l;  // anti-Hermitian
  CMatrix xi_r;  // anti-Hermitian, diag(xi_l + xi_r) = 0

  std::size_t n() const { return static_cast<std::size_t>(q.size()); }
  // q regular, both spins anti-Hermitian, diagonal constraint.
  void validate() const;
};

// xi^l = -J^+, xi^r = (e^{-q} J e^q)^+, p_k = Re J_kk.
SpinCoordinates to_spin(const ReducedPoint& y);
// J_ij = p_i d_ij - (1 - d_ij)(coth(q_i - q_j) xi^l_ij + xi^r_ij / sinh(q_i - q_j)) - xi^l_ij.
ReducedPoint from_spin(const SpinCoordinates& s);

// (xi^l, xi^r) -> (tau xi^l tau^{-1}, tau xi^r tau^{-1}) for diagonal unitary tau.
SpinCoordinates gauge_transform(const SpinCoordinates& s, const CMatrix& tau);

// Closed-form two-spin Hamiltonian (equal to Re tr(J^2)/2).
double spin_hamiltonian_2(const SpinCoordinates& s);
// 1/2 sum p_i^2 + sum_{i<j} |xi_ij|^2 / sinh^2(q_i - q_j); xi anti-Hermitian
// with zero diagonal.
double spin_hamiltonian_1(const RVector& q, const RVector& p, const CMatrix& xi);

// Random coordinates satisfying every constraint.
SpinCoordinates random_spin_coordinates(std::size_t n, Rng& rng, double scale = 0.5);

// The split xi^l = xi^l_perp + xi_0, xi^r = xi^r_perp - xi_0.
struct FiveVariables {
  RVector q;
  RVector p;
  CMatrix xl_perp;
  CMatrix xr_perp;
  CMatrix xi0;  // diagonal anti-Hermitian
};
FiveVariables to_five(const SpinCoordinates& s);
SpinCoordinates from_five(const FiveVariables& v);

using SpinFunction = std::function<double(const SpinCoordinates&)>;

// Partial gradients with respect to the restricted trace pairing: dq, dp as
// real diagonals; d_xl, d_xr in the off-diagonal anti-Hermitian matrices;
// d_xi0 diagonal anti-Hermitian.
struct SpinGradient {
  RVector dq;
  RVector dp;
  CMatrix d_xl;
  CMatrix d_xr;
  CMatrix d_xi0;
};
SpinGradient spin_partial_gradients(const SpinFunction& F, const SpinCoordinates& s, double h = kDefaultFdStep);

// sum (dF/dq dH/dp - dH/dq dF/dp) + <xi^l_perp + xi_0, [F_l + F_0, H_l + H_0]>
//   + <xi^r_perp - xi_0, [F_r, H_r]>.
double spin_pb1(const SpinGradient& f, const SpinGradient& h, const SpinCoordinates& s);
double spin_pb1(const SpinFunction& F, const SpinFunction& H, const SpinCoordinates& s);
// The second reduced bracket evaluated by pulling back through from_spin.
double spin_pb2(const SpinFunction& F, const SpinFunction& H, const SpinCoordinates& s);

// f = F o to_spin as a torus-invariant reduced observable (FD gradients).
ReducedObservable spin_to_reduced(const SpinFunction& F, std::string name = "spin");
// F = f o from_spin.
SpinFunction reduced_to_spin(const ReducedObservable& f);

// nabla_1 f for f = F o to_spin, from the spin partial gradients:
// F_q - [R S^{-1} xi^r_perp + S^{-2} xi^l_perp, S F_r]^-_0.
RVector chain_rule_nabla1(const SpinGradient& F, const SpinCoordinates& s);
// d2 f for f = F o to_spin: (d2 f)^- = F_p + S F_r, (d2 f)^+ = -F_0 - F_l + C F_r.
CMatrix chain_rule_d2(const SpinGradient& F, const SpinCoordinates& s);

// ---- identities used to rewrite the first reduced bracket ----

// Random derivative data for two functions at a random point: everything
// the identities need, with the correct symmetry types.
struct SpinIdentityData {
  SpinCoordinates s;
  SpinGradient F;
  SpinGradient H;
};
SpinIdentityData random_spin_identity_data(std::size_t n, Rng& rng);

struct SpinIdentityResiduals {
  double sinh_cosh_commutator = 0.0;  // [S F, C H] - [S H, C F] = S [F, H]
  double cosh_sinh_sum = 0.0;         // [C F, C H] + [S F, S H] = C [F, H]
  double minus_minus = 0.0;           // <R[(d2f)^-, J^-], (d2h)^-> - exchange
  double plus_minus = 0.0;            // <R[(d2f)^+, J^+], (d2h)^-> - exchange
  double j_plus_minus = 0.0;          // <J^+, [(d2f)^-, (d2h)^-]>
  double j_plus_plus = 0.0;           // -<J^+, [(d2f)^+, (d2h)^+]>
  double collected = 0.0;             // sum of the R- and J^+-lines of the bracket
  double nabla_pairing = 0.0;         // <nabla_1 f, (d2h)^-_0>
  double momentum_terms = 0.0;        // <H_p, [R xi^l + S^{-1} xi^r, C F_r] + [xi^l, S F_r]>
  double bracket = 0.0;               // spin_pb1 = red_pb1 on the derived gradients
  double max() const;
};
SpinIdentityResiduals spin_identity_residuals(const SpinIdentityData& d);

}  // namespace bihamkit
