#pragma once

// The canonical bracket {,}_1 and the quadratic bracket {,}_2 on
// GL(n,C) x gl(n,C), their linear combinations, the unit-shift derivation
// and Jacobi-identity residuals.

#include "bihamkit/observables.hpp"

namespace bihamkit {

// Step used when a bracket value is itself differentiated (nested checks).
inline constexpr double kNestedFdStep = 1e-4;

// a {,}_1 + b {,}_2.
struct BracketSelector {
  double a = 1.0;
  double b = 0.0;

  static BracketSelector canonical() { return {1.0, 0.0}; }
  static BracketSelector quadratic() { return {0.0, 1.0}; }
  static BracketSelector combination(double a, double b);

  bool is_canonical() const { return a == 1.0 && b == 0.0; }
  bool is_quadratic() const { return a == 0.0 && b == 1.0; }
};

double pb1(const GradientBundle& f, const GradientBundle& h, const CMatrix& J);
double pb2(const GradientBundle& f, const GradientBundle& h);

double pb1(const Observable& F, const Observable& H, const PhasePoint& x);
double pb2(const Observable& F, const Observable& H, const PhasePoint& x);
double pb(const BracketSelector& sel, const Observable& F, const Observable& H, const PhasePoint& x);

// Reduced forms of {,}_2 valid on invariant functions: right-invariant,
// left-invariant, and U(n) x U(n) invariant.
double pb2_right_invariant(const GradientBundle& f, const GradientBundle& h);
double pb2_left_invariant(const GradientBundle& f, const GradientBundle& h);
double pb2_bi_invariant(const GradientBundle& f, const GradientBundle& h);

// x -> {F, H}(x) as an observable, differentiated by central differences
// with kNestedFdStep.
Observable bracket_observable(const BracketSelector& sel, const Observable& F, const Observable& H);

// D[F](g, J) = d/dt F(g, J + t 1) = <d2 F, 1>.
Observable shift_derivation(const Observable& F);

// D[{F,H}_2] - {D[F], H}_2 - {F, D[H]}_2.
double lie_derivative_bracket(const Observable& F, const Observable& H, const PhasePoint& x);

// {{F,G},H} + {{G,H},F} + {{H,F},G}. If scale is non-null it receives the
// largest magnitude among the outer bracket terms.
double jacobi_residual(const BracketSelector& sel, const Observable& F, const Observable& G, const Observable& H,
                       const PhasePoint& x, double* scale = nullptr);

}  // namespace bihamkit
