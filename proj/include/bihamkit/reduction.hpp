#pragma once

// Reduction of the two brackets under U(n) x U(n): the slice of points
// (e^q, J) with strictly decreasing q, torus-invariant functions on it, the
// reconstruction of unreduced gradients, the reduced brackets, their
// Hamiltonian vector fields, and the restrictions to Hermitian (J^+ = 0)
// and anti-Hermitian (J^- = 0) J.

#include "bihamkit/brackets.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace bihamkit {

struct ReducedPoint {
  RVector q;
  CMatrix J;

  std::size_t n() const { return static_cast<std::size_t>(q.size()); }
  // Sizes agree, entries finite, q regular.
  void validate() const;
};

// nabla_1 f lives in the real diagonal matrices and is stored as its
// diagonal; d2 f is a full complex matrix.
struct ReducedGradient {
  RVector dq;
  CMatrix d2;
};

// A vector field evaluated at a point: E[q] and E[J].
struct TangentUpdate {
  RVector dq;
  CMatrix dJ;
};

// E[f] = <nabla_1 f, E[q]> + <d2 f, E[J]>.
double apply_field(const TangentUpdate& field, const ReducedGradient& f);

class ReducedObservable {
 public:
  using Evaluator = std::function<double(const ReducedPoint&)>;
  using Differentiator = std::function<ReducedGradient(const ReducedPoint&)>;

  ReducedObservable(std::string name, Evaluator eval, bool torus_invariant, Differentiator analytic = nullptr);

  // A user-supplied function declared torus invariant. The declaration is
  // checked with 8 random torus conjugations at a seeded random point of
  // size n (tolerance 1e-9 relative to max(1, |f|)); DomainError on failure.
  static ReducedObservable verified(std::string name, Evaluator eval, std::size_t n, std::uint64_t seed = 1,
                                    Differentiator analytic = nullptr);

  const std::string& name() const { return name_; }
  bool torus_invariant() const { return torus_invariant_; }
  bool has_analytic_gradients() const { return static_cast<bool>(analytic_); }
  double fd_step() const { return fd_step_; }

  double operator()(const ReducedPoint& y) const { return eval_(y); }
  ReducedGradient gradients(const ReducedPoint& y) const;
  // Central differences: q along the real diagonal directions only, J along
  // the 2n^2 real basis directions.
  ReducedGradient finite_difference_gradients(const ReducedPoint& y) const;

  ReducedObservable with_fd_step(double h) const;

 private:
  std::string name_;
  Evaluator eval_;
  bool torus_invariant_;
  Differentiator analytic_;
  double fd_step_ = kDefaultFdStep;
};

// Largest |f(q, J) - f(q, tau J tau^{-1})| over random diagonal unitaries.
double torus_defect(const ReducedObservable& f, const ReducedPoint& y, Rng& rng, int probes = 8);

// ---- reduced observable families (analytic gradients, torus invariant) ----

// h_k = Re tr(J^k)/k, h~_k = Im tr(J^k)/k.
ReducedObservable reduced_hamiltonian(int k, Part part);
// Re/Im tr of an alternating word in J^+ and J^-, e.g. "+1-2".
ReducedObservable reduced_trace_word(const std::string& pattern, Part part);

// One factor J_ab (or its complex conjugate) of a monomial; 0-based indices.
struct JFactor {
  std::size_t a = 0;
  std::size_t b = 0;
  bool conjugate = false;
};
// Re or Im of coeff * prod J_{a_i b_i}. Torus invariance requires every index
// to occur equally often as a row and as a column index (a conjugated factor
// counts as J_ba); unbalanced monomials are rejected with DomainError.
ReducedObservable cycle_monomial(std::vector<JFactor> factors, Complex coeff = 1.0, Part part = Part::Real);

// q_i (0-based) and exp(<c, q>).
ReducedObservable q_coordinate(std::size_t i);
ReducedObservable q_exponential(RVector c);
ReducedObservable reduced_constant(double c);

ReducedObservable reduced_sum(const ReducedObservable& f, const ReducedObservable& h, double a = 1.0, double b = 1.0);
ReducedObservable reduced_product(const ReducedObservable& f, const ReducedObservable& h);

// A random torus-invariant combination of the families above (a spectral or
// trace-word term, a cycle monomial, and a q-weighted cycle monomial), with
// analytic gradients.
ReducedObservable random_reduced_observable(std::size_t n, Rng& rng);

// Random regular reduced point; J has entries of size ~ j_scale.
ReducedPoint random_reduced_point(std::size_t n, Rng& rng, double j_scale = 0.6);

// ---- slice and extensions ----

// (g, J) -> (q, A^{-1} J A) with g = A e^q B^{-1} in the fixed torus gauge.
ReducedPoint project_to_slice(const PhasePoint& x);
// (e^q, J).
PhasePoint embed_slice(const ReducedPoint& y);

// The U(n) x U(n) invariant observable f o project_to_slice (finite-difference
// gradients). DomainError unless f is torus invariant.
Observable extend_invariant(const ReducedObservable& f);

// nabla_1 F(e^q, J) = [d2 f, J]^+ + nabla_1 f + R(q)[d2 f, J]^+ for the
// invariant extension F of f.
CMatrix extension_nabla1(const ReducedGradient& f, const ReducedPoint& y);
CMatrix extension_nabla1(const ReducedObservable& f, const ReducedPoint& y);

// ---- reduced brackets ----

double red_pb1(const ReducedGradient& f, const ReducedGradient& h, const ReducedPoint& y);
double red_pb2(const ReducedGradient& f, const ReducedGradient& h, const ReducedPoint& y);
double red_pb1(const ReducedObservable& f, const ReducedObservable& h, const ReducedPoint& y);
double red_pb2(const ReducedObservable& f, const ReducedObservable& h, const ReducedPoint& y);
double red_pb(const BracketSelector& sel, const ReducedObservable& f, const ReducedObservable& h,
              const ReducedPoint& y);

// Short forms valid when h is a spectral Hamiltonian ([d2 h, J] = 0):
//   <nabla_1 f, D^-_0> + <d2 f, [R(q) D^- - D^+, J]>
// with D = d2 h for the first bracket and D = nabla_2 h = J d2 h for the
// second.
double red_pb1_spectral(const ReducedGradient& f, const ReducedGradient& h, const ReducedPoint& y);
double red_pb2_spectral(const ReducedGradient& f, const ReducedGradient& h, const ReducedPoint& y);

// {{f,g},h} + cyclic for a reduced bracket, outer derivatives by central
// differences with kNestedFdStep.
double reduced_jacobi_residual(const BracketSelector& sel, const ReducedObservable& f, const ReducedObservable& g,
                               const ReducedObservable& h, const ReducedPoint& y, double* scale = nullptr);

// ---- Hamiltonian vector fields ----

// Field E with E[f] = {f, h}_i for every f, read off from the bracket
// formula by duality (which = 1 or 2).
TangentUpdate field_by_duality(int which, const ReducedGradient& h, const ReducedPoint& y);

// Closed forms of the canonical (which = 1) and quadratic (which = 2) fields
// split into E[q], E[J^-] (Hermitian) and E[J^+] (anti-Hermitian).
struct SplitTangent {
  RVector dq;
  CMatrix dJ_minus;
  CMatrix dJ_plus;
  TangentUpdate combined() const { return {dq, dJ_minus + dJ_plus}; }
};
SplitTangent reduced_vector_field(int which, const ReducedGradient& h, const ReducedPoint& y);
SplitTangent reduced_vector_field(const BracketSelector& sel, const ReducedObservable& h, const ReducedPoint& y);

// Fields of h_k (Part::Real) or h~_k (Part::Imag) under bracket `which`,
// from their closed forms (k >= 1; the canonical field of h_k uses J^{k-1}).
TangentUpdate spectral_field(int k, Part kind, int which, const ReducedPoint& y);

// Restriction to Hermitian J: V[q_j] = ((J^-)^m)_jj, V[J^-] = [R(q)(J^-)^m, J^-]
// with m = k for which = 2 and m = k - 1 for which = 1.
TangentUpdate v_field(int k, int which, const ReducedPoint& y);

// Restriction to anti-Hermitian J of the fields of h_k (Real) and h~_k
// (Imag); identically zero for the parities that vanish there.
TangentUpdate u_field(int k, Part kind, int which, const ReducedPoint& y);

// Infinitesimal gauge transformation: Z[q] = 0, Z[J] = [T, J] for T
// diagonal anti-Hermitian.
TangentUpdate gauge_field(const CMatrix& T, const ReducedPoint& y);

// ---- restrictions to the Hermitian / anti-Hermitian slices ----

ReducedPoint restrict_minus(const ReducedPoint& y);  // J -> J^-
ReducedPoint restrict_plus(const ReducedPoint& y);   // J -> J^+

// Brackets on Hermitian J. Gradients of the restricted functions are
// (nabla_1 f, (d2 f)^-); d2 is projected to its Hermitian part here.
// DomainError if y.J is not Hermitian.
double minus_pb1(const ReducedGradient& f, const ReducedGradient& h, const ReducedPoint& y);
double minus_pb2(const ReducedGradient& f, const ReducedGradient& h, const ReducedPoint& y);
double minus_pb1(const ReducedObservable& f, const ReducedObservable& h, const ReducedPoint& y);
double minus_pb2(const ReducedObservable& f, const ReducedObservable& h, const ReducedPoint& y);

// ---- the trace identity behind the quadratic field on the slices ----

// For arbitrary J, d2 f, d2 h. Each entry is |lhs - rhs| of one identity.
struct TraceIdentityResiduals {
  double x_definition = 0.0;   // X (bracket form) = 4<f+, (J+ h+ J-)+> + 4<f-, (J- h- J+)->
  double x_alternative = 0.0;  // X (bracket form) = X (commutator form)
  double exchange_first = 0.0;    // <J d2f, d2h J> - exchange
  double exchange_second = 0.0;   // <[d2f, J]^+, (J d2h + d2h J)^+> - exchange
  double max() const;
};
TraceIdentityResiduals trace_identity_residuals(const CMatrix& J, const CMatrix& df, const CMatrix& dh);

// ---- reduced dynamics ----

using ReducedField = std::function<TangentUpdate(const ReducedPoint&)>;

// Fixed-step RK4 on (q, J); trajectory receives steps + 1 points if non-null.
ReducedPoint reduced_flow(const ReducedPoint& y0, const ReducedField& field, double t, int steps,
                          std::vector<ReducedPoint>* trajectory = nullptr);

}  // namespace bihamkit
