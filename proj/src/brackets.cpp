#include "bihamkit/brackets.hpp"

#include "bihamkit/errors.hpp"

#include <algorithm>
#include <cmath>

namespace bihamkit {

BracketSelector BracketSelector::combination(double a, double b) {
  if (a == 0.0 && b == 0.0) throw DomainError("bracket selector: (a, b) must not both vanish");
  return {a, b};
}

double pb1(const GradientBundle& f, const GradientBundle& h, const CMatrix& J) {
  return pairing(f.nabla1, h.d2) - pairing(h.nabla1, f.d2) + pairing(J, commutator(f.d2, h.d2));
}

double pb2(const GradientBundle& f, const GradientBundle& h) {
  const CMatrix h_mix = r_plus(h.nabla2_prime) - r_minus(h.nabla2);
  const CMatrix f_mix = r_plus(f.nabla2_prime) - r_minus(f.nabla2);
  return pairing(r_map(f.nabla1), h.nabla1) - pairing(r_map(f.nabla1_prime), h.nabla1_prime) +
         pairing(f.nabla2 - f.nabla2_prime, h_mix) + pairing(f.nabla1, h_mix) - pairing(h.nabla1, f_mix);
}

double pb1(const Observable& F, const Observable& H, const PhasePoint& x) {
  return pb1(F.gradients(x), H.gradients(x), x.J);
}

double pb2(const Observable& F, const Observable& H, const PhasePoint& x) {
  return pb2(F.gradients(x), H.gradients(x));
}

double pb(const BracketSelector& sel, const Observable& F, const Observable& H, const PhasePoint& x) {
  const auto f = F.gradients(x);
  const auto h = H.gradients(x);
  double value = 0.0;
  if (sel.a != 0.0) value += sel.a * pb1(f, h, x.J);
  if (sel.b != 0.0) value += sel.b * pb2(f, h);
  return value;
}

double pb2_right_invariant(const GradientBundle& f, const GradientBundle& h) {
  const CMatrix h_mix = r_plus(h.nabla2_prime) - r_minus(h.nabla2);
  const CMatrix f_mix = r_plus(f.nabla2_prime) - r_minus(f.nabla2);
  return pairing(r_map(f.nabla1), h.nabla1) + pairing(f.nabla2 - f.nabla2_prime, h_mix) +
         pairing(f.nabla1, h_mix) - pairing(h.nabla1, f_mix);
}

double pb2_left_invariant(const GradientBundle& f, const GradientBundle& h) {
  return pairing(f.nabla1_prime, r_map(h.nabla1_prime)) + 0.5 * pairing(f.nabla2, h.nabla2_prime) -
         0.5 * pairing(h.nabla2, f.nabla2_prime) + 0.5 * pairing(f.nabla1, h.nabla2_prime + h.nabla2) -
         0.5 * pairing(h.nabla1, f.nabla2_prime + f.nabla2);
}

double pb2_bi_invariant(const GradientBundle& f, const GradientBundle& h) {
  return 0.5 * (pairing(f.nabla2, h.nabla2_prime) - pairing(h.nabla2, f.nabla2_prime) +
                pairing(f.nabla1, h.nabla2_prime + h.nabla2) - pairing(h.nabla1, f.nabla2_prime + f.nabla2));
}

Observable bracket_observable(const BracketSelector& sel, const Observable& F, const Observable& H) {
  return Observable("{" + F.name() + "," + H.name() + "}",
                    [sel, F, H](const PhasePoint& x) { return pb(sel, F, H, x); })
      .with_fd_step(kNestedFdStep);
}

Observable shift_derivation(const Observable& F) {
  return Observable("D[" + F.name() + "]",
                    [F](const PhasePoint& x) {
                      const CMatrix I = CMatrix::Identity(x.g.rows(), x.g.cols());
                      return pairing(F.gradients(x).d2, I);
                    },
                    F.invariance())
      .with_fd_step(kNestedFdStep);
}

double lie_derivative_bracket(const Observable& F, const Observable& H, const PhasePoint& x) {
  const CMatrix I = CMatrix::Identity(x.g.rows(), x.g.cols());
  const double h = kNestedFdStep;
  auto at = [&](double t) { return pb2(F, H, PhasePoint{x.g, x.J + t * I}); };
  const double shifted_bracket = (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h);
  return shifted_bracket - pb2(shift_derivation(F), H, x) - pb2(F, shift_derivation(H), x);
}

double jacobi_residual(const BracketSelector& sel, const Observable& F, const Observable& G, const Observable& H,
                       const PhasePoint& x, double* scale) {
  const double t1 = pb(sel, bracket_observable(sel, F, G), H, x);
  const double t2 = pb(sel, bracket_observable(sel, G, H), F, x);
  const double t3 = pb(sel, bracket_observable(sel, H, F), G, x);
  if (scale != nullptr) *scale = std::max({std::abs(t1), std::abs(t2), std::abs(t3)});
  return t1 + t2 + t3;
}

}  // namespace bihamkit
