#include "bihamkit/brackets.hpp"
#include "bihamkit/errors.hpp"
#include "bihamkit/verification.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace bihamkit;
using testing_support::E;
using testing_support::I1;
using testing_support::scale_of;

namespace {

Observable tilde_component(const CMatrix& T) {
  return trace_word({{Letter::Constant, 1, T}, {Letter::JTilde, 1, {}}}, Part::Real);
}

// Closed form of {J_T, J_S}_2 written in terms of the matrix K = J or J~.
double quadratic_component_bracket(const CMatrix& K, const CMatrix& T, const CMatrix& S) {
  return pairing(commutator(K, T), r_map(commutator(S, K)) + 0.5 * (S * K + K * S));
}

}  // namespace

TEST(CanonicalBracket, ComponentsFollowTheCommutator) {
  CMatrix J = CMatrix::Zero(2, 2);
  J(0, 0) = 2.0;
  J(1, 1) = 5.0;
  const PhasePoint x{CMatrix::Identity(2, 2), J};
  EXPECT_NEAR(pb1(j_component(E(2, 0, 1)), j_component(E(2, 1, 0)), x), -3.0, 1e-14);
  Rng rng(1);
  for (int trial = 0; trial < 5; ++trial) {
    const PhasePoint y = random_phase_point(3, rng);
    const CMatrix T = random_matrix(3, rng), S = random_matrix(3, rng);
    EXPECT_NEAR(pb1(j_component(T), j_component(S), y), pairing(y.J, commutator(T, S)), 1e-12);
  }
}

TEST(CanonicalBracket, OneByOneGroupAgainstCurrent) {
  // At n = 1 the commutator term drops out and {Re g, Re J}_1 = Re g.
  const PhasePoint x{CMatrix::Constant(1, 1, Complex(0.7, -1.1)), CMatrix::Constant(1, 1, Complex(0.3, 0.4))};
  const Observable reg = g_coordinate(1, 0, 0, Part::Real);
  const Observable reJ = j_component(1, 0);
  EXPECT_NEAR(pb1(reg, reJ, x), 0.7, 1e-14);
  EXPECT_NEAR(pb1(reg.with_fd_step(1e-4), Observable("ReJ", [](const PhasePoint& y) { return y.J(0, 0).real(); }), x),
              0.7, 1e-9);
}

TEST(QuadraticBracket, ComponentBracketsMatchClosedForms) {
  Rng rng(2);
  for (std::size_t n : {2u, 3u}) {
    for (int trial = 0; trial < 5; ++trial) {
      const PhasePoint x = random_phase_point(n, rng);
      const CMatrix T = random_matrix(n, rng), S = random_matrix(n, rng);
      const double direct = pb2(j_component(T), j_component(S), x);
      EXPECT_NEAR(direct, quadratic_component_bracket(x.J, T, S), 1e-12 * scale_of(direct));
      const double tilde = pb2(tilde_component(T), tilde_component(S), x);
      EXPECT_NEAR(tilde, -quadratic_component_bracket(tilde_J(x), T, S), 1e-11 * scale_of(tilde));
    }
  }
}

TEST(Brackets, CurrentsCommuteWithTildeCurrents) {
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const PhasePoint x = random_phase_point(3, rng);
    const CMatrix T = random_matrix(3, rng), S = random_matrix(3, rng);
    EXPECT_NEAR(pb1(j_component(T), tilde_component(S), x), 0.0, 1e-12);
    EXPECT_NEAR(pb2(j_component(T), tilde_component(S), x), 0.0, 1e-12);
  }
}

TEST(Brackets, AntisymmetryAndBilinearity) {
  Rng rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const PhasePoint x = random_phase_point(3, rng);
    const Observable F = random_observable(3, rng), G = random_observable(3, rng), H = random_observable(3, rng);
    const double f1 = pb1(F, H, x), f2 = pb2(F, H, x);
    EXPECT_NEAR(f1, -pb1(H, F, x), 1e-12 * scale_of(f1));
    EXPECT_NEAR(f2, -pb2(H, F, x), 1e-12 * scale_of(f2));
    EXPECT_NEAR(pb1(F, F, x), 0.0, 1e-12 * scale_of(f1));
    EXPECT_NEAR(pb2(F, F, x), 0.0, 1e-12 * scale_of(f2));
    const Observable L = sum(F, G, 1.5, -2.0);
    EXPECT_NEAR(pb2(L, H, x), 1.5 * f2 - 2.0 * pb2(G, H, x), 1e-11 * scale_of(f2, pb2(G, H, x)));
  }
}

TEST(Brackets, SelectorIsLinear) {
  Rng rng(5);
  const PhasePoint x = random_phase_point(3, rng);
  const Observable F = random_observable(3, rng), H = random_observable(3, rng);
  const double a = pb1(F, H, x), b = pb2(F, H, x);
  EXPECT_DOUBLE_EQ(pb(BracketSelector::canonical(), F, H, x), a);
  EXPECT_DOUBLE_EQ(pb(BracketSelector::quadratic(), F, H, x), b);
  EXPECT_NEAR(pb(BracketSelector::combination(2, 3), F, H, x), 2 * a + 3 * b, 1e-12 * scale_of(a, b));
  EXPECT_THROW(BracketSelector::combination(0, 0), Error);
}

TEST(Brackets, LeibnizRule) {
  Rng rng(6);
  for (int trial = 0; trial < 5; ++trial) {
    const PhasePoint x = random_phase_point(3, rng);
    const Observable F = random_observable(3, rng), G = random_observable(3, rng), H = random_observable(3, rng);
    const Observable FG = product(F, G);
    for (const auto sel : {BracketSelector::canonical(), BracketSelector::quadratic()}) {
      const double lhs = pb(sel, FG, H, x);
      const double rhs = F(x) * pb(sel, G, H, x) + G(x) * pb(sel, F, H, x);
      EXPECT_NEAR(lhs, rhs, 1e-8 * scale_of(lhs));
    }
  }
}

TEST(ShiftDerivation, CoordinatesAndHamiltonians) {
  Rng rng(7);
  const PhasePoint x = random_phase_point(2, rng);
  EXPECT_NEAR(shift_derivation(g_coordinate(2, 0, 0, Part::Real))(x), 0.0, 1e-15);
  EXPECT_NEAR(shift_derivation(j_component(E(2, 0, 0)))(x), 1.0, 1e-15);
  EXPECT_NEAR(shift_derivation(j_component(E(2, 0, 1)))(x), 0.0, 1e-15);
  EXPECT_NEAR(shift_derivation(hamiltonian(2, Part::Real))(x), x.J.trace().real(), 1e-13);
  // Oracle: plain difference quotient along J -> J + t 1.
  const Observable H3 = hamiltonian(3, Part::Imag);
  const double h = 1e-5;
  const CMatrix one = CMatrix::Identity(2, 2);
  const double fd = (H3({x.g, x.J + h * one}) - H3({x.g, x.J - h * one})) / (2 * h);
  EXPECT_NEAR(shift_derivation(H3)(x), fd, 1e-8);
}

TEST(ShiftDerivation, LieDerivativeOfQuadraticIsCanonical) {
  Rng rng(8);
  const PhasePoint x = random_phase_point(2, rng);
  std::vector<Observable> coords;
  for (std::size_t k = 0; k < 8; ++k) coords.push_back(j_component(2, k));
  for (std::size_t a = 0; a < 2; ++a) {
    coords.push_back(g_coordinate(2, a, 1 - a, Part::Real));
    coords.push_back(g_coordinate(2, a, a, Part::Imag));
  }
  for (std::size_t i = 0; i < coords.size(); ++i) {
    for (std::size_t j = i + 1; j < coords.size(); j += 3) {
      const double lie = lie_derivative_bracket(coords[i], coords[j], x);
      EXPECT_NEAR(lie, pb1(coords[i], coords[j], x), 1e-6 * scale_of(lie)) << coords[i].name() << coords[j].name();
    }
  }
  // g-only pairs: both sides vanish.
  EXPECT_NEAR(lie_derivative_bracket(coords[8], coords[11], x), 0.0, 1e-9);
  for (int trial = 0; trial < 5; ++trial) {
    const Observable F = random_observable(2, rng), H = random_observable(2, rng);
    const double lie = lie_derivative_bracket(F, H, x);
    EXPECT_NEAR(lie, pb1(F, H, x), 1e-6 * scale_of(lie));
  }
}

TEST(Jacobi, BothBracketsAndCombinations) {
  Rng rng(9);
  for (std::size_t n : {2u, 3u}) {
    for (int trial = 0; trial < 3; ++trial) {
      const PhasePoint x = random_phase_point(n, rng);
      const Observable F = random_observable(n, rng), G = random_observable(n, rng), H = random_observable(n, rng);
      for (const auto sel : {BracketSelector::canonical(), BracketSelector::quadratic(),
                             BracketSelector::combination(uniform(rng, -2, 2), uniform(rng, 0.5, 2))}) {
        double scale = 0.0;
        const double r = jacobi_residual(sel, F, G, H, x, &scale);
        EXPECT_LT(std::abs(r), 1e-6 * std::max(1.0, scale));
      }
    }
  }
}

TEST(Jacobi, CanonicalCoordinateTriples) {
  Rng rng(10);
  const PhasePoint x = random_phase_point(2, rng);
  const Observable a = g_coordinate(2, 0, 1, Part::Real), b = j_component(2, 1), c = j_component(2, 6);
  EXPECT_LT(std::abs(jacobi_residual(BracketSelector::canonical(), a, b, c, x)), 1e-6);
}

TEST(Brackets, FunctionCommutesWithItsSquare) {
  Rng rng(11);
  const PhasePoint x = random_phase_point(2, rng);
  const Observable F = random_observable(2, rng);
  const Observable F2 = product(F, F);
  EXPECT_NEAR(pb2(F, F2, x), 0.0, 1e-10 * scale_of(F(x) * F(x)));
}

TEST(InvariantForms, RightLeftAndBiInvariantReductions) {
  Rng rng(12);
  const Observable R1 = trace_word({{Letter::G, 1, {}}, {Letter::GAdjoint, 1, {}}, {Letter::J, 1, {}}}, Part::Real,
                                   1.0, Invariance::Right);
  const Observable R2 = trace_word({{Letter::J, 2, {}}, {Letter::G, 1, {}}, {Letter::GAdjoint, 1, {}}}, Part::Imag,
                                   0.4 + I1, Invariance::Right);
  const Observable L1 = trace_word({{Letter::GAdjoint, 1, {}}, {Letter::G, 1, {}}, {Letter::JTilde, 1, {}}},
                                   Part::Real, 1.0, Invariance::Left);
  const Observable L2 = trace_word({{Letter::JTilde, 2, {}}, {Letter::GAdjoint, 1, {}}, {Letter::G, 1, {}}},
                                   Part::Imag, 0.3, Invariance::Left);
  const Observable B1 = pm_trace_word("+1-2", Part::Real, false);
  const Observable B2 = pm_trace_word("+2-1", Part::Imag, true);
  for (int trial = 0; trial < 5; ++trial) {
    const PhasePoint x = random_phase_point(3, rng);
    const auto check = [&](const Observable& F, const Observable& H, auto reduced) {
      const GradientBundle f = F.gradients(x), h = H.gradients(x);
      const double full = pb2(f, h);
      EXPECT_NEAR(reduced(f, h), full, 1e-10 * scale_of(full)) << F.name() << " " << H.name();
    };
    check(R1, R2, pb2_right_invariant);
    check(L1, L2, pb2_left_invariant);
    check(B1, B2, pb2_bi_invariant);
  }
}
