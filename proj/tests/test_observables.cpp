#include "bihamkit/errors.hpp"
#include "bihamkit/observables.hpp"
#include "bihamkit/verification.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace bihamkit;
using testing_support::E;
using testing_support::I1;

namespace {

PhasePoint point_with_J(const CMatrix& J) {
  return {CMatrix::Identity(J.rows(), J.cols()), J};
}

// Slope of F along (X_g on the left, X_g' on the right, X_J) by plain
// central differences; independent of fd_gradient.
double slope(const Observable& F, const PhasePoint& x, const CMatrix& Xl, const CMatrix& Xr, const CMatrix& XJ) {
  const double h = 1e-6;
  auto at = [&](double t) {
    return F({matrix_exp(t * Xl) * x.g * matrix_exp(t * Xr), x.J + t * XJ});
  };
  return (at(h) - at(-h)) / (2 * h);
}

}  // namespace

TEST(Hamiltonians, SecondGradientIsPowerOfJ) {
  Rng rng(3);
  const PhasePoint x = random_phase_point(3, rng);
  for (int k = 1; k <= 4; ++k) {
    const GradientBundle re = hamiltonian(k, Part::Real).gradients(x);
    const GradientBundle im = hamiltonian(k, Part::Imag).gradients(x);
    const CMatrix Jk1 = matrix_power(x.J, k - 1);
    EXPECT_LT(max_abs(re.d2 - Jk1), 1e-13) << k;
    EXPECT_LT(max_abs(im.d2 + I1 * Jk1), 1e-13) << k;
    EXPECT_LT(max_abs(re.nabla1), 1e-14);
    EXPECT_LT(max_abs(re.nabla1_prime), 1e-14);
  }
}

TEST(Hamiltonians, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(hamiltonian(1, Part::Real)(point_with_J(CMatrix::Identity(3, 3))), 3.0);
  CMatrix J = CMatrix::Zero(2, 2);
  J(0, 0) = 1.0;
  J(1, 1) = I1;
  EXPECT_NEAR(hamiltonian(2, Part::Real)(point_with_J(J)), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(hamiltonian(1, Part::Imag)(point_with_J(I1 * CMatrix::Identity(4, 4))), 4.0);
}

TEST(JComponent, SecondGradientIsTheDualMatrix) {
  // <E_12, J> = Re tr(E_12 J) = Re J_21; its J-gradient under the trace
  // pairing is E_12 itself.
  Rng rng(5);
  const PhasePoint x = random_phase_point(2, rng);
  const Observable F = j_component(E(2, 0, 1));
  EXPECT_NEAR(F(x), x.J(1, 0).real(), 1e-15);
  const GradientBundle b = F.gradients(x);
  EXPECT_LT(max_abs(b.d2 - E(2, 0, 1)), 1e-15);
  const GradientBundle fd = F.finite_difference_gradients(x);
  EXPECT_LT(max_abs(fd.d2 - E(2, 0, 1)), 1e-9);
}

TEST(JComponent, BasisOrderIsRealThenImaginaryRowMajor) {
  EXPECT_LT(max_abs(basis_element(2, 1) - E(2, 0, 1)), 0.0 + 1e-300);
  EXPECT_LT(max_abs(basis_element(2, 4 + 2) - I1 * E(2, 1, 0)), 1e-300);
  const PhasePoint x = point_with_J(testing_support::mat2(1.0, 2.0, 3.0 + 4.0 * I1, 5.0));
  // <i E_21, J> = Re(i J_12) = 0; <i E_12, J> = Re(i J_21) = -4.
  EXPECT_DOUBLE_EQ(j_component(2, 6)(x), 0.0);
  EXPECT_DOUBLE_EQ(j_component(2, 5)(x), -4.0);
}

TEST(Gradients, AnalyticMatchesFiniteDifferences) {
  Rng rng(11);
  for (std::size_t n : {2u, 3u}) {
    for (int trial = 0; trial < 10; ++trial) {
      const PhasePoint x = random_phase_point(n, rng);
      const Observable F = random_observable(n, rng);
      ASSERT_TRUE(F.has_analytic_gradients());
      const GradientBundle a = F.gradients(x);
      const GradientBundle f = F.finite_difference_gradients(x);
      for (auto [A, B] : {std::pair{&a.nabla1, &f.nabla1}, std::pair{&a.nabla1_prime, &f.nabla1_prime},
                          std::pair{&a.d2, &f.d2}, std::pair{&a.nabla2, &f.nabla2},
                          std::pair{&a.nabla2_prime, &f.nabla2_prime}}) {
        EXPECT_LT((*A - *B).norm(), 1e-6 * (1 + A->norm())) << F.name();
      }
    }
  }
}

TEST(Gradients, DualityAgainstDirectionalSlopes) {
  // <D, X> must reproduce the directional derivative in every slot.
  Rng rng(12);
  const std::size_t n = 3;
  for (int trial = 0; trial < 5; ++trial) {
    const PhasePoint x = random_phase_point(n, rng);
    const Observable F = random_observable(n, rng);
    const GradientBundle b = F.gradients(x);
    const CMatrix X = random_matrix(n, rng), Z = CMatrix::Zero(n, n);
    const double s = std::max(1.0, std::abs(F(x)));
    EXPECT_NEAR(pairing(b.nabla1, X), slope(F, x, X, Z, Z), 1e-7 * s);
    EXPECT_NEAR(pairing(b.nabla1_prime, X), slope(F, x, Z, X, Z), 1e-7 * s);
    EXPECT_NEAR(pairing(b.d2, X), slope(F, x, Z, Z, X), 1e-7 * s);
  }
}

TEST(Gradients, BundleConsistency) {
  // nabla1 = g nabla1' g^{-1}; nabla2 = J d2, nabla2' = d2 J.
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const PhasePoint x = random_phase_point(3, rng);
    const GradientBundle b = random_observable(3, rng).gradients(x);
    const double s = 1 + b.nabla1.norm();
    EXPECT_LT((b.nabla1 - x.g * b.nabla1_prime * x.g.inverse()).norm(), 1e-12 * s);
    EXPECT_LT((b.nabla2 - x.J * b.d2).norm(), 1e-13 * (1 + b.nabla2.norm()));
    EXPECT_LT((b.nabla2_prime - b.d2 * x.J).norm(), 1e-13 * (1 + b.nabla2.norm()));
  }
}

TEST(Gradients, NonFiniteValuesAreRejected) {
  const Observable F("blowup", [](const PhasePoint& x) {
    return x.J(0, 0).real() > 0.5 ? std::nan("") : x.J(0, 0).real();
  });
  const PhasePoint x = point_with_J(0.5 * CMatrix::Identity(2, 2));
  EXPECT_THROW(F.gradients(x), Error);
}

TEST(PhasePoint, SingularGroupElementIsRejected) {
  PhasePoint x{CMatrix::Zero(2, 2), CMatrix::Identity(2, 2)};
  x.g(0, 0) = 1.0;
  EXPECT_THROW(x.validate(), SingularMatrixError);
  EXPECT_THROW(hamiltonian(1, Part::Real).gradients(x), SingularMatrixError);
}

TEST(TildeJ, IdentityGroupElementNegates) {
  Rng rng(2);
  const CMatrix J = random_matrix(3, rng);
  EXPECT_LT(max_abs(tilde_J(point_with_J(J)) + J), 1e-15);
}

TEST(TildeJ, FunctionalRelationsWithTraces) {
  Rng rng(4);
  const PhasePoint x = random_phase_point(3, rng);
  const CMatrix Jt = tilde_J(x);
  for (int k = 1; k <= 3; ++k) {
    const double lhs = matrix_power(x.J, k).trace().real();
    const double rhs = (k % 2 == 0 ? 1.0 : -1.0) * matrix_power(Jt, k).trace().real();
    EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(lhs)));
  }
}

TEST(TraceWords, HermitianPartWordIsTrace) {
  Rng rng(6);
  const CMatrix J = random_hermitian(3, rng);
  EXPECT_NEAR(pm_trace_word("-1", Part::Real, false)(point_with_J(J)), J.trace().real(), 1e-14);
}

TEST(TraceWords, MixedWordAtShiftedIdentityVanishes) {
  const CMatrix J = (1.0 + I1) * CMatrix::Identity(2, 2);
  const Observable w = pm_trace_word("+1-1", Part::Real, false);
  EXPECT_NEAR(w(point_with_J(J)), 0.0, 1e-15);
  EXPECT_NEAR(pm_trace_word("+1-1", Part::Imag, false)(point_with_J(J)), 2.0, 1e-15);
}

TEST(TraceWords, PatternParsing) {
  const auto p = parse_pm_pattern("+2-1+0-3");
  ASSERT_EQ(p.size(), 3u);
  EXPECT_TRUE(p[0].plus);
  EXPECT_EQ(p[0].power, 2);
  EXPECT_FALSE(p[2].plus);
  EXPECT_EQ(p[2].power, 3);
  EXPECT_THROW(parse_pm_pattern("*1"), Error);
  EXPECT_THROW(parse_pm_pattern(""), Error);
}

TEST(Invariance, DeclaredSymmetriesHoldUnderRandomProbes) {
  Rng rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const PhasePoint x = random_phase_point(3, rng);
    for (const char* pattern : {"+1-2", "-3", "+2-1+1", "+2"}) {
      for (bool tilde : {false, true}) {
        const Observable w = pm_trace_word(pattern, Part::Real, tilde);
        EXPECT_EQ(w.invariance(), Invariance::Both);
        EXPECT_LT(invariance_defect(w, x, rng), 1e-12 * std::max(1.0, std::abs(w(x)))) << pattern;
      }
    }
    const Observable H3 = hamiltonian(3, Part::Imag);
    EXPECT_LT(invariance_defect(H3, x, rng), 1e-12);
  }
}

TEST(Invariance, RightInvariantHasHermitianPrimeGradient) {
  // g g^* and J are unchanged by g -> g eta^{-1}.
  Rng rng(9);
  const Observable F = trace_word({{Letter::G, 1, {}}, {Letter::GAdjoint, 1, {}}, {Letter::J, 2, {}}}, Part::Real,
                                  0.7 - 0.2 * I1, Invariance::Right);
  for (int trial = 0; trial < 5; ++trial) {
    const PhasePoint x = random_phase_point(3, rng);
    EXPECT_LT(invariance_defect(F, x, rng), 1e-12 * std::max(1.0, std::abs(F(x))));
    const GradientBundle b = F.gradients(x);
    EXPECT_LT(max_abs(anti_part(b.nabla1_prime)), 1e-12 * (1 + max_abs(b.nabla1_prime)));
  }
}

TEST(Invariance, LeftInvariantGradientRelation) {
  // g^* g and J~ are unchanged by (g, J) -> (eta g, eta J eta^{-1}).
  Rng rng(10);
  const Observable F = trace_word({{Letter::GAdjoint, 1, {}}, {Letter::G, 1, {}}, {Letter::JTilde, 1, {}}},
                                  Part::Imag, 1.3, Invariance::Left);
  for (int trial = 0; trial < 5; ++trial) {
    const PhasePoint x = random_phase_point(3, rng);
    EXPECT_LT(invariance_defect(F, x, rng), 1e-12 * std::max(1.0, std::abs(F(x))));
    const GradientBundle b = F.gradients(x);
    EXPECT_LT(max_abs(anti_part(b.nabla1) - anti_part(b.nabla2_prime - b.nabla2)), 1e-11 * (1 + max_abs(b.nabla1)));
  }
}

TEST(Registry, ParsesKnownNamesAndRejectsOthers) {
  const PhasePoint x = point_with_J(testing_support::mat2(1.0, 2.0, 3.0, 4.0 * I1));
  EXPECT_DOUBLE_EQ(parse_observable("H:1", 2)(x), 1.0);
  EXPECT_DOUBLE_EQ(parse_observable("Htilde:1", 2)(x), 4.0);
  EXPECT_DOUBLE_EQ(parse_observable("Jk:1,2,re", 2)(x), 3.0);
  EXPECT_DOUBLE_EQ(parse_observable("gr:2,2", 2)(x), 1.0);
  EXPECT_DOUBLE_EQ(parse_observable("gi:1,2", 2)(x), 0.0);
  EXPECT_THROW(parse_observable("Jk:3,1,re", 2), Error);
  EXPECT_THROW(parse_observable("nope:1", 2), Error);
  EXPECT_THROW(parse_observable("H", 2), Error);
  EXPECT_THROW(parse_observable("H:x", 2), Error);
}

TEST(Combinators, SumAndProductGradients) {
  Rng rng(14);
  const PhasePoint x = random_phase_point(2, rng);
  const Observable F = random_observable(2, rng), H = random_observable(2, rng);
  const Observable S = sum(F, H, 2.0, -0.5), P = product(F, H);
  EXPECT_NEAR(S(x), 2.0 * F(x) - 0.5 * H(x), 1e-13);
  EXPECT_NEAR(P(x), F(x) * H(x), 1e-13);
  const GradientBundle gf = F.gradients(x), gh = H.gradients(x);
  const CMatrix expected = F(x) * gh.d2 + H(x) * gf.d2;
  EXPECT_LT((P.gradients(x).d2 - expected).norm(), 1e-6 * (1 + expected.norm()));
}
