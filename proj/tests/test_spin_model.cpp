#include "bihamkit/errors.hpp"
#include "bihamkit/spin_model.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace bihamkit;
using testing_support::I1;
using testing_support::scale_of;

namespace {

// A few torus-invariant functions of the spin coordinates.
double invariant_a(const SpinCoordinates& s) {
  return s.p(0) * (s.xi_l(0, 1) * s.xi_r(1, 0)).real() + std::norm(s.xi_r(0, 1)) + std::sin(s.q(1)) * s.p(1);
}

double invariant_b(const SpinCoordinates& s) {
  const std::size_t n = s.n();
  return (s.xi_l(0, n - 1) * s.xi_l(n - 1, 0) * s.xi_r(0, 0)).imag() + s.p(n - 1) * s.p(n - 1) * s.q(0) +
         std::norm(s.xi_l(0, 1) + s.xi_r(0, 1));
}

CMatrix diagonal_unitary(const RVector& phases) {
  CMatrix tau = CMatrix::Zero(phases.size(), phases.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i) tau(i, i) = std::exp(I1 * phases(i));
  return tau;
}

}  // namespace

TEST(SpinCoordinates, HermitianCurrentHasNoLeftSpin) {
  Rng rng(1);
  const ReducedPoint y{random_regular_q(3, rng), random_hermitian(3, rng, 0.5)};
  const SpinCoordinates s = to_spin(y);
  EXPECT_LT(max_abs(s.xi_l), 1e-15);
  const CMatrix conj = exp_diag(-y.q) * y.J * exp_diag(y.q);
  EXPECT_LT(max_abs(s.xi_r - off_diagonal_part(anti_part(conj))), 1e-14);
  EXPECT_LT((s.p - y.J.diagonal().real()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SpinCoordinates, RealDiagonalCurrentIsFreeMotion) {
  Rng rng(2);
  const RVector d = RVector::Random(3);
  const SpinCoordinates s = to_spin({random_regular_q(3, rng), diag_matrix(d)});
  EXPECT_EQ(max_abs(s.xi_l), 0.0);
  EXPECT_EQ(max_abs(s.xi_r), 0.0);
  EXPECT_EQ(s.p, d);
  EXPECT_NEAR(spin_hamiltonian_2(s), 0.5 * d.squaredNorm(), 1e-15);
}

TEST(SpinCoordinates, Roundtrips) {
  Rng rng(3);
  for (std::size_t n : {2u, 3u, 4u}) {
    for (int trial = 0; trial < 10; ++trial) {
      const ReducedPoint y = random_reduced_point(n, rng);
      const ReducedPoint z = from_spin(to_spin(y));
      EXPECT_LT(max_abs(z.J - y.J), 1e-12);
      const SpinCoordinates s = random_spin_coordinates(n, rng);
      const SpinCoordinates t = to_spin(from_spin(s));
      EXPECT_LT(max_abs(t.xi_l - s.xi_l), 1e-12);
      EXPECT_LT(max_abs(t.xi_r - s.xi_r), 1e-12);
      EXPECT_LT((t.p - s.p).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(SpinCoordinates, ReconstructionAgainstEntrywiseFormula) {
  Rng rng(4);
  const SpinCoordinates s = random_spin_coordinates(3, rng);
  const CMatrix J = from_spin(s).J;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Complex expected = -s.xi_l(i, j);
      if (i == j) {
        expected += s.p(i);
      } else {
        const double x = s.q(i) - s.q(j);
        expected -= s.xi_l(i, j) / std::tanh(x) + s.xi_r(i, j) / std::sinh(x);
      }
      EXPECT_LT(std::abs(J(i, j) - expected), 1e-14);
    }
  }
}

TEST(SpinCoordinates, NoLeftSpinGivesTheHermitianSutherlandCurrent) {
  Rng rng(5);
  SpinCoordinates s = random_spin_coordinates(3, rng);
  s.xi_l.setZero();
  s.xi_r = off_diagonal_part(s.xi_r);
  const CMatrix J = from_spin(s).J;
  EXPECT_LT(max_abs(J - J.adjoint()), 1e-15);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const Complex expected = i == j ? Complex(s.p(i)) : -s.xi_r(i, j) / std::sinh(s.q(i) - s.q(j));
      EXPECT_LT(std::abs(J(i, j) - expected), 1e-14);
    }
  }
  EXPECT_NEAR(spin_hamiltonian_2(s), spin_hamiltonian_1(s.q, s.p, s.xi_r), 1e-13);
  EXPECT_NEAR(spin_hamiltonian_1(s.q, s.p, s.xi_r), 0.5 * (J * J).trace().real(), 1e-13);
}

TEST(SpinCoordinates, ZeroSpinsGiveDiagonalMomenta) {
  Rng rng(6);
  SpinCoordinates s = random_spin_coordinates(3, rng);
  s.xi_l.setZero();
  s.xi_r.setZero();
  EXPECT_LT(max_abs(from_spin(s).J - diag_matrix(s.p)), 1e-15);
  EXPECT_NEAR(spin_hamiltonian_1(s.q, s.p, s.xi_r), 0.5 * s.p.squaredNorm(), 1e-15);
}

TEST(SpinHamiltonians, TwoSpinEnergyIsHalfTraceSquare) {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const ReducedPoint y = random_reduced_point(2 + trial % 3, rng);
    const double expected = 0.5 * (y.J * y.J).trace().real();
    EXPECT_NEAR(spin_hamiltonian_2(to_spin(y)), expected, 1e-12 * scale_of(expected));
  }
}

TEST(SpinHamiltonians, RankOneSpinGivesSutherland) {
  const double kappa = 0.7;
  RVector q(3), p(3);
  q << 1.1, 0.2, -0.9;
  p << 0.3, -0.4, 1.2;
  CMatrix xi = CMatrix::Constant(3, 3, I1 * kappa);
  xi.diagonal().setZero();
  double expected = 0.5 * p.squaredNorm();
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) expected += kappa * kappa / std::pow(std::sinh(q(i) - q(j)), 2);
  }
  EXPECT_NEAR(spin_hamiltonian_1(q, p, xi), expected, 1e-14);
  xi(0, 0) = I1;
  EXPECT_THROW(spin_hamiltonian_1(q, p, xi), Error);
}

TEST(SpinGauge, EquivarianceAndInvariance) {
  Rng rng(8);
  const SpinCoordinates s = random_spin_coordinates(3, rng);
  const SpinCoordinates same = gauge_transform(s, CMatrix::Identity(3, 3));
  EXPECT_EQ(same.xi_l, s.xi_l);
  EXPECT_EQ(same.xi_r, s.xi_r);
  const CMatrix tau = diagonal_unitary(RVector::Random(3) * 3.0);
  const SpinCoordinates t = gauge_transform(s, tau);
  EXPECT_LT(max_abs(from_spin(t).J - tau * from_spin(s).J * tau.adjoint()), 1e-14);
  EXPECT_NEAR(spin_hamiltonian_2(t), spin_hamiltonian_2(s), 1e-13);
  EXPECT_NEAR(invariant_a(t), invariant_a(s), 1e-13);
  EXPECT_NEAR(invariant_b(t), invariant_b(s), 1e-13);
  EXPECT_THROW(gauge_transform(s, 2.0 * CMatrix::Identity(3, 3)), Error);
}

TEST(SpinCoordinates, ConstraintViolationsAreRejected) {
  Rng rng(9);
  SpinCoordinates s = random_spin_coordinates(3, rng);
  s.xi_l(0, 0) += I1;
  EXPECT_THROW(s.validate(), Error);
  EXPECT_THROW(from_spin(s), Error);
  s = random_spin_coordinates(3, rng);
  s.xi_r(0, 1) += 1.0;
  EXPECT_THROW(s.validate(), Error);
  s = random_spin_coordinates(3, rng);
  s.q(1) = s.q(0);
  EXPECT_THROW(s.validate(), Error);
}

TEST(SpinBracket, CanonicalPairs) {
  Rng rng(10);
  const SpinCoordinates s = random_spin_coordinates(3, rng);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const SpinFunction qi = [i](const SpinCoordinates& c) { return c.q(i); };
      const SpinFunction pj = [j](const SpinCoordinates& c) { return c.p(j); };
      const SpinFunction qj = [j](const SpinCoordinates& c) { return c.q(j); };
      EXPECT_NEAR(spin_pb1(qi, pj, s), i == j ? 1.0 : 0.0, 1e-9);
      EXPECT_NEAR(spin_pb1(qi, qj, s), 0.0, 1e-9);
      EXPECT_NEAR(spin_pb1(pj, [i](const SpinCoordinates& c) { return c.p(i); }, s), 0.0, 1e-9);
    }
  }
}

TEST(SpinBracket, AgreesWithTheReducedBracket) {
  Rng rng(11);
  const std::vector<SpinFunction> fs{invariant_a, invariant_b, spin_hamiltonian_2,
                                     [](const SpinCoordinates& c) { return c.q(0) * c.p(1) - std::norm(c.xi_l(0, 1)); }};
  for (std::size_t n : {2u, 3u}) {
    for (int trial = 0; trial < 3; ++trial) {
      const SpinCoordinates s = random_spin_coordinates(n, rng);
      const ReducedPoint y = from_spin(s);
      for (std::size_t a = 0; a < fs.size(); ++a) {
        for (std::size_t b = a + 1; b < fs.size(); ++b) {
          const double direct = spin_pb1(fs[a], fs[b], s);
          const double reduced = red_pb1(spin_to_reduced(fs[a]), spin_to_reduced(fs[b]), y);
          EXPECT_NEAR(direct, reduced, 1e-6 * scale_of(direct)) << a << b;
        }
      }
    }
  }
}

TEST(SpinBracket, PositionsAndMomentaDecoupleFromSpins) {
  Rng rng(12);
  const SpinCoordinates s = random_spin_coordinates(3, rng);
  const SpinFunction mech = [](const SpinCoordinates& c) { return c.p(0) * c.q(2) + c.p(1) * c.p(1); };
  const SpinFunction spins = [](const SpinCoordinates& c) {
    return (c.xi_l(0, 1) * c.xi_r(1, 0)).real() + (c.xi_l(0, 1) * c.xi_l(1, 2) * c.xi_l(2, 0)).imag();
  };
  EXPECT_NEAR(spin_pb1(mech, spins, s), 0.0, 1e-9);
}

TEST(SpinBracket, TorusInvarianceKillsTheZeroModeTerms) {
  Rng rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    const SpinCoordinates s = random_spin_coordinates(3, rng);
    const SpinGradient h = spin_partial_gradients(invariant_b, s);
    const CMatrix F0 = diag_matrix(RVector::Random(3)) * I1;
    const FiveVariables v = to_five(s);
    const double lhs = pairing(v.xl_perp, commutator(F0, h.d_xl)) + pairing(v.xr_perp, commutator(F0, h.d_xr));
    EXPECT_NEAR(lhs, 0.0, 1e-9);
  }
}

TEST(SpinBracket, SecondBracketRecursion) {
  // {F, h_1}_2 = {F, h_2}_1 with h_2 the two-spin energy.
  Rng rng(14);
  const SpinFunction h1 = reduced_to_spin(reduced_hamiltonian(1, Part::Real));
  const SpinFunction h2 = [](const SpinCoordinates& c) { return spin_hamiltonian_2(c); };
  for (int trial = 0; trial < 3; ++trial) {
    const SpinCoordinates s = random_spin_coordinates(3, rng);
    const double lhs = spin_pb2(invariant_a, h1, s);
    EXPECT_NEAR(lhs, spin_pb1(invariant_a, h2, s), 1e-6 * scale_of(lhs));
  }
}

TEST(SpinIdentities, HoldOnRandomData) {
  Rng rng(15);
  for (std::size_t n : {2u, 3u, 4u}) {
    for (int trial = 0; trial < 10; ++trial) {
      EXPECT_LT(spin_identity_residuals(random_spin_identity_data(n, rng)).max(), 1e-10);
    }
  }
}

TEST(SpinIdentities, ChainRuleMatchesReducedGradients) {
  Rng rng(16);
  const SpinCoordinates s = random_spin_coordinates(3, rng);
  const SpinGradient F = spin_partial_gradients(invariant_a, s);
  const ReducedGradient oracle = spin_to_reduced(invariant_a).finite_difference_gradients(from_spin(s));
  EXPECT_LT((chain_rule_nabla1(F, s) - oracle.dq).cwiseAbs().maxCoeff(), 1e-7);
  EXPECT_LT(max_abs(chain_rule_d2(F, s) - oracle.d2), 1e-7);
}

TEST(FiveVariables, SplitRoundtrips) {
  Rng rng(17);
  const SpinCoordinates s = random_spin_coordinates(3, rng);
  const FiveVariables v = to_five(s);
  EXPECT_EQ(max_abs(diagonal_part(v.xl_perp)), 0.0);
  EXPECT_LT(max_abs(off_diagonal_part(v.xi0)), 1e-300);
  const SpinCoordinates t = from_five(v);
  EXPECT_LT(max_abs(t.xi_l - s.xi_l) + max_abs(t.xi_r - s.xi_r), 1e-15);
}
