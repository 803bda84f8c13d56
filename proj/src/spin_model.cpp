#include "bihamkit/spin_model.hpp"

#include "bihamkit/errors.hpp"

#include <algorithm>
#include <cmath>

namespace bihamkit {

namespace {

CMatrix S_of(const RVector& q, const CMatrix& X) { return ad_q_function(q, X, AdFunction::Sinh); }
CMatrix C_of(const RVector& q, const CMatrix& X) { return ad_q_function(q, X, AdFunction::Cosh); }
CMatrix Sinv_of(const RVector& q, const CMatrix& X) { return ad_q_function(q, off_diagonal_part(X), AdFunction::InvSinh); }

double scale_of(const CMatrix& X) { return std::max(1.0, max_abs(X)); }

}  // namespace

void SpinCoordinates::validate() const {
  const auto m = static_cast<Eigen::Index>(n());
  if (p.size() != m) throw DomainError("spin coordinates: p has the wrong size");
  require_square(xi_l, "spin xi^l");
  require_square(xi_r, "spin xi^r");
  if (xi_l.rows() != m || xi_r.rows() != m) throw DomainError("spin coordinates: spin size differs from q");
  if (!q.allFinite() || !p.allFinite()) throw DomainError("spin coordinates: non-finite q or p");
  require_regular(q);
  const double tol = 1e-12 * std::max(scale_of(xi_l), scale_of(xi_r));
  if (max_abs(herm_part(xi_l)) > tol) throw DomainError("spin coordinates: xi^l is not anti-Hermitian");
  if (max_abs(herm_part(xi_r)) > tol) throw DomainError("spin coordinates: xi^r is not anti-Hermitian");
  if (max_abs(diagonal_part(xi_l + xi_r)) > tol)
    throw DomainError("spin coordinates: diagonal constraint xi^l_kk + xi^r_kk = 0 violated");
}

SpinCoordinates to_spin(const ReducedPoint& y) {
  y.validate();
  SpinCoordinates s;
  s.q = y.q;
  s.p = y.J.diagonal().real();
  s.xi_l = -anti_part(y.J);
  s.xi_r = anti_part(exp_diag(-y.q) * y.J * exp_diag(y.q));
  return s;
}

ReducedPoint from_spin(const SpinCoordinates& s) {
  s.validate();
  const CMatrix J = diag_matrix(s.p) - R_q(s.q, s.xi_l) - Sinv_of(s.q, s.xi_r) - s.xi_l;
  return {s.q, J};
}

SpinCoordinates gauge_transform(const SpinCoordinates& s, const CMatrix& tau) {
  require_same_size(tau, s.xi_l, "gauge_transform");
  if (max_abs(off_diagonal_part(tau)) > 0.0) throw DomainError("gauge_transform: tau must be diagonal");
  for (Eigen::Index i = 0; i < tau.rows(); ++i) {
    if (std::abs(std::abs(tau(i, i)) - 1.0) > 1e-12) throw DomainError("gauge_transform: tau must be unitary");
  }
  SpinCoordinates out = s;
  out.xi_l = tau * s.xi_l * tau.adjoint();
  out.xi_r = tau * s.xi_r * tau.adjoint();
  return out;
}

double spin_hamiltonian_2(const SpinCoordinates& s) {
  s.validate();
  const std::size_t n = s.n();
  double value = 0.0;
  for (std::size_t i = 0; i < n; ++i) value += 0.5 * (s.p(i) * s.p(i) - std::norm(s.xi_l(i, i)));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double x = s.q(i) - s.q(j);
      const double coupling = (s.xi_r(i, j) * s.xi_l(j, i)).real();
      const double sh = std::sinh(x), sh_half = std::sinh(x / 2);
      // 2 cosh x / sinh^2 x = 1/sinh^2(x/2) - 2/sinh^2 x, entering with a minus sign.
      value += (std::norm(s.xi_l(i, j)) + std::norm(s.xi_r(i, j)) + 2.0 * coupling) / (sh * sh) -
               coupling / (sh_half * sh_half);
    }
  }
  return value;
}

double spin_hamiltonian_1(const RVector& q, const RVector& p, const CMatrix& xi) {
  require_regular(q);
  require_square(xi, "spin_hamiltonian_1");
  if (p.size() != q.size() || xi.rows() != q.size()) throw DomainError("spin_hamiltonian_1: size mismatch");
  const double tol = 1e-12 * scale_of(xi);
  if (max_abs(herm_part(xi)) > tol) throw DomainError("spin_hamiltonian_1: xi must be anti-Hermitian");
  if (max_abs(diagonal_part(xi)) > tol) throw DomainError("spin_hamiltonian_1: xi must have zero diagonal");
  double value = 0.5 * p.squaredNorm();
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    for (Eigen::Index j = i + 1; j < q.size(); ++j) {
      const double sh = std::sinh(q(i) - q(j));
      value += std::norm(xi(i, j)) / (sh * sh);
    }
  }
  return value;
}

SpinCoordinates random_spin_coordinates(std::size_t n, Rng& rng, double scale) {
  SpinCoordinates s;
  s.q = random_regular_q(n, rng);
  s.p = RVector(n);
  for (std::size_t i = 0; i < n; ++i) s.p(i) = gaussian(rng);
  s.xi_l = random_anti_hermitian(n, rng, scale);
  s.xi_r = off_diagonal_part(random_anti_hermitian(n, rng, scale)) - diagonal_part(s.xi_l);
  return s;
}

FiveVariables to_five(const SpinCoordinates& s) {
  return {s.q, s.p, off_diagonal_part(s.xi_l), off_diagonal_part(s.xi_r), diagonal_part(s.xi_l)};
}

SpinCoordinates from_five(const FiveVariables& v) {
  return {v.q, v.p, v.xl_perp + v.xi0, v.xr_perp - v.xi0};
}

SpinGradient spin_partial_gradients(const SpinFunction& F, const SpinCoordinates& s, double h) {
  const std::size_t n = s.n();
  SpinGradient g{RVector::Zero(n), RVector::Zero(n), CMatrix::Zero(n, n), CMatrix::Zero(n, n), CMatrix::Zero(n, n)};
  auto slope = [&](const std::function<void(SpinCoordinates&, double)>& move, double step) {
    SpinCoordinates up = s, down = s;
    move(up, step);
    move(down, -step);
    const double fu = F(up), fd = F(down);
    if (!std::isfinite(fu) || !std::isfinite(fd)) throw DomainError("non-finite value while probing spin function");
    return (fu - fd) / (2.0 * step);
  };
  const double hq = h * (1.0 + s.q.cwiseAbs().maxCoeff());
  const double hp = h * (1.0 + s.p.cwiseAbs().maxCoeff());
  const double hx = h * (1.0 + std::max(max_abs(s.xi_l), max_abs(s.xi_r)));
  const Complex i1(0.0, 1.0);
  for (std::size_t k = 0; k < n; ++k) {
    g.dq(k) = slope([k](SpinCoordinates& c, double t) { c.q(k) += t; }, hq);
    g.dp(k) = slope([k](SpinCoordinates& c, double t) { c.p(k) += t; }, hp);
    // Basis i E_kk of the diagonal part, <iE_kk, iE_kk> = -1.
    const double d0 = slope(
        [k, i1](SpinCoordinates& c, double t) {
          c.xi_l(k, k) += i1 * t;
          c.xi_r(k, k) -= i1 * t;
        },
        hx);
    g.d_xi0(k, k) = -i1 * d0;
  }
  // Off-diagonal basis E_ab - E_ba and i(E_ab + E_ba), each of squared norm -2.
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      CMatrix B1 = CMatrix::Zero(n, n), B2 = CMatrix::Zero(n, n);
      B1(a, b) = 1.0;
      B1(b, a) = -1.0;
      B2(a, b) = i1;
      B2(b, a) = i1;
      for (const CMatrix* B : {&B1, &B2}) {
        const double dl = slope([B](SpinCoordinates& c, double t) { c.xi_l += t * *B; }, hx);
        const double dr = slope([B](SpinCoordinates& c, double t) { c.xi_r += t * *B; }, hx);
        g.d_xl += -0.5 * dl * *B;
        g.d_xr += -0.5 * dr * *B;
      }
    }
  }
  return g;
}

double spin_pb1(const SpinGradient& f, const SpinGradient& h, const SpinCoordinates& s) {
  const FiveVariables v = to_five(s);
  return f.dq.dot(h.dp) - h.dq.dot(f.dp) +
         pairing(v.xl_perp + v.xi0, commutator(f.d_xl + f.d_xi0, h.d_xl + h.d_xi0)) +
         pairing(v.xr_perp - v.xi0, commutator(f.d_xr, h.d_xr));
}

double spin_pb1(const SpinFunction& F, const SpinFunction& H, const SpinCoordinates& s) {
  s.validate();
  return spin_pb1(spin_partial_gradients(F, s), spin_partial_gradients(H, s), s);
}

ReducedObservable spin_to_reduced(const SpinFunction& F, std::string name) {
  return ReducedObservable(std::move(name), [F](const ReducedPoint& y) { return F(to_spin(y)); }, true);
}

SpinFunction reduced_to_spin(const ReducedObservable& f) {
  return [f](const SpinCoordinates& s) { return f(from_spin(s)); };
}

double spin_pb2(const SpinFunction& F, const SpinFunction& H, const SpinCoordinates& s) {
  return red_pb2(spin_to_reduced(F), spin_to_reduced(H), from_spin(s));
}

RVector chain_rule_nabla1(const SpinGradient& F, const SpinCoordinates& s) {
  const FiveVariables v = to_five(s);
  const CMatrix M = R_q(s.q, Sinv_of(s.q, v.xr_perp)) + Sinv_of(s.q, Sinv_of(s.q, v.xl_perp));
  return F.dq - herm_part(commutator(M, S_of(s.q, F.d_xr))).diagonal().real();
}

CMatrix chain_rule_d2(const SpinGradient& F, const SpinCoordinates& s) {
  return diag_matrix(F.dp) + S_of(s.q, F.d_xr) - F.d_xi0 - F.d_xl + C_of(s.q, F.d_xr);
}

SpinIdentityData random_spin_identity_data(std::size_t n, Rng& rng) {
  SpinIdentityData d;
  d.s = random_spin_coordinates(n, rng);
  auto grad = [&]() {
    SpinGradient g;
    g.dq = RVector(n);
    g.dp = RVector(n);
    for (std::size_t i = 0; i < n; ++i) {
      g.dq(i) = gaussian(rng);
      g.dp(i) = gaussian(rng);
    }
    g.d_xl = off_diagonal_part(random_anti_hermitian(n, rng));
    g.d_xr = off_diagonal_part(random_anti_hermitian(n, rng));
    g.d_xi0 = diagonal_part(random_anti_hermitian(n, rng));
    return g;
  };
  d.F = grad();
  d.H = grad();
  return d;
}

double SpinIdentityResiduals::max() const {
  return std::max({sinh_cosh_commutator, cosh_sinh_sum, minus_minus, plus_minus, j_plus_minus, j_plus_plus,
                   collected, nabla_pairing, momentum_terms, bracket});
}

SpinIdentityResiduals spin_identity_residuals(const SpinIdentityData& d) {
  const SpinCoordinates& s = d.s;
  const RVector& q = s.q;
  const FiveVariables v = to_five(s);
  auto S = [&](const CMatrix& X) { return S_of(q, X); };
  auto C = [&](const CMatrix& X) { return C_of(q, X); };
  auto Si = [&](const CMatrix& X) { return Sinv_of(q, X); };
  auto R = [&](const CMatrix& X) { return R_q(q, X); };

  const CMatrix Fp = diag_matrix(d.F.dp), Hp = diag_matrix(d.H.dp);
  const CMatrix Fq = diag_matrix(d.F.dq);
  const CMatrix& Fr = d.F.d_xr;
  const CMatrix& Hr = d.H.d_xr;
  const CMatrix Fl = d.F.d_xl + d.F.d_xi0, Hl = d.H.d_xl + d.H.d_xi0;
  const CMatrix& xl = s.xi_l;
  const CMatrix& xr = s.xi_r;
  const CMatrix& xlp = v.xl_perp;
  const CMatrix& xrp = v.xr_perp;

  const ReducedPoint y = from_spin(s);
  const CMatrix& J = y.J;
  const CMatrix Jm = herm_part(J), Jp = anti_part(J);
  const CMatrix df = chain_rule_d2(d.F, s), dh = chain_rule_d2(d.H, s);
  const CMatrix fm = herm_part(df), fp = anti_part(df), hm = herm_part(dh), hp = anti_part(dh);

  SpinIdentityResiduals r;
  r.sinh_cosh_commutator =
      max_abs(commutator(S(Fr), C(Hr)) - commutator(S(Hr), C(Fr)) - S(commutator(Fr, Hr)));
  r.cosh_sinh_sum = max_abs(commutator(C(Fr), C(Hr)) + commutator(S(Fr), S(Hr)) - C(commutator(Fr, Hr)));

  auto exchange = [](double fh, double hf) { return fh - hf; };

  {
    const double lhs = exchange(pairing(R(commutator(fm, Jm)), hm), pairing(R(commutator(hm, Jm)), fm));
    const double rhs = pairing(xrp, commutator(Fr, Hr)) + pairing(C(xlp), commutator(Fr, Hr)) +
                       exchange(pairing(Fp, commutator(Si(xrp), C(Hr)) + commutator(R(xlp), C(Hr))),
                                pairing(Hp, commutator(Si(xrp), C(Fr)) + commutator(R(xlp), C(Fr))));
    r.minus_minus = std::abs(lhs - rhs);
  }
  {
    const double lhs = exchange(pairing(R(commutator(fp, Jp)), hm), pairing(R(commutator(hp, Jp)), fm));
    const double rhs = -2.0 * pairing(xl, commutator(C(Fr), C(Hr))) +
                       exchange(pairing(xl, commutator(Fl, C(Hr))), pairing(xl, commutator(Hl, C(Fr))));
    r.plus_minus = std::abs(lhs - rhs);
  }
  {
    const double lhs = pairing(Jp, commutator(fm, hm));
    const double rhs = -pairing(xl, commutator(S(Fr), S(Hr))) +
                       exchange(pairing(Fp, commutator(xlp, S(Hr))), pairing(Hp, commutator(xlp, S(Fr))));
    r.j_plus_minus = std::abs(lhs - rhs);
  }
  {
    const double lhs = -pairing(Jp, commutator(fp, hp));
    const double rhs = pairing(xl, commutator(Fl, Hl) + commutator(C(Fr), C(Hr))) +
                       exchange(pairing(xl, commutator(C(Hr), Fl)), pairing(xl, commutator(C(Fr), Hl)));
    r.j_plus_plus = std::abs(lhs - rhs);
  }
  {
    const double lhs = pairing(R(anti_part(commutator(df, J))), hm) - pairing(R(anti_part(commutator(dh, J))), fm) +
                       pairing(Jp, commutator(fm, hm) - commutator(fp, hp));
    auto momentum = [&](const CMatrix& P, const CMatrix& Xr) {
      return pairing(P, commutator(R(xlp) + Si(xrp), C(Xr)) + commutator(xlp, S(Xr)));
    };
    const double rhs = pairing(xl, commutator(Fl, Hl)) + pairing(xr, commutator(Fr, Hr)) +
                       exchange(momentum(Fp, Hr), momentum(Hp, Fr)) + pairing(C(xl), commutator(Fr, Hr)) -
                       pairing(xl, commutator(C(Fr), C(Hr)) + commutator(S(Fr), S(Hr)));
    r.collected = std::abs(lhs - rhs);
  }
  {
    const RVector nabla = chain_rule_nabla1(d.F, s);
    const double lhs = nabla.dot(hm.diagonal().real());
    const double rhs = pairing(Fq, Hp) + pairing(commutator(R(xrp) + Si(xlp), Fr), Hp);
    r.nabla_pairing = std::abs(lhs - rhs);
  }
  {
    const double lhs = pairing(Hp, commutator(R(xlp) + Si(xrp), C(Fr)) + commutator(xlp, S(Fr)));
    const double rhs = pairing(commutator(R(xrp) + Si(xlp), Fr), Hp);
    r.momentum_terms = std::abs(lhs - rhs);
  }
  {
    const ReducedGradient gf{chain_rule_nabla1(d.F, s), df}, gh{chain_rule_nabla1(d.H, s), dh};
    r.bracket = std::abs(spin_pb1(d.F, d.H, s) - red_pb1(gf, gh, y));
  }
  return r;
}

}  // namespace bihamkit
