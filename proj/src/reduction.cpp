#include "bihamkit/reduction.hpp"

#include "bihamkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace bihamkit {

namespace {

// <diag(d), X> = sum_i d_i Re X_ii.
double diag_pairing(const RVector& d, const CMatrix& X) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) s += d(i) * X(i, i).real();
  return s;
}

RVector real_diag(const CMatrix& X) { return X.diagonal().real(); }

bool is_hermitian(const CMatrix& X) { return max_abs(anti_part(X)) <= 1e-12 * std::max(1.0, max_abs(X)); }
bool is_anti_hermitian(const CMatrix& X) { return max_abs(herm_part(X)) <= 1e-12 * std::max(1.0, max_abs(X)); }

ReducedGradient zero_gradient(std::size_t n) { return {RVector::Zero(n), CMatrix::Zero(n, n)}; }

}  // namespace

void ReducedPoint::validate() const {
  require_square(J, "reduced point J");
  if (static_cast<std::size_t>(J.rows()) != n()) throw DomainError("reduced point: q and J sizes differ");
  if (!q.allFinite()) throw DomainError("reduced point: q has non-finite entries");
  require_regular(q);
}

double apply_field(const TangentUpdate& field, const ReducedGradient& f) {
  return f.dq.dot(field.dq) + pairing(f.d2, field.dJ);
}

ReducedObservable::ReducedObservable(std::string name, Evaluator eval, bool torus_invariant, Differentiator analytic)
    : name_(std::move(name)), eval_(std::move(eval)), torus_invariant_(torus_invariant), analytic_(std::move(analytic)) {}

ReducedObservable ReducedObservable::verified(std::string name, Evaluator eval, std::size_t n, std::uint64_t seed,
                                              Differentiator analytic) {
  ReducedObservable f(std::move(name), std::move(eval), true, std::move(analytic));
  Rng rng(seed);
  const ReducedPoint y = random_reduced_point(n, rng);
  const double defect = torus_defect(f, y, rng, 8);
  if (!(defect <= 1e-9 * std::max(1.0, std::abs(f(y))))) {
    std::ostringstream msg;
    msg << "reduced observable '" << f.name() << "' is not torus invariant (defect " << defect << ")";
    throw DomainError(msg.str());
  }
  return f;
}

ReducedGradient ReducedObservable::gradients(const ReducedPoint& y) const {
  if (analytic_) return analytic_(y);
  return finite_difference_gradients(y);
}

ReducedGradient ReducedObservable::finite_difference_gradients(const ReducedPoint& y) const {
  const std::size_t n = y.n();
  ReducedGradient g = zero_gradient(n);
  const double hq = fd_step_ * (1.0 + y.q.cwiseAbs().maxCoeff());
  for (std::size_t i = 0; i < n; ++i) {
    ReducedPoint up = y, down = y;
    up.q(i) += hq;
    down.q(i) -= hq;
    const double fu = eval_(up), fd = eval_(down);
    if (!std::isfinite(fu) || !std::isfinite(fd)) throw DomainError("non-finite function value while probing q");
    g.dq(i) = (fu - fd) / (2.0 * hq);
  }
  const double hj = fd_step_ * (1.0 + max_abs(y.J));
  g.d2 = fd_gradient(n, hj, [&](const CMatrix& d) { return eval_(ReducedPoint{y.q, y.J + d}); });
  return g;
}

ReducedObservable ReducedObservable::with_fd_step(double h) const {
  ReducedObservable copy = *this;
  copy.fd_step_ = h;
  return copy;
}

double torus_defect(const ReducedObservable& f, const ReducedPoint& y, Rng& rng, int probes) {
  const double base = f(y);
  double defect = 0.0;
  for (int i = 0; i < probes; ++i) {
    const CMatrix tau = random_torus(y.n(), rng);
    defect = std::max(defect, std::abs(f(ReducedPoint{y.q, tau * y.J * tau.adjoint()}) - base));
  }
  return defect;
}

// ---- families ----

ReducedObservable reduced_hamiltonian(int k, Part part) {
  if (k < 1) throw DomainError("reduced_hamiltonian: k must be >= 1");
  const Complex w = part == Part::Real ? Complex(1.0, 0.0) : Complex(0.0, -1.0);
  const std::string name = (part == Part::Real ? "h:" : "htilde:") + std::to_string(k);
  return ReducedObservable(
      name, [k, w](const ReducedPoint& y) { return (w * matrix_power(y.J, k).trace()).real() / k; }, true,
      [k, w](const ReducedPoint& y) {
        return ReducedGradient{RVector::Zero(y.n()), w * matrix_power(y.J, k - 1)};
      });
}

ReducedObservable reduced_trace_word(const std::string& pattern, Part part) {
  std::vector<bool> plus;  // one entry per letter of power one
  for (const auto& letter : parse_pm_pattern(pattern)) plus.insert(plus.end(), letter.power, letter.plus);
  const Complex w = part == Part::Real ? Complex(1.0, 0.0) : Complex(0.0, -1.0);
  auto letters = [plus](const ReducedPoint& y) {
    const CMatrix P = anti_part(y.J), M = herm_part(y.J);
    std::vector<CMatrix> out;
    out.reserve(plus.size());
    for (bool p : plus) out.push_back(p ? P : M);
    return out;
  };
  const std::string name = "rword:" + pattern + (part == Part::Imag ? ":im" : "");
  return ReducedObservable(
      name,
      [letters, w](const ReducedPoint& y) {
        CMatrix prod = CMatrix::Identity(y.n(), y.n());
        for (const auto& L : letters(y)) prod = prod * L;
        return (w * prod.trace()).real();
      },
      true,
      [letters, plus, w](const ReducedPoint& y) {
        const auto L = letters(y);
        const std::size_t m = L.size(), n = y.n();
        std::vector<CMatrix> prefix(m + 1), suffix(m + 1);
        prefix[0] = CMatrix::Identity(n, n);
        for (std::size_t i = 0; i < m; ++i) prefix[i + 1] = prefix[i] * L[i];
        suffix[m] = CMatrix::Identity(n, n);
        for (std::size_t i = m; i-- > 0;) suffix[i] = L[i] * suffix[i + 1];
        ReducedGradient g = zero_gradient(n);
        for (std::size_t i = 0; i < m; ++i) {
          const CMatrix C = w * suffix[i + 1] * prefix[i];
          g.d2 += plus[i] ? anti_part(C) : herm_part(C);
        }
        return g;
      });
}

ReducedObservable cycle_monomial(std::vector<JFactor> factors, Complex coeff, Part part) {
  if (factors.empty()) throw DomainError("cycle_monomial: no factors");
  std::map<std::size_t, int> balance;
  std::ostringstream name;
  name << "mono:";
  for (std::size_t i = 0; i < factors.size(); ++i) {
    const auto& f = factors[i];
    const std::size_t row = f.conjugate ? f.b : f.a;
    const std::size_t col = f.conjugate ? f.a : f.b;
    ++balance[row];
    --balance[col];
    name << (i ? "*" : "") << (f.conjugate ? "c" : "") << f.a + 1 << "," << f.b + 1;
  }
  for (const auto& [index, count] : balance) {
    if (count != 0) throw DomainError("cycle_monomial: index " + std::to_string(index + 1) + " is unbalanced");
  }
  name << (part == Part::Imag ? ":im" : "");
  const Complex w = part == Part::Real ? coeff : Complex(0.0, -1.0) * coeff;
  std::size_t top = 0;
  for (const auto& f : factors) top = std::max({top, f.a, f.b});
  auto entries = [factors, top](const ReducedPoint& y) {
    if (top >= y.n()) throw DomainError("cycle_monomial: index out of range");
    std::vector<Complex> v;
    for (const auto& f : factors) v.push_back(f.conjugate ? std::conj(y.J(f.a, f.b)) : y.J(f.a, f.b));
    return v;
  };
  return ReducedObservable(
      name.str(),
      [entries, w](const ReducedPoint& y) {
        Complex prod = w;
        for (const Complex& z : entries(y)) prod *= z;
        return prod.real();
      },
      true,
      [entries, factors, w](const ReducedPoint& y) {
        const auto v = entries(y);
        ReducedGradient g = zero_gradient(y.n());
        for (std::size_t i = 0; i < v.size(); ++i) {
          Complex K = w;
          for (std::size_t j = 0; j < v.size(); ++j) {
            if (j != i) K *= v[j];
          }
          // d Re(K J_ab) gives D_ba += K; d Re(K conj J_ab) gives D_ba += conj K.
          g.d2(factors[i].b, factors[i].a) += factors[i].conjugate ? std::conj(K) : K;
        }
        return g;
      });
}

ReducedObservable q_coordinate(std::size_t i) {
  return ReducedObservable(
      "q:" + std::to_string(i + 1),
      [i](const ReducedPoint& y) {
        if (i >= y.n()) throw DomainError("q_coordinate: index out of range");
        return y.q(i);
      },
      true,
      [i](const ReducedPoint& y) {
        ReducedGradient g = zero_gradient(y.n());
        g.dq(i) = 1.0;
        return g;
      });
}

ReducedObservable q_exponential(RVector c) {
  return ReducedObservable(
      "qexp", [c](const ReducedPoint& y) { return std::exp(c.dot(y.q)); }, true,
      [c](const ReducedPoint& y) {
        ReducedGradient g = zero_gradient(y.n());
        g.dq = c * std::exp(c.dot(y.q));
        return g;
      });
}

ReducedObservable reduced_constant(double c) {
  return ReducedObservable(
      "const", [c](const ReducedPoint&) { return c; }, true,
      [](const ReducedPoint& y) { return zero_gradient(y.n()); });
}

ReducedObservable reduced_sum(const ReducedObservable& f, const ReducedObservable& h, double a, double b) {
  ReducedObservable::Differentiator diff;
  if (f.has_analytic_gradients() && h.has_analytic_gradients()) {
    diff = [f, h, a, b](const ReducedPoint& y) {
      const auto gf = f.gradients(y), gh = h.gradients(y);
      return ReducedGradient{a * gf.dq + b * gh.dq, a * gf.d2 + b * gh.d2};
    };
  }
  std::ostringstream name;
  name << a << "*" << f.name() << "+" << b << "*" << h.name();
  return ReducedObservable(
      name.str(), [f, h, a, b](const ReducedPoint& y) { return a * f(y) + b * h(y); },
      f.torus_invariant() && h.torus_invariant(), diff);
}

ReducedObservable reduced_product(const ReducedObservable& f, const ReducedObservable& h) {
  ReducedObservable::Differentiator diff;
  if (f.has_analytic_gradients() && h.has_analytic_gradients()) {
    diff = [f, h](const ReducedPoint& y) {
      const auto gf = f.gradients(y), gh = h.gradients(y);
      const double vf = f(y), vh = h(y);
      return ReducedGradient{vh * gf.dq + vf * gh.dq, vh * gf.d2 + vf * gh.d2};
    };
  }
  return ReducedObservable(
      "(" + f.name() + ")*(" + h.name() + ")", [f, h](const ReducedPoint& y) { return f(y) * h(y); },
      f.torus_invariant() && h.torus_invariant(), diff);
}

namespace {

// A closed walk a_0 -> a_1 -> ... -> a_0 of length 1..3; each edge is J_uv
// or conj(J_vu) at random.
ReducedObservable random_cycle(std::size_t n, Rng& rng) {
  std::uniform_int_distribution<std::size_t> node(0, n - 1);
  std::uniform_int_distribution<int> len(1, 3);
  const int L = len(rng);
  std::vector<std::size_t> walk;
  for (int i = 0; i < L; ++i) walk.push_back(node(rng));
  std::vector<JFactor> factors;
  for (int i = 0; i < L; ++i) {
    const std::size_t u = walk[i], v = walk[(i + 1) % L];
    if (uniform(rng, 0.0, 1.0) < 0.5) {
      factors.push_back({u, v, false});
    } else {
      factors.push_back({v, u, true});
    }
  }
  const Complex c(gaussian(rng), gaussian(rng));
  return cycle_monomial(factors, c, uniform(rng, 0.0, 1.0) < 0.5 ? Part::Real : Part::Imag);
}

}  // namespace

ReducedObservable random_reduced_observable(std::size_t n, Rng& rng) {
  static const char* const kWords[] = {"+1-1", "+2-1", "-3", "+1-2", "+2", "+1-1+1-1", "-1+2-1"};
  ReducedObservable spectral = reduced_constant(0.0);
  const Part part = uniform(rng, 0.0, 1.0) < 0.5 ? Part::Real : Part::Imag;
  if (uniform(rng, 0.0, 1.0) < 0.5) {
    std::uniform_int_distribution<int> k(1, static_cast<int>(n) + 1);
    spectral = reduced_hamiltonian(k(rng), part);
  } else {
    std::uniform_int_distribution<std::size_t> w(0, std::size(kWords) - 1);
    spectral = reduced_trace_word(kWords[w(rng)], part);
  }
  RVector c(n);
  for (std::size_t i = 0; i < n; ++i) c(i) = uniform(rng, -0.5, 0.5);
  const ReducedObservable weighted = reduced_product(q_exponential(c), random_cycle(n, rng));
  const ReducedObservable mixed = reduced_sum(spectral, random_cycle(n, rng), uniform(rng, -1, 1), uniform(rng, -1, 1));
  return reduced_sum(mixed, weighted, 1.0, uniform(rng, -1, 1));
}

ReducedPoint random_reduced_point(std::size_t n, Rng& rng, double j_scale) {
  ReducedPoint y;
  y.q = random_regular_q(n, rng);
  y.J = random_matrix(n, rng, j_scale);
  return y;
}

// ---- slice ----

ReducedPoint project_to_slice(const PhasePoint& x) {
  require_same_size(x.g, x.J, "project_to_slice");
  const CartanFactors c = cartan_decompose(x.g);
  return {c.q, c.A.adjoint() * x.J * c.A};
}

PhasePoint embed_slice(const ReducedPoint& y) { return {exp_diag(y.q), y.J}; }

Observable extend_invariant(const ReducedObservable& f) {
  if (!f.torus_invariant()) throw DomainError("extend_invariant: '" + f.name() + "' is not torus invariant");
  return Observable("ext[" + f.name() + "]", [f](const PhasePoint& x) { return f(project_to_slice(x)); },
                    Invariance::Both);
}

CMatrix extension_nabla1(const ReducedGradient& f, const ReducedPoint& y) {
  const CMatrix C = anti_part(commutator(f.d2, y.J));
  return C + diag_matrix(f.dq) + R_q(y.q, C);
}

CMatrix extension_nabla1(const ReducedObservable& f, const ReducedPoint& y) {
  y.validate();
  return extension_nabla1(f.gradients(y), y);
}

// ---- brackets ----

double red_pb1(const ReducedGradient& f, const ReducedGradient& h, const ReducedPoint& y) {
  const CMatrix fm = herm_part(f.d2), fp = anti_part(f.d2);
  const CMatrix hm = herm_part(h.d2), hp = anti_part(h.d2);
  return diag_pairing(f.dq, hm) - diag_pairing(h.dq, fm) +
         pairing(R_q(y.q, anti_part(commutator(f.d2, y.J))), hm) -
         pairing(R_q(y.q, anti_part(commutator(h.d2, y.J))), fm) +
         pairing(anti_part(y.J), commutator(fm, hm) - commutator(fp, hp));
}

double red_pb2(const ReducedGradient& f, const ReducedGradient& h, const ReducedPoint& y) {
  const CMatrix& J = y.J;
  const CMatrix n2f = J * f.d2, n2pf = f.d2 * J;
  const CMatrix n2h = J * h.d2, n2ph = h.d2 * J;
  const CMatrix sf = herm_part(n2f + n2pf), sh = herm_part(n2h + n2ph);
  const double twice = diag_pairing(f.dq, sh) - diag_pairing(h.dq, sf) +
                       pairing(R_q(y.q, anti_part(commutator(f.d2, J))), sh) -
                       pairing(R_q(y.q, anti_part(commutator(h.d2, J))), sf) +
                       pairing(herm_part(n2f), herm_part(n2ph)) + pairing(anti_part(n2pf), anti_part(n2h)) -
                       pairing(herm_part(n2pf), herm_part(n2h)) - pairing(anti_part(n2f), anti_part(n2ph));
  return 0.5 * twice;
}

double red_pb1(const ReducedObservable& f, const ReducedObservable& h, const ReducedPoint& y) {
  y.validate();
  return red_pb1(f.gradients(y), h.gradients(y), y);
}

double red_pb2(const ReducedObservable& f, const ReducedObservable& h, const ReducedPoint& y) {
  y.validate();
  return red_pb2(f.gradients(y), h.gradients(y), y);
}

double red_pb(const BracketSelector& sel, const ReducedObservable& f, const ReducedObservable& h,
              const ReducedPoint& y) {
  y.validate();
  const auto gf = f.gradients(y), gh = h.gradients(y);
  double value = 0.0;
  if (sel.a != 0.0) value += sel.a * red_pb1(gf, gh, y);
  if (sel.b != 0.0) value += sel.b * red_pb2(gf, gh, y);
  return value;
}

namespace {

double spectral_form(const ReducedGradient& f, const CMatrix& D, const ReducedPoint& y) {
  const CMatrix Dm = herm_part(D), Dp = anti_part(D);
  return diag_pairing(f.dq, Dm) + pairing(f.d2, commutator(R_q(y.q, Dm) - Dp, y.J));
}

}  // namespace

double red_pb1_spectral(const ReducedGradient& f, const ReducedGradient& h, const ReducedPoint& y) {
  return spectral_form(f, h.d2, y);
}

double red_pb2_spectral(const ReducedGradient& f, const ReducedGradient& h, const ReducedPoint& y) {
  return spectral_form(f, y.J * h.d2, y);
}

double reduced_jacobi_residual(const BracketSelector& sel, const ReducedObservable& f, const ReducedObservable& g,
                               const ReducedObservable& h, const ReducedPoint& y, double* scale) {
  auto inner = [&sel](const ReducedObservable& a, const ReducedObservable& b) {
    return ReducedObservable("{" + a.name() + "," + b.name() + "}",
                             [sel, a, b](const ReducedPoint& p) { return red_pb(sel, a, b, p); }, true)
        .with_fd_step(kNestedFdStep);
  };
  const double t1 = red_pb(sel, inner(f, g), h, y);
  const double t2 = red_pb(sel, inner(g, h), f, y);
  const double t3 = red_pb(sel, inner(h, f), g, y);
  if (scale != nullptr) *scale = std::max({std::abs(t1), std::abs(t2), std::abs(t3)});
  return t1 + t2 + t3;
}

// ---- vector fields ----

TangentUpdate field_by_duality(int which, const ReducedGradient& h, const ReducedPoint& y) {
  if (which != 1 && which != 2) throw DomainError("field_by_duality: bracket must be 1 or 2");
  const std::size_t n = y.n();
  auto bracket = [&](const ReducedGradient& f) { return which == 1 ? red_pb1(f, h, y) : red_pb2(f, h, y); };
  TangentUpdate field{RVector::Zero(n), CMatrix::Zero(n, n)};
  for (std::size_t j = 0; j < n; ++j) {
    ReducedGradient f = zero_gradient(n);
    f.dq(j) = 1.0;
    field.dq(j) = bracket(f);
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      ReducedGradient f = zero_gradient(n);
      f.d2(b, a) = 1.0;  // <E_ba, E[J]> = Re E[J]_ab
      const double re = bracket(f);
      f.d2(b, a) = Complex(0.0, -1.0);  // <-i E_ba, E[J]> = Im E[J]_ab
      const double im = bracket(f);
      field.dJ(a, b) = Complex(re, im);
    }
  }
  return field;
}

SplitTangent reduced_vector_field(int which, const ReducedGradient& h, const ReducedPoint& y) {
  const CMatrix hm = herm_part(h.d2), hp = anti_part(h.d2);
  const CMatrix Jm = herm_part(y.J), Jp = anti_part(y.J);
  const CMatrix grad_q = diag_matrix(h.dq);
  SplitTangent v;
  if (which == 1) {
    v.dq = real_diag(hm);
    v.dJ_minus = -grad_q + commutator(hm, Jp) + R_q(y.q, anti_part(commutator(y.J, h.d2))) +
                 commutator(R_q(y.q, hm), Jm);
    v.dJ_plus = commutator(R_q(y.q, hm) - hp, Jp);
  } else if (which == 2) {
    const CMatrix mixed = R_q(y.q, hm * Jm + hp * Jp);
    v.dq = real_diag(Jm * hm + Jp * hp);
    v.dJ_minus = herm_part(2.0 * Jm * hm * Jp - 2.0 * Jm * mixed - grad_q * Jm);
    v.dJ_plus = anti_part(2.0 * Jp * hp * Jm - 2.0 * Jp * mixed - grad_q * Jp);
  } else {
    throw DomainError("reduced_vector_field: bracket must be 1 or 2");
  }
  return v;
}

SplitTangent reduced_vector_field(const BracketSelector& sel, const ReducedObservable& h, const ReducedPoint& y) {
  y.validate();
  const auto gh = h.gradients(y);
  const std::size_t n = y.n();
  SplitTangent total{RVector::Zero(n), CMatrix::Zero(n, n), CMatrix::Zero(n, n)};
  for (int which : {1, 2}) {
    const double c = which == 1 ? sel.a : sel.b;
    if (c == 0.0) continue;
    const SplitTangent v = reduced_vector_field(which, gh, y);
    total.dq += c * v.dq;
    total.dJ_minus += c * v.dJ_minus;
    total.dJ_plus += c * v.dJ_plus;
  }
  return total;
}

namespace {

int field_power(int k, int which) {
  if (k < 1) throw DomainError("vector field: k must be >= 1");
  if (which != 1 && which != 2) throw DomainError("vector field: bracket must be 1 or 2");
  return which == 2 ? k : k - 1;
}

}  // namespace

TangentUpdate spectral_field(int k, Part kind, int which, const ReducedPoint& y) {
  y.validate();
  const int m = field_power(k, which);
  const CMatrix P = matrix_power(y.J, m);
  const CMatrix Ps = P.adjoint();
  const Complex i(0.0, 1.0);
  TangentUpdate v;
  if (kind == Part::Real) {
    v.dq = P.diagonal().real();
    v.dJ = 0.5 * commutator(R_q(y.q, P + Ps) + (Ps - P), y.J);
  } else {
    v.dq = P.diagonal().imag();  // Re(-i P_jj)
    v.dJ = 0.5 * commutator(i * R_q(y.q, Ps - P) + i * (P + Ps), y.J);
  }
  return v;
}

TangentUpdate v_field(int k, int which, const ReducedPoint& y) {
  y.validate();
  if (!is_hermitian(y.J)) throw DomainError("v_field: J must be Hermitian");
  const int m = field_power(k, which);
  const CMatrix Jm = herm_part(y.J);
  const CMatrix P = matrix_power(Jm, m);
  return {P.diagonal().real(), commutator(R_q(y.q, P), Jm)};
}

TangentUpdate u_field(int k, Part kind, int which, const ReducedPoint& y) {
  y.validate();
  if (!is_anti_hermitian(y.J)) throw DomainError("u_field: J must be anti-Hermitian");
  const int m = field_power(k, which);
  const std::size_t n = y.n();
  const CMatrix Jp = anti_part(y.J);
  const CMatrix P = matrix_power(Jp, m);
  TangentUpdate v{RVector::Zero(n), CMatrix::Zero(n, n)};
  if (kind == Part::Real && m % 2 == 0) {
    v.dq = P.diagonal().real();
    v.dJ = commutator(R_q(y.q, P), Jp);
  } else if (kind == Part::Imag && m % 2 == 1) {
    const Complex mi(0.0, -1.0);
    v.dq = (mi * P).diagonal().real();
    v.dJ = commutator(mi * R_q(y.q, P), Jp);
  }
  return v;
}

TangentUpdate gauge_field(const CMatrix& T, const ReducedPoint& y) {
  require_same_size(T, y.J, "gauge_field");
  if (max_abs(off_diagonal_part(T)) > 0.0 || max_abs(herm_part(T)) > 1e-12 * std::max(1.0, max_abs(T))) {
    throw DomainError("gauge_field: generator must be diagonal anti-Hermitian");
  }
  return {RVector::Zero(y.n()), commutator(T, y.J)};
}

// ---- slices ----

ReducedPoint restrict_minus(const ReducedPoint& y) { return {y.q, herm_part(y.J)}; }
ReducedPoint restrict_plus(const ReducedPoint& y) { return {y.q, anti_part(y.J)}; }

double minus_pb1(const ReducedGradient& f, const ReducedGradient& h, const ReducedPoint& y) {
  if (!is_hermitian(y.J)) throw DomainError("minus_pb1: J must be Hermitian");
  const CMatrix F = herm_part(f.d2), H = herm_part(h.d2);
  return diag_pairing(f.dq, H) - diag_pairing(h.dq, F) +
         pairing(y.J, commutator(R_q(y.q, F), H) + commutator(F, R_q(y.q, H)));
}

double minus_pb2(const ReducedGradient& f, const ReducedGradient& h, const ReducedPoint& y) {
  if (!is_hermitian(y.J)) throw DomainError("minus_pb2: J must be Hermitian");
  const CMatrix Jm = herm_part(y.J);
  const CMatrix n2F = Jm * herm_part(f.d2), n2H = Jm * herm_part(h.d2);
  return diag_pairing(f.dq, n2H) - diag_pairing(h.dq, n2F) + 2.0 * pairing(n2F, R_q(y.q, n2H));
}

double minus_pb1(const ReducedObservable& f, const ReducedObservable& h, const ReducedPoint& y) {
  y.validate();
  return minus_pb1(f.gradients(y), h.gradients(y), y);
}

double minus_pb2(const ReducedObservable& f, const ReducedObservable& h, const ReducedPoint& y) {
  y.validate();
  return minus_pb2(f.gradients(y), h.gradients(y), y);
}

// ---- trace identities ----

double TraceIdentityResiduals::max() const {
  return std::max({x_definition, x_alternative, exchange_first, exchange_second});
}

TraceIdentityResiduals trace_identity_residuals(const CMatrix& J, const CMatrix& df, const CMatrix& dh) {
  require_same_size(J, df, "trace_identity_residuals");
  require_same_size(J, dh, "trace_identity_residuals");
  const CMatrix Jp = anti_part(J), Jm = herm_part(J);
  const CMatrix fp = anti_part(df), fm = herm_part(df), hp = anti_part(dh), hm = herm_part(dh);

  auto bracket_form = [&](const CMatrix& a, const CMatrix& b) {
    const CMatrix n2a = J * a, n2pa = a * J, n2b = J * b, n2pb = b * J;
    return pairing(herm_part(n2a), herm_part(n2pb)) + pairing(anti_part(n2pa), anti_part(n2b));
  };
  auto product_term = [&](const CMatrix& a, const CMatrix& b) { return pairing(J * a, b * J); };
  auto anti_term = [&](const CMatrix& a, const CMatrix& b) {
    return pairing(anti_part(commutator(a, J)), anti_part(J * b + b * J));
  };

  const double x_def = bracket_form(df, dh) - bracket_form(dh, df);
  const double x_alt = anti_term(df, dh) + product_term(df, dh) - anti_term(dh, df) - product_term(dh, df);
  const double x_rhs = 4.0 * pairing(fp, anti_part(Jp * hp * Jm)) + 4.0 * pairing(fm, herm_part(Jm * hm * Jp));

  const CMatrix sym = Jp * Jm + Jm * Jp;
  const CMatrix squares = Jm * Jm + Jp * Jp;
  const double first_lhs = product_term(df, dh) - product_term(dh, df);
  const double first_rhs = pairing(commutator(fp, hp) + commutator(fm, hm), sym) +
                           pairing(commutator(fp, hm) + commutator(fm, hp), squares);
  const double second_lhs = anti_term(df, dh) - anti_term(dh, df);
  const double second_rhs = 2.0 * pairing(fp, Jp * hp * Jm - Jm * hp * Jp) +
                            2.0 * pairing(fm, Jm * hm * Jp - Jp * hm * Jm) +
                            pairing(commutator(hp, fp) + commutator(hm, fm), sym) +
                            pairing(commutator(hm, fp) + commutator(hp, fm), squares);

  TraceIdentityResiduals r;
  r.x_definition = std::abs(x_def - x_rhs);
  r.x_alternative = std::abs(x_def - x_alt);
  r.exchange_first = std::abs(first_lhs - first_rhs);
  r.exchange_second = std::abs(second_lhs - second_rhs);
  return r;
}

// ---- dynamics ----

ReducedPoint reduced_flow(const ReducedPoint& y0, const ReducedField& field, double t, int steps,
                          std::vector<ReducedPoint>* trajectory) {
  y0.validate();
  if (steps < 1) throw DomainError("reduced_flow: steps must be >= 1");
  auto advance = [](const ReducedPoint& y, const TangentUpdate& v, double h) {
    return ReducedPoint{y.q + h * v.dq, y.J + h * v.dJ};
  };
  if (trajectory != nullptr) {
    trajectory->clear();
    trajectory->push_back(y0);
  }
  const double h = t / steps;
  ReducedPoint y = y0;
  for (int s = 0; s < steps; ++s) {
    const auto k1 = field(y);
    const auto k2 = field(advance(y, k1, h / 2));
    const auto k3 = field(advance(y, k2, h / 2));
    const auto k4 = field(advance(y, k3, h));
    y.q += (h / 6) * (k1.dq + 2.0 * k2.dq + 2.0 * k3.dq + k4.dq);
    y.J += (h / 6) * (k1.dJ + 2.0 * k2.dJ + 2.0 * k3.dJ + k4.dJ);
    if (!y.q.allFinite() || !y.J.allFinite()) throw DomainError("reduced_flow: non-finite state");
    if (trajectory != nullptr) trajectory->push_back(y);
  }
  return y;
}

}  // namespace bihamkit
