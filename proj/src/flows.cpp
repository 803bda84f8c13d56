#include "bihamkit/flows.hpp"

#include "bihamkit/errors.hpp"

#include <algorithm>
#include <cmath>

namespace bihamkit {

void FlowSpec::validate() const {
  if (k < 1) throw DomainError("flow: k must be >= 1");
  if (steps < 1) throw DomainError("flow: steps must be >= 1");
  if (!std::isfinite(t_final)) throw DomainError("flow: t_final must be finite");
  if (!bracket.is_canonical() && !bracket.is_quadratic())
    throw DomainError("flow: bracket must be canonical or quadratic");
}

PhasePoint explicit_flow(const PhasePoint& x0, int k, Part kind, double t) {
  x0.validate();
  if (k < 1) throw DomainError("explicit_flow: k must be >= 1");
  const CMatrix Jk = matrix_power(x0.J, k);
  const Complex factor = kind == Part::Real ? Complex(t, 0.0) : Complex(0.0, -t);
  return {matrix_exp(factor * Jk) * x0.g, x0.J};
}

PhaseTangent hamiltonian_vector_field(const Observable& H, const BracketSelector& sel, const PhasePoint& x) {
  const std::size_t n = x.n();
  const auto h = H.gradients(x);
  PhaseTangent v{CMatrix::Zero(n, n), CMatrix::Zero(n, n)};
  auto bracket = [&](const Observable& c) {
    const auto f = c.gradients(x);
    double value = 0.0;
    if (sel.a != 0.0) value += sel.a * pb1(f, h, x.J);
    if (sel.b != 0.0) value += sel.b * pb2(f, h);
    return value;
  };
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      v.dg(a, b) = Complex(bracket(g_coordinate(n, a, b, Part::Real)), bracket(g_coordinate(n, a, b, Part::Imag)));
      // Re J_ab = <E_ba, J>, Im J_ab = <-i E_ba, J>.
      const CMatrix E = basis_element(n, b * n + a);
      v.dJ(a, b) = Complex(bracket(j_component(E)), bracket(j_component(Complex(0.0, -1.0) * E)));
    }
  }
  return v;
}

namespace {

PhasePoint advance(const PhasePoint& x, const PhaseTangent& v, double h) { return {x.g + h * v.dg, x.J + h * v.dJ}; }

void require_finite(const PhasePoint& x) {
  if (!x.g.allFinite() || !x.J.allFinite()) throw DomainError("numeric_flow: non-finite state");
}

}  // namespace

PhasePoint numeric_flow(const PhasePoint& x0, const Observable& H, const BracketSelector& sel, double t, int steps,
                        std::vector<PhasePoint>* trajectory) {
  x0.validate();
  if (steps < 1) throw DomainError("numeric_flow: steps must be >= 1");
  if (!sel.is_canonical() && !sel.is_quadratic())
    throw DomainError("numeric_flow: bracket must be canonical or quadratic");
  if (trajectory != nullptr) {
    trajectory->clear();
    trajectory->push_back(x0);
  }
  if (t == 0.0) {
    if (trajectory != nullptr) trajectory->resize(static_cast<std::size_t>(steps) + 1, x0);
    return x0;
  }
  const double h = t / steps;
  PhasePoint x = x0;
  for (int s = 0; s < steps; ++s) {
    const auto k1 = hamiltonian_vector_field(H, sel, x);
    const auto k2 = hamiltonian_vector_field(H, sel, advance(x, k1, h / 2));
    const auto k3 = hamiltonian_vector_field(H, sel, advance(x, k2, h / 2));
    const auto k4 = hamiltonian_vector_field(H, sel, advance(x, k3, h));
    x.g += (h / 6) * (k1.dg + 2.0 * k2.dg + 2.0 * k3.dg + k4.dg);
    x.J += (h / 6) * (k1.dJ + 2.0 * k2.dJ + 2.0 * k3.dJ + k4.dJ);
    require_finite(x);
    if (trajectory != nullptr) trajectory->push_back(x);
  }
  return x;
}

std::vector<PhasePoint> explicit_trajectory(const PhasePoint& x0, int k, Part kind, double t, int samples) {
  if (samples < 1) throw DomainError("explicit_trajectory: samples must be >= 1");
  std::vector<PhasePoint> out;
  out.reserve(static_cast<std::size_t>(samples) + 1);
  for (int i = 0; i <= samples; ++i) out.push_back(explicit_flow(x0, k, kind, t * i / samples));
  return out;
}

double ConservationReport::max_drift() const {
  double m = jtilde_drift;
  for (double d : h_drift) m = std::max(m, d);
  for (double d : htilde_drift) m = std::max(m, d);
  return m;
}

ConservationReport conservation_report(const std::vector<PhasePoint>& trajectory) {
  if (trajectory.empty()) throw DomainError("conservation_report: empty trajectory");
  const PhasePoint& x0 = trajectory.front();
  const int n = static_cast<int>(x0.n());
  ConservationReport report;
  report.h_drift.assign(n, 0.0);
  report.htilde_drift.assign(n, 0.0);
  std::vector<Observable> h, ht;
  for (int k = 1; k <= n; ++k) {
    h.push_back(hamiltonian(k, Part::Real));
    ht.push_back(hamiltonian(k, Part::Imag));
  }
  std::vector<double> h0(n), ht0(n);
  for (int k = 0; k < n; ++k) {
    h0[k] = h[k](x0);
    ht0[k] = ht[k](x0);
  }
  const CMatrix jt0 = tilde_J(x0);
  for (const auto& x : trajectory) {
    for (int k = 0; k < n; ++k) {
      report.h_drift[k] = std::max(report.h_drift[k], std::abs(h[k](x) - h0[k]));
      report.htilde_drift[k] = std::max(report.htilde_drift[k], std::abs(ht[k](x) - ht0[k]));
    }
    report.jtilde_drift = std::max(report.jtilde_drift, max_abs(tilde_J(x) - jt0));
  }
  return report;
}

double phase_distance(const PhasePoint& a, const PhasePoint& b) {
  return std::max(max_abs(a.g - b.g), max_abs(a.J - b.J));
}

double convergence_order(const PhasePoint& x0, int k, Part kind, const BracketSelector& sel, double t, int steps) {
  const int generator = sel.is_canonical() ? k + 1 : k;
  const Observable H = hamiltonian(generator, kind);
  const PhasePoint exact = explicit_flow(x0, k, kind, t);
  const double coarse = phase_distance(numeric_flow(x0, H, sel, t, steps), exact);
  const double fine = phase_distance(numeric_flow(x0, H, sel, t, 2 * steps), exact);
  if (coarse == 0.0 || fine == 0.0) throw DomainError("convergence_order: error vanished, order undefined");
  return std::log2(coarse / fine);
}

}  // namespace bihamkit
