#pragma once

// Real-valued functions on M = GL(n,C) x gl(n,C) together with their five
// matrix-valued derivatives.
//
//   <nabla1 F, X>       = d/dt F(e^{tX} g, J)
//   <nabla1_prime F, X> = d/dt F(g e^{tX}, J)
//   <d2 F, X>           = d/dt F(g, J + tX)
//   nabla2 F = J d2F,   nabla2_prime F = d2F J
//
// Built-in families (trace words, Hamiltonians, coordinates) carry analytic
// derivatives; anything else is differentiated by central differences.

#include "bihamkit/linalg.hpp"
#include "bihamkit/random.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace bihamkit {

inline constexpr double kDefaultFdStep = 1e-5;

struct PhasePoint {
  CMatrix g;
  CMatrix J;

  std::size_t n() const { return static_cast<std::size_t>(g.rows()); }
  // Square, same size, finite, and g numerically invertible.
  void validate() const;
};

struct GradientBundle {
  CMatrix nabla1;
  CMatrix nabla1_prime;
  CMatrix d2;
  CMatrix nabla2;
  CMatrix nabla2_prime;
};

// Fills nabla2 / nabla2_prime from d2.
GradientBundle assemble_bundle(const PhasePoint& x, CMatrix nabla1, CMatrix nabla1_prime, CMatrix d2);

enum class Invariance { None, Right, Left, Both };

enum class Part { Real, Imag };

// Fourth-order central-difference gradient with respect to the trace
// pairing. `shifted` returns the function value at the point displaced by
// the given matrix; the result D satisfies <D, X> ~ d/dt shifted(tX).
CMatrix fd_gradient(std::size_t n, double h, const std::function<double(const CMatrix&)>& shifted);

class Observable {
 public:
  using Evaluator = std::function<double(const PhasePoint&)>;
  using Differentiator = std::function<GradientBundle(const PhasePoint&)>;

  Observable(std::string name, Evaluator eval, Invariance invariance = Invariance::None,
             Differentiator analytic = nullptr);

  const std::string& name() const { return name_; }
  Invariance invariance() const { return invariance_; }
  bool has_analytic_gradients() const { return static_cast<bool>(analytic_); }
  double fd_step() const { return fd_step_; }

  double operator()(const PhasePoint& x) const { return eval_(x); }
  GradientBundle gradients(const PhasePoint& x) const;
  GradientBundle finite_difference_gradients(const PhasePoint& x) const;

  Observable with_fd_step(double h) const;
  Observable renamed(std::string name) const;

 private:
  std::string name_;
  Evaluator eval_;
  Invariance invariance_;
  Differentiator analytic_;
  double fd_step_ = kDefaultFdStep;
};

// Letters of a trace word. The tilde letters refer to J~ = -g^{-1} J g,
// Plus/Minus to the anti-Hermitian/Hermitian parts.
enum class Letter {
  J,
  JPlus,
  JMinus,
  JTilde,
  JTildePlus,
  JTildeMinus,
  G,
  GAdjoint,
  GInverse,
  Constant,
};

struct WordFactor {
  Letter letter = Letter::J;
  int power = 1;
  CMatrix constant{};  // used by Letter::Constant only
};

// Re or Im of coeff * tr(F_1^{k_1} F_2^{k_2} ...), with analytic gradients.
Observable trace_word(std::vector<WordFactor> word, Part part, Complex coeff = 1.0,
                      Invariance invariance = Invariance::None, std::string name = "");

// H_k = Re tr(J^k)/k and H~_k = Im tr(J^k)/k.
Observable hamiltonian(int k, Part part);

// J_T = <T, J>.
Observable j_component(const CMatrix& T);
// J_k for the k-th element (0-based) of the canonical real basis.
Observable j_component(std::size_t n, std::size_t basis_index);

// Re g_ab or Im g_ab (0-based indices).
Observable g_coordinate(std::size_t n, std::size_t a, std::size_t b, Part part);

// Alternating words in (J^+, J^-) or in (J~^+, J~^-); powers[i] > 0 with
// signs[i] = '+' or '-'. Declared invariant under U(n) x U(n).
Observable pm_trace_word(const std::string& pattern, Part part, bool tilde);

// "+1-2" -> [(plus, 1), (minus, 2)]; zero powers are dropped.
struct PmLetter {
  bool plus = true;
  int power = 1;
};
std::vector<PmLetter> parse_pm_pattern(const std::string& pattern);

Observable constant_observable(double c);
Observable sum(const Observable& F, const Observable& H, double a = 1.0, double b = 1.0);
Observable product(const Observable& F, const Observable& H);

// J~(g, J) = -g^{-1} J g.
CMatrix tilde_J(const PhasePoint& x);

// Largest |F(x) - F(transformed x)| over random unitary probes of the
// declared symmetry.
double invariance_defect(const Observable& F, const PhasePoint& x, Rng& rng, int probes = 8);

// Registry names: "H:k", "Htilde:k", "Jk:a,b,re|im" (T = E_ab or iE_ab,
// 1-based), "gr:a,b", "gi:a,b", "word:+1-2[:im]", "wordt:+1-2[:im]".
Observable parse_observable(const std::string& spec, std::size_t n);

}  // namespace bihamkit
