#include "bihamkit/observables.hpp"

#include "bihamkit/errors.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace bihamkit {

void PhasePoint::validate() const {
  require_square(g, "phase point g");
  require_square(J, "phase point J");
  require_same_size(g, J, "phase point");
  if (!g.allFinite() || !J.allFinite()) throw DomainError("phase point: non-finite entries");
  const RVector sigma = Eigen::JacobiSVD<CMatrix>(g).singularValues();
  if (!(sigma(sigma.size() - 1) > 1e-13 * std::max(1.0, sigma(0)))) {
    throw SingularMatrixError("singular g: the group element is not invertible");
  }
}

GradientBundle assemble_bundle(const PhasePoint& x, CMatrix nabla1, CMatrix nabla1_prime, CMatrix d2) {
  GradientBundle b;
  b.nabla2 = x.J * d2;
  b.nabla2_prime = d2 * x.J;
  b.nabla1 = std::move(nabla1);
  b.nabla1_prime = std::move(nabla1_prime);
  b.d2 = std::move(d2);
  return b;
}

CMatrix fd_gradient(std::size_t n, double h, const std::function<double(const CMatrix&)>& shifted) {
  CMatrix D = CMatrix::Zero(n, n);
  for (std::size_t k = 0; k < real_dimension(n); ++k) {
    const CMatrix E = basis_element(n, k);
    const double up2 = shifted(2.0 * h * E), up = shifted(h * E);
    const double down = shifted(-h * E), down2 = shifted(-2.0 * h * E);
    if (!std::isfinite(up2) || !std::isfinite(up) || !std::isfinite(down) || !std::isfinite(down2)) {
      throw DomainError("non-finite function value while probing derivatives");
    }
    // Fourth-order stencil: nested brackets differentiate FD output again.
    const double slope = (8.0 * (up - down) - (up2 - down2)) / (12.0 * h);
    const std::size_t slot = k % (n * n);
    const std::size_t a = slot / n;
    const std::size_t b = slot % n;
    // <D, E_ab> = Re D_ba and <D, i E_ab> = -Im D_ba.
    if (k < n * n) {
      D(b, a) += slope;
    } else {
      D(b, a) += Complex(0.0, -slope);
    }
  }
  return D;
}

Observable::Observable(std::string name, Evaluator eval, Invariance invariance, Differentiator analytic)
    : name_(std::move(name)), eval_(std::move(eval)), invariance_(invariance), analytic_(std::move(analytic)) {}

GradientBundle Observable::gradients(const PhasePoint& x) const {
  x.validate();
  if (analytic_) return analytic_(x);
  return finite_difference_gradients(x);
}

GradientBundle Observable::finite_difference_gradients(const PhasePoint& x) const {
  const std::size_t n = x.n();
  const double h_group = fd_step_;
  const double h_alg = fd_step_ * (1.0 + max_abs(x.J));
  CMatrix left = fd_gradient(n, h_group, [&](const CMatrix& d) {
    return eval_(PhasePoint{x.g + d * x.g, x.J});
  });
  CMatrix right = fd_gradient(n, h_group, [&](const CMatrix& d) {
    return eval_(PhasePoint{x.g + x.g * d, x.J});
  });
  CMatrix d2 = fd_gradient(n, h_alg, [&](const CMatrix& d) { return eval_(PhasePoint{x.g, x.J + d}); });
  return assemble_bundle(x, std::move(left), std::move(right), std::move(d2));
}

Observable Observable::with_fd_step(double h) const {
  Observable copy = *this;
  copy.fd_step_ = h;
  return copy;
}

Observable Observable::renamed(std::string name) const {
  Observable copy = *this;
  copy.name_ = std::move(name);
  return copy;
}

CMatrix tilde_J(const PhasePoint& x) {
  require_same_size(x.g, x.J, "tilde_J");
  Eigen::PartialPivLU<CMatrix> lu(x.g);
  const CMatrix gJg = lu.solve(x.J * x.g);
  if (!gJg.allFinite()) throw SingularMatrixError("singular g: cannot form g^{-1} J g");
  return -gJg;
}

namespace {

enum class Proj { None, Plus, Minus };

CMatrix project(const CMatrix& X, Proj p) {
  switch (p) {
    case Proj::Plus:
      return anti_part(X);
    case Proj::Minus:
      return herm_part(X);
    case Proj::None:
      break;
  }
  return X;
}

// One term of a letter's directional derivative: proj(A X B), or
// proj(A X^* B) when adjoint is set.
struct DerivTerm {
  CMatrix A;
  CMatrix B;
  bool adjoint = false;
  Proj proj = Proj::None;
};

struct LetterData {
  CMatrix value;
  std::vector<DerivTerm> left;
  std::vector<DerivTerm> right;
  std::vector<DerivTerm> alg;
};

Proj letter_proj(Letter l) {
  switch (l) {
    case Letter::JPlus:
    case Letter::JTildePlus:
      return Proj::Plus;
    case Letter::JMinus:
    case Letter::JTildeMinus:
      return Proj::Minus;
    default:
      return Proj::None;
  }
}

// Values shared by every letter at one point.
struct PointCache {
  const PhasePoint& x;
  CMatrix I;
  CMatrix g_inv;
  CMatrix jt;
  bool have_inverse = false;

  explicit PointCache(const PhasePoint& p) : x(p), I(CMatrix::Identity(p.g.rows(), p.g.cols())) {}

  void need_inverse() {
    if (have_inverse) return;
    Eigen::PartialPivLU<CMatrix> lu(x.g);
    g_inv = lu.inverse();
    if (!g_inv.allFinite()) throw SingularMatrixError("singular g");
    jt = -g_inv * x.J * x.g;
    have_inverse = true;
  }
};

LetterData letter_data(const WordFactor& f, PointCache& c, bool with_derivatives) {
  LetterData d;
  const Proj p = letter_proj(f.letter);
  const CMatrix& g = c.x.g;
  const CMatrix& J = c.x.J;
  switch (f.letter) {
    case Letter::J:
    case Letter::JPlus:
    case Letter::JMinus:
      d.value = project(J, p);
      if (with_derivatives) d.alg.push_back({c.I, c.I, false, p});
      break;
    case Letter::JTilde:
    case Letter::JTildePlus:
    case Letter::JTildeMinus:
      c.need_inverse();
      d.value = project(c.jt, p);
      if (with_derivatives) {
        // left: -g^{-1}[J, X]g, right: [J~, X], J-direction: -g^{-1} X g.
        d.left.push_back({-c.g_inv * J, g, false, p});
        d.left.push_back({c.g_inv, J * g, false, p});
        d.right.push_back({c.jt, c.I, false, p});
        d.right.push_back({-c.I, c.jt, false, p});
        d.alg.push_back({-c.g_inv, g, false, p});
      }
      break;
    case Letter::G:
      d.value = g;
      if (with_derivatives) {
        d.left.push_back({c.I, g, false, Proj::None});
        d.right.push_back({g, c.I, false, Proj::None});
      }
      break;
    case Letter::GAdjoint:
      d.value = g.adjoint();
      if (with_derivatives) {
        d.left.push_back({g.adjoint(), c.I, true, Proj::None});
        d.right.push_back({c.I, g.adjoint(), true, Proj::None});
      }
      break;
    case Letter::GInverse:
      c.need_inverse();
      d.value = c.g_inv;
      if (with_derivatives) {
        d.left.push_back({-c.g_inv, c.I, false, Proj::None});
        d.right.push_back({-c.I, c.g_inv, false, Proj::None});
      }
      break;
    case Letter::Constant:
      require_same_size(f.constant, g, "trace word constant");
      d.value = f.constant;
      break;
  }
  return d;
}

std::vector<WordFactor> flatten(const std::vector<WordFactor>& word) {
  std::vector<WordFactor> flat;
  for (const auto& f : word) {
    if (f.power < 0) throw DomainError("trace word: negative power");
    for (int k = 0; k < f.power; ++k) flat.push_back(f);
  }
  return flat;
}

// Accumulate the gradient D with Re tr(C dL(X)) = <D, X> for all terms.
void accumulate(CMatrix& D, const CMatrix& C, const std::vector<DerivTerm>& terms) {
  for (const auto& t : terms) {
    const CMatrix core = t.B * project(C, t.proj) * t.A;
    if (t.adjoint) {
      D += core.adjoint();
    } else {
      D += core;
    }
  }
}

}  // namespace

Observable trace_word(std::vector<WordFactor> word, Part part, Complex coeff, Invariance invariance,
                      std::string name) {
  auto flat = std::make_shared<const std::vector<WordFactor>>(flatten(word));
  if (flat->empty()) throw DomainError("trace word must be non-empty");
  const Complex weight = part == Part::Real ? coeff : Complex(0.0, -1.0) * coeff;

  auto eval = [flat, weight](const PhasePoint& x) {
    PointCache cache(x);
    CMatrix P = cache.I;
    for (const auto& f : *flat) P = P * letter_data(f, cache, false).value;
    return (weight * P.trace()).real();
  };

  auto grad = [flat, weight](const PhasePoint& x) {
    PointCache cache(x);
    const std::size_t m = flat->size();
    std::vector<LetterData> letters;
    letters.reserve(m);
    for (const auto& f : *flat) letters.push_back(letter_data(f, cache, true));
    // prefix[i] = L_0 ... L_{i-1}, suffix[i] = L_i ... L_{m-1}.
    std::vector<CMatrix> prefix(m + 1), suffix(m + 1);
    prefix[0] = cache.I;
    for (std::size_t i = 0; i < m; ++i) prefix[i + 1] = prefix[i] * letters[i].value;
    suffix[m] = cache.I;
    for (std::size_t i = m; i-- > 0;) suffix[i] = letters[i].value * suffix[i + 1];

    const Eigen::Index n = x.g.rows();
    CMatrix left = CMatrix::Zero(n, n), right = CMatrix::Zero(n, n), alg = CMatrix::Zero(n, n);
    for (std::size_t i = 0; i < m; ++i) {
      const CMatrix C = weight * (suffix[i + 1] * prefix[i]);
      accumulate(left, C, letters[i].left);
      accumulate(right, C, letters[i].right);
      accumulate(alg, C, letters[i].alg);
    }
    return assemble_bundle(x, std::move(left), std::move(right), std::move(alg));
  };

  if (name.empty()) name = "trace_word";
  return Observable(std::move(name), std::move(eval), invariance, std::move(grad));
}

Observable hamiltonian(int k, Part part) {
  if (k < 1) throw DomainError("hamiltonian: k must be >= 1");
  const std::string name = (part == Part::Real ? "H:" : "Htilde:") + std::to_string(k);
  return trace_word({WordFactor{Letter::J, k, {}}}, part, 1.0 / k, Invariance::Both, name);
}

Observable j_component(const CMatrix& T) {
  return trace_word({WordFactor{Letter::Constant, 1, T}, WordFactor{Letter::J, 1, {}}}, Part::Real, 1.0,
                    Invariance::Right, "Jk");
}

Observable j_component(std::size_t n, std::size_t basis_index) {
  return j_component(basis_element(n, basis_index)).renamed("Jk#" + std::to_string(basis_index));
}

Observable g_coordinate(std::size_t n, std::size_t a, std::size_t b, Part part) {
  if (a >= n || b >= n) throw DomainError("g_coordinate: index out of range");
  // Re/Im g_ab = Re/Im tr(E_ba g).
  CMatrix E = CMatrix::Zero(n, n);
  E(b, a) = 1.0;
  const std::string name = (part == Part::Real ? "gr:" : "gi:") + std::to_string(a + 1) + "," + std::to_string(b + 1);
  return trace_word({WordFactor{Letter::Constant, 1, E}, WordFactor{Letter::G, 1, {}}}, part, 1.0, Invariance::None,
                    name);
}

std::vector<PmLetter> parse_pm_pattern(const std::string& pattern) {
  std::vector<PmLetter> letters;
  std::size_t pos = 0;
  while (pos < pattern.size()) {
    const char sign = pattern[pos];
    if (sign != '+' && sign != '-') throw DomainError("word pattern: expected '+' or '-' in '" + pattern + "'");
    ++pos;
    std::size_t end = pos;
    while (end < pattern.size() && std::isdigit(static_cast<unsigned char>(pattern[end]))) ++end;
    if (end == pos) throw DomainError("word pattern: missing power in '" + pattern + "'");
    const int power = std::stoi(pattern.substr(pos, end - pos));
    pos = end;
    if (power > 0) letters.push_back(PmLetter{sign == '+', power});
  }
  if (letters.empty()) throw DomainError("word pattern must contain a positive power");
  return letters;
}

Observable pm_trace_word(const std::string& pattern, Part part, bool tilde) {
  std::vector<WordFactor> word;
  for (const auto& letter : parse_pm_pattern(pattern)) {
    Letter l;
    if (tilde) {
      l = letter.plus ? Letter::JTildePlus : Letter::JTildeMinus;
    } else {
      l = letter.plus ? Letter::JPlus : Letter::JMinus;
    }
    word.push_back(WordFactor{l, letter.power, {}});
  }
  std::string name = (tilde ? "wordt:" : "word:") + pattern + (part == Part::Imag ? ":im" : "");
  return trace_word(std::move(word), part, 1.0, Invariance::Both, std::move(name));
}

Observable constant_observable(double c) {
  return Observable(
      "const", [c](const PhasePoint&) { return c; }, Invariance::Both,
      [](const PhasePoint& x) {
        const auto n = x.g.rows();
        return assemble_bundle(x, CMatrix::Zero(n, n), CMatrix::Zero(n, n), CMatrix::Zero(n, n));
      });
}

namespace {

Invariance combine(Invariance a, Invariance b) {
  if (a == b) return a;
  if (a == Invariance::Both) return b;
  if (b == Invariance::Both) return a;
  return Invariance::None;
}

}  // namespace

Observable sum(const Observable& F, const Observable& H, double a, double b) {
  Observable::Differentiator grad;
  if (F.has_analytic_gradients() && H.has_analytic_gradients()) {
    grad = [F, H, a, b](const PhasePoint& x) {
      const auto f = F.gradients(x);
      const auto h = H.gradients(x);
      return assemble_bundle(x, a * f.nabla1 + b * h.nabla1, a * f.nabla1_prime + b * h.nabla1_prime,
                             a * f.d2 + b * h.d2);
    };
  }
  return Observable(
      "(" + F.name() + "+" + H.name() + ")", [F, H, a, b](const PhasePoint& x) { return a * F(x) + b * H(x); },
      combine(F.invariance(), H.invariance()), std::move(grad));
}

Observable product(const Observable& F, const Observable& H) {
  Observable::Differentiator grad;
  if (F.has_analytic_gradients() && H.has_analytic_gradients()) {
    grad = [F, H](const PhasePoint& x) {
      const double fv = F(x);
      const double hv = H(x);
      const auto f = F.gradients(x);
      const auto h = H.gradients(x);
      return assemble_bundle(x, hv * f.nabla1 + fv * h.nabla1, hv * f.nabla1_prime + fv * h.nabla1_prime,
                             hv * f.d2 + fv * h.d2);
    };
  }
  return Observable(
      "(" + F.name() + "*" + H.name() + ")", [F, H](const PhasePoint& x) { return F(x) * H(x); },
      combine(F.invariance(), H.invariance()), std::move(grad));
}

double invariance_defect(const Observable& F, const PhasePoint& x, Rng& rng, int probes) {
  const double base = F(x);
  double worst = 0.0;
  const std::size_t n = x.n();
  const bool right = F.invariance() == Invariance::Right || F.invariance() == Invariance::Both;
  const bool left = F.invariance() == Invariance::Left || F.invariance() == Invariance::Both;
  for (int k = 0; k < probes; ++k) {
    if (right) {
      const CMatrix eta = random_unitary(n, rng);
      worst = std::max(worst, std::abs(F(PhasePoint{x.g * eta.adjoint(), x.J}) - base));
    }
    if (left) {
      const CMatrix eta = random_unitary(n, rng);
      worst = std::max(worst, std::abs(F(PhasePoint{eta * x.g, eta * x.J * eta.adjoint()}) - base));
    }
  }
  return worst;
}

namespace {

std::vector<std::string> split(const std::string& s, char delim) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, delim)) out.push_back(item);
  return out;
}

std::size_t parse_index(const std::string& s, std::size_t n, const std::string& spec) {
  std::size_t idx = 0;
  try {
    idx = std::stoul(s);
  } catch (const std::exception&) {
    throw DomainError("bad index in observable '" + spec + "'");
  }
  if (idx < 1 || idx > n) throw DomainError("index out of range in observable '" + spec + "'");
  return idx - 1;
}

}  // namespace

Observable parse_observable(const std::string& spec, std::size_t n) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw DomainError("unknown observable '" + spec + "'");
  const std::string head = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  try {
    if (head == "H" || head == "Htilde") {
      return hamiltonian(std::stoi(rest), head == "H" ? Part::Real : Part::Imag);
    }
    if (head == "Jk") {
      const auto parts = split(rest, ',');
      if (parts.size() != 3 || (parts[2] != "re" && parts[2] != "im")) {
        throw DomainError("expected Jk:a,b,re|im");
      }
      const std::size_t a = parse_index(parts[0], n, spec);
      const std::size_t b = parse_index(parts[1], n, spec);
      const std::size_t base = a * n + b;
      return j_component(n, parts[2] == "re" ? base : base + n * n).renamed(spec);
    }
    if (head == "gr" || head == "gi") {
      const auto parts = split(rest, ',');
      if (parts.size() != 2) throw DomainError("expected " + head + ":a,b");
      return g_coordinate(n, parse_index(parts[0], n, spec), parse_index(parts[1], n, spec),
                          head == "gr" ? Part::Real : Part::Imag);
    }
    if (head == "word" || head == "wordt") {
      const auto parts = split(rest, ':');
      const Part part = parts.size() > 1 && parts[1] == "im" ? Part::Imag : Part::Real;
      return pm_trace_word(parts.at(0), part, head == "wordt");
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    throw DomainError("malformed observable '" + spec + "'");
  }
  throw DomainError("unknown observable '" + spec + "'");
}

}  // namespace bihamkit
