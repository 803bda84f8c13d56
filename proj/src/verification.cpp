#include "bihamkit/verification.hpp"

#include "bihamkit/errors.hpp"
#include "bihamkit/flows.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

namespace bihamkit {

PhasePoint random_phase_point(std::size_t n, Rng& rng, double j_norm) {
  CMatrix J = random_matrix(n, rng);
  J *= j_norm / J.norm();
  return {random_group_element(n, rng), J};
}

namespace {

Observable random_coordinate(std::size_t n, Rng& rng) {
  std::uniform_int_distribution<std::size_t> index(0, n - 1);
  const Part part = uniform(rng, 0.0, 1.0) < 0.5 ? Part::Real : Part::Imag;
  if (uniform(rng, 0.0, 1.0) < 0.5) return g_coordinate(n, index(rng), index(rng), part);
  std::uniform_int_distribution<std::size_t> basis(0, real_dimension(n) - 1);
  return j_component(n, basis(rng));
}

Observable random_word(Rng& rng) {
  static const Letter kLetters[] = {Letter::J, Letter::JPlus, Letter::JMinus, Letter::JTilde,
                                    Letter::G, Letter::GInverse, Letter::GAdjoint};
  std::uniform_int_distribution<std::size_t> letter(0, std::size(kLetters) - 1);
  std::uniform_int_distribution<int> length(2, 3), power(1, 2);
  std::vector<WordFactor> word;
  const int len = length(rng);
  for (int i = 0; i < len; ++i) word.push_back({kLetters[letter(rng)], power(rng), {}});
  const Part part = uniform(rng, 0.0, 1.0) < 0.5 ? Part::Real : Part::Imag;
  return trace_word(std::move(word), part, Complex(gaussian(rng), gaussian(rng)));
}

}  // namespace

Observable random_observable(std::size_t n, Rng& rng) {
  const Observable pair = product(random_coordinate(n, rng), random_coordinate(n, rng));
  return sum(pair, random_word(rng), uniform(rng, 0.5, 1.5), uniform(rng, -1.0, 1.0));
}

namespace {

double rel(double residual, double scale) { return std::abs(residual) / std::max(1.0, std::abs(scale)); }

double max_scale(std::initializer_list<double> values) {
  double s = 0.0;
  for (double v : values) s = std::max(s, std::abs(v));
  return s;
}

std::uint64_t suite_seed(std::uint64_t seed, const std::string& name) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return seed ^ h;
}

struct TrialContext {
  const VerificationConfig& cfg;
  Rng& rng;
};

using Trial = std::function<double(TrialContext&)>;

struct SuiteDef {
  bool closed_form;
  Trial trial;
};

double jacobi_trial(TrialContext& c, const BracketSelector& sel) {
  const std::size_t n = c.cfg.n;
  const PhasePoint x = random_phase_point(n, c.rng);
  const Observable F = random_observable(n, c.rng), G = random_observable(n, c.rng),
                   H = random_observable(n, c.rng);
  double scale = 0.0;
  const double r = jacobi_residual(sel, F, G, H, x, &scale);
  return rel(r, scale);
}

// An invariant pair evaluated at a generic point of its U(n) x U(n) orbit.
PhasePoint generic_orbit_point(const ReducedPoint& y, Rng& rng) {
  const std::size_t n = y.n();
  const CMatrix A = random_unitary(n, rng), B = random_unitary(n, rng);
  return {A * exp_diag(y.q) * B.adjoint(), A * y.J * A.adjoint()};
}

const std::map<std::string, SuiteDef>& suite_table() {
  static const std::map<std::string, SuiteDef> table = {
      {"jacobi-1", {false, [](TrialContext& c) { return jacobi_trial(c, BracketSelector::canonical()); }}},
      {"jacobi-2", {false, [](TrialContext& c) { return jacobi_trial(c, BracketSelector::quadratic()); }}},
      {"compatibility",
       {false,
        [](TrialContext& c) {
          const double a = uniform(c.rng, -1.0, 1.0), b = uniform(c.rng, -1.0, 1.0);
          return jacobi_trial(c, BracketSelector::combination(a, b));
        }}},
      {"lie-derivative",
       {false,
        [](TrialContext& c) {
          const PhasePoint x = random_phase_point(c.cfg.n, c.rng);
          const Observable F = random_observable(c.cfg.n, c.rng), H = random_observable(c.cfg.n, c.rng);
          const double first = pb1(F, H, x);
          const double lie = lie_derivative_bracket(F, H, x);
          return rel(first - lie, max_scale({first, lie}));
        }}},
      {"recursion",
       {true,
        [](TrialContext& c) {
          const PhasePoint x = random_phase_point(c.cfg.n, c.rng);
          const Observable F = random_observable(c.cfg.n, c.rng);
          double worst = 0.0;
          for (int k = 1; k <= static_cast<int>(c.cfg.n); ++k) {
            for (Part part : {Part::Real, Part::Imag}) {
              const double second = pb2(F, hamiltonian(k, part), x);
              const double first = pb1(F, hamiltonian(k + 1, part), x);
              worst = std::max(worst, rel(second - first, max_scale({first, second})));
            }
          }
          return worst;
        }}},
      {"flows-conservation",
       {true,
        [](TrialContext& c) {
          // Small J keeps exp(J^k t) well conditioned up to t = 10.
          const PhasePoint x = random_phase_point(c.cfg.n, c.rng, 0.5);
          double worst = 0.0;
          for (int k = 1; k <= static_cast<int>(c.cfg.n); ++k) {
            for (Part part : {Part::Real, Part::Imag}) {
              worst = std::max(worst, conservation_report(explicit_trajectory(x, k, part, 10.0, 50)).max_drift());
            }
          }
          return worst;
        }}},
      {"reduction-oracle",
       {false,
        [](TrialContext& c) {
          const ReducedPoint y = random_reduced_point(c.cfg.n, c.rng);
          const ReducedObservable f = random_reduced_observable(c.cfg.n, c.rng);
          const ReducedObservable h = random_reduced_observable(c.cfg.n, c.rng);
          const Observable F = extend_invariant(f).with_fd_step(c.cfg.fd_step);
          const Observable H = extend_invariant(h).with_fd_step(c.cfg.fd_step);
          const PhasePoint x = generic_orbit_point(y, c.rng);
          const double r1 = red_pb1(f, h, y), u1 = pb1(F, H, x);
          const double r2 = red_pb2(f, h, y), u2 = pb2(F, H, x);
          return std::max(rel(r1 - u1, max_scale({r1, u1})), rel(r2 - u2, max_scale({r2, u2})));
        }}},
      {"gradient-reconstruction",
       {false,
        [](TrialContext& c) {
          const ReducedPoint y = random_reduced_point(c.cfg.n, c.rng);
          const ReducedObservable f = random_reduced_observable(c.cfg.n, c.rng);
          const Observable F = extend_invariant(f).with_fd_step(c.cfg.fd_step);
          const CMatrix formula = extension_nabla1(f, y);
          return max_abs(formula - F.gradients(embed_slice(y)).nabla1) / std::max(1.0, max_abs(formula));
        }}},
      {"hermitian-slice",
       {true,
        [](TrialContext& c) {
          const std::size_t n = c.cfg.n;
          const ReducedPoint y = restrict_minus(random_reduced_point(n, c.rng));
          const ReducedObservable f = random_reduced_observable(n, c.rng);
          const ReducedObservable h = random_reduced_observable(n, c.rng);
          const double a1 = minus_pb1(f, h, y), b1 = red_pb1(f, h, y);
          const double a2 = minus_pb2(f, h, y), b2 = red_pb2(f, h, y);
          double worst = std::max(rel(a1 - b1, max_scale({a1, b1})), rel(a2 - b2, max_scale({a2, b2})));
          for (int k = 1; k <= static_cast<int>(n); ++k) {
            for (int which : {1, 2}) {
              const TangentUpdate tilde = spectral_field(k, Part::Imag, which, y);
              worst = std::max({worst, tilde.dq.cwiseAbs().maxCoeff(), max_abs(tilde.dJ)});
              const TangentUpdate v = v_field(k, which, y);
              const TangentUpdate dual = field_by_duality(which, reduced_hamiltonian(k, Part::Real).gradients(y), y);
              worst = std::max({worst, (v.dq - dual.dq).cwiseAbs().maxCoeff(), max_abs(v.dJ - dual.dJ)});
            }
          }
          return worst;
        }}},
      {"spin-bracket",
       {false,
        [](TrialContext& c) {
          const std::size_t n = c.cfg.n;
          const SpinCoordinates s = random_spin_coordinates(n, c.rng);
          const ReducedObservable f = random_reduced_observable(n, c.rng);
          const ReducedObservable h = random_reduced_observable(n, c.rng);
          const SpinGradient gf = spin_partial_gradients(reduced_to_spin(f), s, c.cfg.fd_step);
          const SpinGradient gh = spin_partial_gradients(reduced_to_spin(h), s, c.cfg.fd_step);
          const double a = spin_pb1(gf, gh, s), b = red_pb1(f, h, from_spin(s));
          double worst = rel(a - b, max_scale({a, b}));
          // Canonical pairs: {q_i, p_j} = delta_ij.
          for (std::size_t i = 0; i < n; ++i) {
            const SpinGradient qi = spin_partial_gradients([i](const SpinCoordinates& z) { return z.q(i); }, s);
            for (std::size_t j = 0; j < n; ++j) {
              const SpinGradient pj = spin_partial_gradients([j](const SpinCoordinates& z) { return z.p(j); }, s);
              worst = std::max(worst, std::abs(spin_pb1(qi, pj, s) - (i == j ? 1.0 : 0.0)));
            }
          }
          return worst;
        }}},
      {"trace-identity",
       {true,
        [](TrialContext& c) {
          const std::size_t n = c.cfg.n;
          return trace_identity_residuals(random_matrix(n, c.rng), random_matrix(n, c.rng), random_matrix(n, c.rng))
              .max();
        }}},
      {"spin-identities",
       {true,
        [](TrialContext& c) {
          const SpinIdentityData d = random_spin_identity_data(c.cfg.n, c.rng);
          const ReducedPoint y = from_spin(d.s);
          const double energy = std::abs(spin_hamiltonian_2(d.s) - 0.5 * (y.J * y.J).trace().real());
          const SpinCoordinates back = to_spin(y);
          const double roundtrip = std::max({max_abs(back.xi_l - d.s.xi_l), max_abs(back.xi_r - d.s.xi_r),
                                             (back.p - d.s.p).cwiseAbs().maxCoeff()});
          return std::max({spin_identity_residuals(d).max(), energy, roundtrip});
        }}},
      {"double-transport",
       {false,
        [](TrialContext& c) {
          const DoublePoint x = random_near_identity(c.cfg.n, c.rng);
          const Observable F = random_observable(c.cfg.n, c.rng), H = random_observable(c.cfg.n, c.rng);
          const double value = pb2(F, H, psi_map(x));
          return verify_transport(F, H, x) / std::max(1.0, std::abs(value));
        }}},
  };
  return table;
}

std::string format_double(double v) {
  std::ostringstream out;
  out << std::setprecision(6) << std::scientific << v;
  return out.str();
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "jacobi-1", "jacobi-2",  "compatibility", "lie-derivative", "recursion",  "flows-conservation",
      "reduction-oracle", "gradient-reconstruction", "hermitian-slice", "spin-bracket", "trace-identity", "spin-identities", "double-transport"};
  return names;
}

void VerificationConfig::validate() const {
  if (n < 2) throw DomainError("verification: n must be at least 2");
  if (trials < 1) throw DomainError("verification: trials must be at least 1");
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(tol_abs) || !positive(tol_rel)) throw DomainError("verification: tolerances must be positive");
  if (!positive(fd_step)) throw DomainError("verification: fd step must be positive");
  for (const auto& s : suites) {
    if (suite_table().count(s) == 0) throw DomainError("unknown suite: " + s);
  }
}

bool VerificationReport::pass() const {
  return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.pass; });
}

std::string VerificationReport::to_json() const {
  nlohmann::ordered_json out;
  out["suites"] = nlohmann::ordered_json::array();
  for (const auto& s : suites) {
    nlohmann::ordered_json row;
    row["suite"] = s.suite;
    row["trials"] = s.trials;
    row["max_residual"] = s.max_residual;
    row["threshold"] = s.threshold;
    row["pass"] = s.pass;
    out["suites"].push_back(row);
  }
  out["pass"] = pass();
  return out.dump(2);
}

std::string VerificationReport::to_csv() const {
  std::ostringstream out;
  out << "suite,trials,max_residual,threshold,pass\n";
  for (const auto& s : suites) {
    out << s.suite << ',' << s.trials << ',' << format_double(s.max_residual) << ',' << format_double(s.threshold)
        << ',' << (s.pass ? "true" : "false") << '\n';
  }
  return out.str();
}

SuiteResult run_one_suite(const std::string& suite, const VerificationConfig& cfg) {
  cfg.validate();
  const auto it = suite_table().find(suite);
  if (it == suite_table().end()) throw DomainError("unknown suite: " + suite);
  Rng rng(suite_seed(cfg.seed, suite));
  TrialContext ctx{cfg, rng};
  SuiteResult result;
  result.suite = suite;
  result.trials = cfg.trials;
  result.threshold = it->second.closed_form ? cfg.tol_abs : cfg.tol_rel;
  bool finite = true;
  for (int t = 0; t < cfg.trials; ++t) {
    const double r = it->second.trial(ctx);
    if (!std::isfinite(r)) finite = false;
    result.max_residual = std::max(result.max_residual, r);
  }
  result.pass = finite && result.max_residual < result.threshold;
  return result;
}

VerificationReport run_suite(const VerificationConfig& cfg) {
  cfg.validate();
  VerificationReport report;
  const std::vector<std::string>& selected = cfg.suites.empty() ? suite_names() : cfg.suites;
  for (const auto& s : selected) report.suites.push_back(run_one_suite(s, cfg));
  return report;
}

}  // namespace bihamkit
