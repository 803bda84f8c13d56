#pragma once

// Seeded randomized verification driver: each suite samples points and
// observables, evaluates an identity residual per trial, and reports the
// largest one against a threshold.

#include "bihamkit/heisenberg_double.hpp"
#include "bihamkit/spin_model.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bihamkit {

// ---- samplers shared by the suites and the tests ----

// g = exp(random), J with Frobenius norm j_norm.
PhasePoint random_phase_point(std::size_t n, Rng& rng, double j_norm = 1.0);

// a * c1 * c2 + b * w with c1, c2 random coordinates (Re/Im g_ab, J_T) and
// w a random trace word in J, J^+-, J~, g, g^{-1}, g^*; analytic gradients.
Observable random_observable(std::size_t n, Rng& rng);

// ---- suites ----

const std::vector<std::string>& suite_names();

struct VerificationConfig {
  std::size_t n = 3;
  int trials = 5;
  std::uint64_t seed = 1;
  double tol_abs = 1e-8;  // closed-form identities
  double tol_rel = 1e-5;  // identities evaluated through finite differences
  double fd_step = kDefaultFdStep;
  std::vector<std::string> suites;  // empty = all

  // n >= 2, trials >= 1, positive finite tolerances and step, known suites.
  void validate() const;
};

struct SuiteResult {
  std::string suite;
  int trials = 0;
  double max_residual = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct VerificationReport {
  std::vector<SuiteResult> suites;
  bool pass() const;
  std::string to_json() const;
  std::string to_csv() const;
};

// Residuals are normalized by max(1, |largest term|). The threshold is
// tol_abs for closed-form suites and tol_rel for suites that differentiate
// numerically. Each suite draws from its own generator seeded by
// (seed, suite name), so the report does not depend on which suites run.
SuiteResult run_one_suite(const std::string& suite, const VerificationConfig& cfg);
VerificationReport run_suite(const VerificationConfig& cfg);

}  // namespace bihamkit
