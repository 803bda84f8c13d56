#pragma once

// The explicit bi-Hamiltonian flows generated by H_k and H~_k, a fixed-step
// RK4 integrator for the Hamiltonian vector field of any observable, and
// drift monitoring for the constants of motion.

#include "bihamkit/brackets.hpp"

#include <vector>

namespace bihamkit {

struct FlowSpec {
  int k = 1;
  Part kind = Part::Real;
  BracketSelector bracket = BracketSelector::canonical();
  double t_final = 1.0;
  int steps = 100;

  // steps >= 1, k >= 1, finite t_final, bracket canonical or quadratic.
  void validate() const;
};

// (exp(J^k t) g, J) for Part::Real, (exp(-i J^k t) g, J) for Part::Imag.
PhasePoint explicit_flow(const PhasePoint& x0, int k, Part kind, double t);

// Tangent vector (dg/dt, dJ/dt) of the Hamiltonian vector field of H under
// the selected bracket, read off from the brackets {coordinate, H}.
struct PhaseTangent {
  CMatrix dg;
  CMatrix dJ;
};
PhaseTangent hamiltonian_vector_field(const Observable& H, const BracketSelector& sel, const PhasePoint& x);

// Classical fourth-order Runge-Kutta with `steps` equal steps. Returns the
// visited points (steps + 1 entries) when `trajectory` is non-null.
PhasePoint numeric_flow(const PhasePoint& x0, const Observable& H, const BracketSelector& sel, double t, int steps,
                        std::vector<PhasePoint>* trajectory = nullptr);

// Samples (samples + 1 points, evenly spaced) of the explicit flow on [0, t].
std::vector<PhasePoint> explicit_trajectory(const PhasePoint& x0, int k, Part kind, double t, int samples);

struct ConservationReport {
  std::vector<double> h_drift;       // index k-1 holds max |H_k(x_i) - H_k(x_0)|
  std::vector<double> htilde_drift;  // same for H~_k
  double jtilde_drift = 0.0;         // max entrywise change of J~
  double max_drift() const;
};

// Drifts of H_k, H~_k (k = 1..n) and J~ along a trajectory.
ConservationReport conservation_report(const std::vector<PhasePoint>& trajectory);

// Max-entry distance between two phase points.
double phase_distance(const PhasePoint& a, const PhasePoint& b);

// Observed convergence order of numeric_flow for the Hamiltonian that
// generates the explicit (k, kind) flow under `sel` (H_{k+1} for the
// canonical bracket, H_k for the quadratic one), measured by step halving.
double convergence_order(const PhasePoint& x0, int k, Part kind, const BracketSelector& sel, double t, int steps);

}  // namespace bihamkit
