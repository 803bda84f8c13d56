#pragma once

// Seeded samplers for the randomized checks. Every sampler draws only from
// the generator it is handed, so a fixed seed reproduces a run exactly.

#include "bihamkit/linalg.hpp"

#include <cstdint>
#include <random>

namespace bihamkit {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi);
double gaussian(Rng& rng);

// Entries with independent standard normal real and imaginary parts, times scale.
CMatrix random_matrix(std::size_t n, Rng& rng, double scale = 1.0);
CMatrix random_hermitian(std::size_t n, Rng& rng, double scale = 1.0);
CMatrix random_anti_hermitian(std::size_t n, Rng& rng, double scale = 1.0);
CMatrix random_unitary(std::size_t n, Rng& rng);
// Diagonal unitary.
CMatrix random_torus(std::size_t n, Rng& rng);

// Strictly decreasing q whose consecutive gaps are at least min_gap.
RVector random_regular_q(std::size_t n, Rng& rng, double min_gap = 0.3);

// exp(scale * X) for X with unit max-entry; well conditioned for small scale.
CMatrix random_group_element(std::size_t n, Rng& rng, double scale = 0.5);

}  // namespace bihamkit
