#pragma once

#include <cstdint>
#include <random>

#include "fblin/fields.hpp"
#include "fblin/grid.hpp"
#include "fblin/metric.hpp"

namespace fblin {

// Band-limited random scalar: sum over integer wave vectors |k_i| <= K of
// a_k cos(k . y + phi_k) with a_k ~ N(0, 1) / (1 + |k|^2).
ScalarField random_band_limited(const Grid& grid, std::mt19937_64& rng, int K = 3);
VectorField random_vector_field(const Grid& grid, std::mt19937_64& rng, int K = 3);
// Projection of a random vector field.
VectorField random_divergence_free(const Grid& grid, const Metric& m, std::mt19937_64& rng, int K = 3);

// Deterministic generator for property test number i under a base seed.
std::mt19937_64 seeded_rng(std::uint64_t seed, std::uint64_t stream = 0);

}  // namespace fblin
