#include "fblin/random_fields.hpp"

#include <cmath>

#include "fblin/projection.hpp"

namespace fblin {

ScalarField random_band_limited(const Grid& grid, std::mt19937_64& rng, int K) {
    std::normal_distribution<double> amp(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    ScalarField y1 = grid.R * grid.cos_t, y2 = grid.R * grid.sin_t;
    ScalarField out = ScalarField::Zero(grid.n_r, grid.n_theta);
    for (int k1 = -K; k1 <= K; ++k1)
        for (int k2 = -K; k2 <= K; ++k2) {
            double a = amp(rng) / (1.0 + k1 * k1 + k2 * k2);
            double ph = phase(rng);
            out += a * (k1 * y1 + k2 * y2 + ph).cos();
        }
    return out;
}

VectorField random_vector_field(const Grid& grid, std::mt19937_64& rng, int K) {
    ScalarField a = random_band_limited(grid, rng, K);
    ScalarField b = random_band_limited(grid, rng, K);
    return {std::move(a), std::move(b)};
}

VectorField random_divergence_free(const Grid& grid, const Metric& m, std::mt19937_64& rng, int K) {
    return project(random_vector_field(grid, rng, K), m, grid);
}

std::mt19937_64 seeded_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace fblin
