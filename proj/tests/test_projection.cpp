#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fblin/ops.hpp"
#include "fblin/projection.hpp"
#include "fblin/random_fields.hpp"
#include "test_helpers.hpp"

using namespace fblin;
using namespace fblin::test;

TEST_CASE("projection closed forms") {
    Grid g = build_grid(64, 64);
    Metric m = Metric::identity(g);

    VectorField rot = rotation(g);
    CHECK(maxabs(project(rot, m, g) - rot) < 1e-10);

    // Gradient of a potential vanishing on the boundary is annihilated.
    ScalarField q0 = (g.R * g.R - 1.0) / 4.0;
    OneForm dq = grad(q0, g);
    CHECK(maxabs(project({dq.x, dq.y}, m, g)) < 1e-4);

    // (y1, 0) -> (y1/2, -y2/2); div (y1, 0) = 1 so the defect is sqrt(pi).
    VectorField U{y1(g), ScalarField::Zero(64, 64)};
    VectorField expect{y1(g) / 2.0, -y2(g) / 2.0};
    CHECK(maxabs(project(U, m, g) - expect) < 1e-3);
    CHECK(divergence_defect(U, m, g) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-10));
    CHECK(divergence_defect(rot, m, g) < 1e-10);
    CHECK(divergence_defect(VectorField::zero(64, 64), m, g) == 0.0);
}

TEST_CASE("projection is an orthogonal projector on random fields") {
    Grid g = build_grid(32, 32);
    Metric m = Metric::identity(g);
    auto rng = seeded_rng(0);
    for (int i = 0; i < 5; ++i) {
        VectorField U = random_vector_field(g, rng);
        VectorField PU = project(U, m, g);
        VectorField PPU = project(PU, m, g);
        double nU = norm(U, m, g);
        CHECK(norm(PPU - PU, m, g) <= 1e-8 * nU);
        CHECK(norm(PU, m, g) <= (1 + 1e-8) * nU);
        CHECK(divergence_defect(PU, m, g) < 1e-8 * nU);
        VectorField W = random_divergence_free(g, m, rng);
        CHECK(std::abs(inner_product(W, U - PU, m, g)) <= 1e-6 * norm(W, m, g) * nU);
    }
}

TEST_CASE("projection in a non-flat metric") {
    Grid g = build_grid(24, 16);
    ScalarField r2 = g.R * g.R;
    // Constant-determinant, SPD, non-identity metric.
    SymTensor gm{1.0 + 0.2 * r2, 0.1 * y1(g) * y2(g), 1.0 - 0.1 * r2};
    ScalarField kappa = (gm.xx * gm.yy - gm.xy * gm.xy).sqrt();
    Metric m = Metric::from(gm, kappa);
    auto rng = seeded_rng(7);
    VectorField U = random_vector_field(g, rng);
    VectorField PU = project(U, m, g);
    CHECK(divergence_defect(PU, m, g) < 1e-8 * norm(U, m, g));
    CHECK(norm(project(PU, m, g) - PU, m, g) < 1e-8 * norm(U, m, g));
    VectorField W = random_divergence_free(g, m, rng);
    CHECK(std::abs(inner_product(W, U - PU, m, g)) <= 1e-8 * norm(W, m, g) * norm(U, m, g));
}
