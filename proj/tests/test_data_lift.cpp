#include <doctest.h>

#include <cmath>

#include "fblin/background.hpp"
#include "fblin/data_lift.hpp"
#include "fblin/normal_ops.hpp"
#include "fblin/ops.hpp"
#include "fblin/projection.hpp"
#include "fblin/random_fields.hpp"
#include "test_helpers.hpp"

using namespace fblin;
using namespace fblin::test;

namespace {

// Constant-field coefficients (mean of the x and y components).
Eigen::Vector2d mean2(const VectorField& w, const Grid& g) {
    return {quadrature(w.x, g) / M_PI, quadrature(w.y, g) / M_PI};
}

}  // namespace

TEST_CASE("jets of constant data on rigid rotation follow the reduced ODE") {
    Grid g = build_grid(24, 16);
    const double omega = 0.7;
    BackgroundJet b = rigid_rotation_background(omega)->at(0.0, g);
    // Reduced ODE x'' = -Omega^2 x + C x' on constants; C read off from the operator.
    Eigen::Matrix2d C;
    C.col(0) = mean2(apply_mult(b.omega[0], e1(g), b.metric, g), g);
    C.col(1) = mean2(apply_mult(b.omega[0], e2(g), b.metric, g), g);
    CHECK(C(0, 1) == doctest::Approx(2 * omega).epsilon(1e-10));
    CHECK(C(1, 0) == doctest::Approx(-2 * omega).epsilon(1e-10));

    auto jets = jet_recursion(e1(g), VectorField::zero(g.n_r, g.n_theta), {}, 2, b, g);
    REQUIRE(jets.size() == 5);
    std::vector<Eigen::Vector2d> x{{1.0, 0.0}, {0.0, 0.0}};
    for (int k = 0; k < 3; ++k) x.push_back(-omega * omega * x[size_t(k)] + C * x[size_t(k + 1)]);
    for (size_t s = 0; s < jets.size(); ++s) {
        VectorField expect = VectorField::constant(g.n_r, g.n_theta, x[s](0), x[s](1));
        CHECK(maxabs(jets[s] - expect) < 1e-9);
    }
}

TEST_CASE("zero data picks up the projected forcing") {
    Grid g = build_grid(24, 16);
    BackgroundJet b = rigid_rotation_background(1.0)->at(0.0, g);
    auto rng = seeded_rng(3, 0);
    VectorField F = random_vector_field(g, rng);
    VectorField zero = VectorField::zero(g.n_r, g.n_theta);
    auto jets = jet_recursion(zero, zero, {F}, 0, b, g);
    CHECK(maxabs(jets[2] - project(F, b.metric, g)) < 1e-10);
}

TEST_CASE("G_0 is the identity on divergence-free fields") {
    Grid g = build_grid(32, 32);
    BackgroundJet b = rigid_rotation_background(1.0)->at(0.0, g);
    auto rng = seeded_rng(11, 0);
    for (int trial = 0; trial < 3; ++trial) {
        VectorField W = random_divergence_free(g, b.metric, rng);
        CHECK(maxabs(project(W, b.metric, g) - W) < 1e-10 * (1.0 + maxabs(W)));
    }
}

TEST_CASE("series lift") {
    Grid g = build_grid(16, 16);
    BackgroundJet b = rigid_rotation_background(1.0)->at(0.0, g);
    VectorField zero = VectorField::zero(g.n_r, g.n_theta);
    SeriesLift s0 = assemble_series(jet_recursion(e1(g), zero, {}, 0, b, g), 0);
    for (double t : {0.0, 0.3, -0.5}) CHECK(maxabs(s0.value(t) - (1.0 - t * t / 2) * e1(g)) < 1e-10);
    CHECK(maxabs(s0.derivative(0.4, 1) - (-0.4) * e1(g)) < 1e-10);
    CHECK_THROWS_AS(assemble_series({zero}, 1), LiftError);
    CHECK_THROWS_AS(jet_recursion(zero, zero, {}, kDefaultMaxJet, b, g), LiftError);
}

TEST_CASE("lifted residual vanishes to the lift order at t = 0") {
    Grid g = build_grid(24, 16);
    auto bg = rigid_rotation_background(1.0);
    BackgroundJet b = bg->at(0.0, g);
    auto rng = seeded_rng(5, 0);
    VectorField W0 = random_divergence_free(g, b.metric, rng);
    VectorField W1 = random_divergence_free(g, b.metric, rng);
    VectorField F0 = random_vector_field(g, rng), F1 = random_vector_field(g, rng);
    auto F = [&](double t) { return F0 + t * F1; };
    const int r = 1;
    SeriesLift s = assemble_series(jet_recursion(W0, W1, {F0, F1}, r, b, g), r);
    auto residual = [&](double t) {
        BackgroundJet bt = bg->at(t, g);
        return apply_L1(s.value(t), s.derivative(t, 1), s.derivative(t, 2), bt, g) - project(F(t), bt.metric, g);
    };
    // Residual is O(t^(r+1)): halving t divides it by about 4.
    double e1n = maxabs(residual(0.02)), e2n = maxabs(residual(0.01));
    CHECK(maxabs(residual(0.0)) < 1e-9);
    CHECK(e1n / e2n > 3.5);
}
