#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fblin/normal_ops.hpp"
#include "fblin/ops.hpp"
#include "fblin/projection.hpp"
#include "fblin/random_fields.hpp"
#include "test_helpers.hpp"

using namespace fblin;
using namespace fblin::test;

namespace {
const double pi = std::numbers::pi;
}

TEST_CASE("normal operator on rigid rotation") {
    Grid g = build_grid(64, 64);
    BackgroundJet b = rigid_rotation_background(1.0)->at(0.0, g);
    const Metric& m = b.metric;
    VectorField Ae1 = apply_A(e1(g), b, g);
    CHECK(maxabs(Ae1 - e1(g)) < 1e-3);
    CHECK(maxabs(apply_A(rotation(g), b, g)) < 1e-3);
    CHECK(inner_product(e1(g), Ae1, m, g) == doctest::Approx(pi).epsilon(2e-3 / pi));
    CHECK(af_form(e1(g), e1(g), b.p[0], m, g) == doctest::Approx(pi).epsilon(2e-3 / pi));
    CHECK(boundary_quadratic_form(e1(g), e1(g), b.p[0], m, g) == doctest::Approx(pi).epsilon(1e-3));
    CHECK(std::abs(boundary_quadratic_form(rotation(g), e1(g), b.p[0], m, g)) < 1e-6);
    CHECK(std::abs(boundary_quadratic_form(e1(g), e2(g), b.p[0], m, g)) < 1e-6);
    CHECK(maxabs(apply_Af(ScalarField::Zero(64, 64), e1(g), m, g)) == 0.0);
    // f must vanish on the boundary.
    CHECK_THROWS_AS(apply_Af(ScalarField::Ones(64, 64), e1(g), m, g), OperatorError);
}

TEST_CASE("A is symmetric, nonnegative and matches its boundary form") {
    Grid g = build_grid(32, 32);
    BackgroundJet b = rigid_rotation_background(1.0)->at(0.0, g);
    const Metric& m = b.metric;
    auto rng = seeded_rng(3);
    for (int i = 0; i < 4; ++i) {
        VectorField U = random_divergence_free(g, m, rng), W = random_divergence_free(g, m, rng);
        double nu = norm(U, m, g), nw = norm(W, m, g);
        double uaw = inner_product(U, apply_A(W, b, g), m, g);
        double wau = inner_product(W, apply_A(U, b, g), m, g);
        CHECK(std::abs(uaw - wau) <= 1e-6 * nu * nw);
        CHECK(uaw == doctest::Approx(af_form(U, W, b.p[0], m, g)).epsilon(1e-8));
        CHECK(inner_product(W, apply_A(W, b, g), m, g) >= -1e-6 * nw * nw);
        double bq = boundary_quadratic_form(U, W, b.p[0], m, g);
        CHECK(std::abs(bq - uaw) < 5e-2 * nu * nw);
    }
}

TEST_CASE("M_alpha and C on rigid rotation") {
    Grid g = build_grid(32, 32);
    BackgroundJet b = rigid_rotation_background(1.0)->at(0.0, g);
    VectorField Ce1 = apply_mult(b.omega[0], e1(g), b.metric, g);
    CHECK(maxabs(Ce1 - (-2.0) * e2(g)) < 1e-10);
    CHECK(maxabs(apply_mult(TwoForm::zero(32, 32), e1(g), b.metric, g)) == 0.0);
    auto rng = seeded_rng(5);
    VectorField W = random_divergence_free(g, b.metric, rng);
    ScalarField a = random_band_limited(g, rng);
    CHECK(norm(apply_mult(TwoForm(a), W, b.metric, g), b.metric, g) <= a.abs().maxCoeff() * norm(W, b.metric, g) * (1 + 1e-8));
    // C is antisymmetric.
    CHECK(std::abs(inner_product(W, apply_mult(b.omega[0], W, b.metric, g), b.metric, g)) < 1e-10 * norm(W, b.metric, g) * norm(W, b.metric, g));
}

TEST_CASE("smoothed normal operator") {
    Grid g = build_grid(64, 32);
    BackgroundJet b = rigid_rotation_background(1.0)->at(0.0, g);
    const Metric& m = b.metric;
    RegularizationParams reg{0.1, 0.5};
    auto rng = seeded_rng(11);
    VectorField U = random_divergence_free(g, m, rng), W = random_divergence_free(g, m, rng);
    double uaw = inner_product(U, apply_Af_eps(b.p[0], W, reg, m, g), m, g);
    double wau = inner_product(W, apply_Af_eps(b.p[0], U, reg, m, g), m, g);
    double scale = norm(U, m, g) * norm(W, m, g);
    CHECK(std::abs(uaw - wau) <= 1e-8 * scale);
    CHECK(uaw == doctest::Approx(af_eps_form(U, W, b.p[0], reg, m, g)).epsilon(1e-8));
    CHECK(af_eps_form(W, W, b.p[0], reg, m, g) >= 0.0);

    // Curl of the pre-projection one-form vanishes away from the collar.
    TwoForm c = curl(af_eps_preprojection(b.p[0], e1(g), reg, m, g), g);
    ScalarField d = boundary_distance(g);
    CHECK(((d >= reg.eps).cast<double>() * c.c.abs()).maxCoeff() <= 1e-10);

    // Fields supported where d >= eps are annihilated.
    VectorFamily fam = build_families(g);
    CHECK(maxabs(apply_Af_eps(b.p[0], fam.s1[0], reg, m, g)) < 1e-12);

    CHECK_THROWS_AS(apply_Af_eps(b.p[0], W, RegularizationParams{0.3, 0.5}, m, g), OperatorError);
    CHECK_THROWS_AS(apply_Af_eps(b.p[0], W, RegularizationParams{0.0, 0.5}, m, g), OperatorError);
}

TEST_CASE("power iteration finds the top of the spectrum of A") {
    Grid g = build_grid(16, 16);
    BackgroundJet b = rigid_rotation_background(1.0)->at(0.0, g);
    double lam = power_iteration_lambda_max([&](const VectorField& x) { return apply_A(x, b, g); }, b.metric, g);
    // A e1 = e1 so the top eigenvalue is at least one; the discrete A is
    // bounded by the inverse cell width times the boundary slope.
    CHECK(lam >= 1.0);
    CHECK(lam < 10.0 * g.n_r);
}

TEST_CASE("commutator residuals") {
    Grid g = build_grid(64, 64);
    BackgroundJet b = rigid_rotation_background(1.0)->at(0.0, g);
    VectorFamily fam = build_families(g);
    auto rng = seeded_rng(2);
    VectorField W = random_divergence_free(g, b.metric, rng);
    Member S0{MemberKind::S0, 0};
    double nw = norm(W, b.metric, g);
    // Everything commutes with the spectral angular derivative, so only
    // aliasing of the random field's top modes remains.
    CHECK(commutator_residual(fam, S0, b.p[0], W, std::nullopt, b.metric, g) < 1e-9 * nw);
    ScalarField f = (1.0 - g.R * g.R) * (1.0 + y1(g) / 2.0) / 2.0;
    CHECK(commutator_residual(fam, S0, f, W, std::nullopt, b.metric, g) < 1e-9 * nw);
    RegularizationParams reg{0.1, 0.5};
    double e64 = commutator_residual(fam, Member{MemberKind::S1, 1}, b.p[0], W, reg, b.metric, g);
    Grid h = build_grid(128, 128);
    VectorFamily fh = build_families(h);
    BackgroundJet bh = rigid_rotation_background(1.0)->at(0.0, h);
    auto rh = seeded_rng(2);
    VectorField Wh = random_divergence_free(h, bh.metric, rh);
    double e128 = commutator_residual(fh, Member{MemberKind::S1, 1}, bh.p[0], Wh, reg, bh.metric, h);
    CHECK(e128 < e64 / 4.0);
    CHECK_THROWS_AS(commutator_residual(fam, Member{MemberKind::R, 0}, f, W, std::nullopt, b.metric, g), OperatorError);
}
