#include <doctest.h>

#include <cmath>

#include "fblin/background.hpp"
#include "fblin/evolution.hpp"
#include "fblin/normal_ops.hpp"
#include "fblin/ops.hpp"
#include "fblin/projection.hpp"
#include "fblin/random_fields.hpp"
#include "ode_oracle.hpp"
#include "test_helpers.hpp"

using namespace fblin;
using namespace fblin::test;

namespace {

Eigen::Vector2d mean2(const VectorField& w, const Grid& g) {
    return {quadrature(w.x, g) / M_PI, quadrature(w.y, g) / M_PI};
}

Eigen::Vector4d constant_part(const State& s, const Grid& g) {
    Eigen::Vector4d y;
    y << mean2(s.W, g), mean2(s.Wdot, g);
    return y;
}

}  // namespace

TEST_CASE("rhs on rigid rotation") {
    Grid g = build_grid(32, 32);
    const double omega = 1.0;
    BackgroundJet b = rigid_rotation_background(omega)->at(0.0, g);
    EvolveConfig cfg;
    VectorField zero = VectorField::zero(g.n_r, g.n_theta);
    CHECK(maxabs(rhs(State{0, zero, zero}, nullptr, cfg, b, g)) == 0.0);
    CHECK(maxabs_interior(rhs(State{0, e1(g), zero}, nullptr, cfg, b, g) + e1(g), g, 0.9) < 1e-3);
    CHECK(maxabs(rhs(State{0, zero, e1(g)}, nullptr, cfg, b, g) + 2.0 * omega * e2(g)) < 1e-10);
}

TEST_CASE("zero data and zero forcing stay zero") {
    Grid g = build_grid(16, 16);
    auto bg = rigid_rotation_background(1.0);
    EvolveConfig cfg;
    cfg.T_final = 0.2;
    cfg.dt = 0.05;
    VectorField zero = VectorField::zero(g.n_r, g.n_theta);
    for (Scheme s : {Scheme::ImplicitMidpoint, Scheme::RK4}) {
        cfg.scheme = s;
        RunResult r = run(zero, zero, {}, cfg, *bg, g);
        CHECK(maxabs(r.final_state.W) == 0.0);
        CHECK(maxabs(r.final_state.Wdot) == 0.0);
        CHECK(r.steps == 4);
    }
}

TEST_CASE("constant data follow the reduced ODE") {
    Grid g = build_grid(24, 16);
    const double omega = 1.0;
    auto bg = rigid_rotation_background(omega);
    BackgroundJet b = bg->at(0.0, g);
    Eigen::Matrix2d C;
    C.col(0) = mean2(apply_mult(b.omega[0], e1(g), b.metric, g), g);
    C.col(1) = mean2(apply_mult(b.omega[0], e2(g), b.metric, g), g);
    VectorField zero = VectorField::zero(g.n_r, g.n_theta);
    Eigen::Vector4d exact = constant_subspace_solution(omega * omega, C, Eigen::Vector4d(1, 0, 0, 0), 1.0);

    EvolveConfig cfg;
    cfg.T_final = 1.0;
    std::vector<double> err;
    for (double dt : {0.04, 0.02, 0.01}) {
        cfg.dt = dt;
        RunResult r = run(e1(g), zero, {}, cfg, *bg, g);
        err.push_back((constant_part(r.final_state, g) - exact).norm() / exact.norm());
    }
    CHECK(err[2] < 1e-3);
    CHECK(std::log2(err[1] / err[2]) > 1.9);

    cfg.scheme = Scheme::RK4;
    cfg.dt = 0.02;
    RunResult r = run(e1(g), zero, {}, cfg, *bg, g);
    CHECK((constant_part(r.final_state, g) - exact).norm() / exact.norm() < 1e-3);
}

TEST_CASE("lifted and raw evolutions agree") {
    Grid g = build_grid(16, 16);
    auto bg = rigid_rotation_background(1.0);
    BackgroundJet b = bg->at(0.0, g);
    auto rng = seeded_rng(2, 0);
    VectorField W0 = random_divergence_free(g, b.metric, rng, 2);
    VectorField W1 = random_divergence_free(g, b.metric, rng, 2);
    EvolveConfig cfg;
    cfg.T_final = 0.5;
    cfg.dt = 0.01;
    cfg.lift_order = -1;
    RunResult raw = run(W0, W1, {}, cfg, *bg, g);
    cfg.lift_order = 1;
    RunResult lifted = run(W0, W1, {}, cfg, *bg, g);
    CHECK(maxabs(raw.final_state.W - lifted.final_state.W) < 1e-3 * maxabs(W0));
    CHECK(lifted.max_div_defect < 1e-8);
    CHECK(maxabs(lifted.states.front().W - W0) < 1e-12);
}

TEST_CASE("explicit step above the stability limit is rejected") {
    Grid g = build_grid(16, 16);
    auto bg = rigid_rotation_background(1.0);
    EvolveConfig cfg;
    cfg.scheme = Scheme::RK4;
    cfg.dt = 10.0;
    VectorField zero = VectorField::zero(g.n_r, g.n_theta);
    CHECK_THROWS_AS(run(e1(g), zero, {}, cfg, *bg, g), EvolveError);
    cfg.dt = -1;
    CHECK_THROWS_AS(run(e1(g), zero, {}, cfg, *bg, g), std::invalid_argument);
}

TEST_CASE("midpoint stage iteration failure names the step") {
    Grid g = build_grid(16, 16);
    auto bg = rigid_rotation_background(1.0);
    EvolveConfig cfg;
    cfg.dt = 1.0;  // far beyond the contraction range of the fixed point
    cfg.T_final = 2.0;
    cfg.lift_order = -1;
    VectorField zero = VectorField::zero(g.n_r, g.n_theta);
    auto rng = seeded_rng(4, 0);
    VectorField W0 = random_divergence_free(g, bg->at(0, g).metric, rng);
    try {
        run(W0, zero, {}, cfg, *bg, g);
        FAIL("expected EvolveError");
    } catch (const EvolveError& e) {
        CHECK(e.step() == 1);
    }
}
