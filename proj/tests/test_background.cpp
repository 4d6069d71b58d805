#include <cmath>
#include <cstdio>
#include <fstream>

#include <fmt/format.h>

#include "doctest.h"
#include "fblin/background.hpp"
#include "fblin/ops.hpp"
#include "test_helpers.hpp"

using namespace fblin;
using namespace fblin::test;

TEST_CASE("rigid rotation jets") {
    Grid g = build_grid(64, 64);
    auto bg = rigid_rotation_background(1.0);
    BackgroundJet b = bg->at(0.3, g);
    CHECK(b.max_jet == kDefaultMaxJet);
    CHECK(maxabs(b.omega[0].c - 2.0) == 0.0);
    for (int s = 1; s <= b.max_jet; ++s) {
        CHECK(maxabs(b.p[size_t(s)]) == 0.0);
        CHECK(maxabs(b.omega[size_t(s)].c) == 0.0);
        CHECK(maxabs(b.g[size_t(s)].xx) == 0.0);
    }
    // p(0) = 1/2 as r -> 0, p = 0 on r = 1.
    CHECK(b.p[0](0, 0) == doctest::Approx(0.5 * (1 - g.r(0) * g.r(0))));
    CHECK(trace(b.p[0], g).cwiseAbs().maxCoeff() < 1e-12);

    // Jacobian jets generate the same g and omega as the closed forms.
    BackgroundJet c = b;
    fill_from_jacobian(c, b.jacobian);
    CHECK(maxabs(c.omega[0].c - 2.0) < 1e-14);
    CHECK(maxabs(c.g[0].xx - 1.0) < 1e-14);
    for (int s = 1; s <= c.max_jet; ++s) CHECK(maxabs(c.omega[size_t(s)].c) < 1e-13);
}

TEST_CASE("validate_background: standard rotation pressure") {
    Grid g = build_grid(64, 64);
    BackgroundReport rep = validate_background(rigid_rotation_background(1.0)->at(0.0, g), g);
    CHECK(rep.c0 == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(rep.volume_residual < 1e-12);
    CHECK(rep.boundary_pressure < 1e-10);
    CHECK_FALSE(rep.has(BackgroundFailure::SignCondition));
    // p = (1 - r^2)/2 does not balance the centripetal acceleration: the
    // residual of D_t^2 x + grad p is 2 Omega^2 r, that of the Poisson
    // equation 4 Omega^2.
    CHECK(rep.euler_residual == doctest::Approx(2.0 * g.r(g.n_r - 1)).epsilon(1e-8));
    CHECK(rep.poisson_residual == doctest::Approx(4.0).epsilon(1e-8));
    CHECK(rep.has(BackgroundFailure::Euler));
}

TEST_CASE("validate_background: Euler-consistent pressure and failure kinds") {
    Grid g = build_grid(64, 64);
    BackgroundReport rep =
        validate_background(rigid_rotation_background(1.0, PressureConvention::EulerConsistent)->at(0.5, g), g);
    CHECK(rep.euler_residual < 1e-8);
    CHECK(rep.poisson_residual < 1e-8);
    CHECK(rep.has(BackgroundFailure::SignCondition));
    CHECK(rep.c0 == doctest::Approx(-1.0).epsilon(1e-10));

    BackgroundReport rest = validate_background(rigid_rotation_background(0.0)->at(0.0, g), g);
    CHECK(rest.has(BackgroundFailure::SignCondition));
    CHECK(rest.c0 == 0.0);
    CHECK(rest.euler_residual < 1e-12);

    BackgroundJet tampered = rigid_rotation_background(1.0)->at(0.0, g);
    tampered.metric.kappa *= 1.1;
    CHECK(validate_background(tampered, g).has(BackgroundFailure::Volume));
}

TEST_CASE("tabulated background reproduces rotation jets") {
    Grid g = build_grid(8, 8);
    auto bg = rigid_rotation_background(0.7);
    const char* path = "tabulated_test.csv";
    {
        std::ofstream out(path);
        out << "t,j,k,J11,J12,J21,J22,p\n";
        for (int i = 0; i < 9; ++i) {
            double t = 0.05 * i;
            BackgroundJet b = bg->at(t, g);
            for (int j = 0; j < 8; ++j)
                for (int k = 0; k < 8; ++k)
                    out << fmt::format("{},{},{},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", t, j, k,
                                       b.jacobian[0].a11(j, k), b.jacobian[0].a12(j, k), b.jacobian[0].a21(j, k),
                                       b.jacobian[0].a22(j, k), b.p[0](j, k));
        }
    }
    auto tab = load_tabulated_background(path, 8, 8);
    BackgroundJet a = tab->at(0.21, g), e = bg->at(0.21, g);
    CHECK(maxabs(a.omega[0].c - e.omega[0].c) < 1e-5);
    CHECK(maxabs(a.g[0].xx - 1.0) < 1e-5);
    CHECK(maxabs(a.g[1].xy) < 1e-4);
    CHECK(maxabs(a.p[0] - e.p[0]) < 1e-12);
    CHECK(maxabs(a.jacobian[1].a21 - e.jacobian[1].a21) < 1e-4);
    CHECK_THROWS_AS(load_tabulated_background(path, 16, 8), BackgroundError);
    std::remove(path);

    CHECK_THROWS_AS(load_tabulated_background("does-not-exist.csv", 8, 8), BackgroundError);
}
