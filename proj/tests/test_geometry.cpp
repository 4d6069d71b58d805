#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fblin/elliptic.hpp"
#include "fblin/ops.hpp"

using namespace fblin;

namespace {

ScalarField sample(const Grid& g, double (*f)(double, double)) {
    ScalarField out(g.n_r, g.n_theta);
    for (int j = 0; j < g.n_r; ++j)
        for (int k = 0; k < g.n_theta; ++k) out(j, k) = f(g.r(j) * std::cos(g.theta(k)), g.r(j) * std::sin(g.theta(k)));
    return out;
}

double maxabs(const ScalarField& f) { return f.abs().maxCoeff(); }

}  // namespace

TEST_CASE("build_grid layout") {
    Grid g = build_grid(8, 8);
    CHECK(g.r(0) == doctest::Approx(1.0 / 16));
    CHECK(g.r(7) == doctest::Approx(15.0 / 16));
    CHECK(g.theta(1) == doctest::Approx(std::numbers::pi / 4));
    CHECK(g.has_operators());

    CHECK_THROWS_AS(build_grid(8, 7), GridError);
    CHECK_THROWS_AS(build_grid(0, 8), GridError);
    CHECK_THROWS_AS(build_grid(8, 2), GridError);

    Grid tiny = build_grid(4, 8);
    CHECK_FALSE(tiny.has_operators());
    CHECK_THROWS_AS(tiny.radial(), GridError);
}

TEST_CASE("quadrature integrates the unit disk area and low-degree polynomials") {
    for (int n : {8, 16, 64}) {
        Grid g = build_grid(n, 2 * n);
        ScalarField one = ScalarField::Ones(n, 2 * n);
        CHECK(quadrature(one, g) == doctest::Approx(std::numbers::pi).epsilon(1e-13));
        // int r^2 over the disk = pi/2
        CHECK(quadrature(g.R * g.R, g) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-13));
    }
}

TEST_CASE("radial operators: summation-by-parts identity and polynomial exactness") {
    Grid g = build_grid(24, 8);
    const RadialOps& R = g.radial();
    Eigen::MatrixXd H = (g.sigma * g.dr).asDiagonal();
    Eigen::MatrixXd fz(R.dfz), zf(R.dzf), ff(R.dff);
    CHECK((H * fz + zf.transpose() * H).cwiseAbs().maxCoeff() < 1e-13);
    // dff is exact on quadratics at every node.
    Eigen::VectorXd q = g.r.array().square() - 0.3 * g.r.array() + 0.1;
    Eigen::VectorXd dq = 2.0 * g.r.array() - 0.3;
    CHECK((ff * q - dq).cwiseAbs().maxCoeff() < 1e-11);
    // Extrapolation is exact for quadratics.
    CHECK(R.t_right.dot(q) == doctest::Approx(0.8).epsilon(1e-13));
    CHECK(R.t_left.dot(q) == doctest::Approx(0.1).epsilon(1e-13));
}

TEST_CASE("spectral angular derivative and Cartesian derivatives") {
    Grid g = build_grid(16, 16);
    ScalarField f = sample(g, [](double x, double y) { return x * x - x * y + 0.3 * y; });
    ScalarField fx = sample(g, [](double x, double y) { return 2 * x - y; });
    ScalarField fy = sample(g, [](double x, double) { return 0.3 - x; });
    CHECK(maxabs(d_x(f, g) - fx) < 1e-10);
    CHECK(maxabs(d_y(f, g) - fy) < 1e-10);
}

TEST_CASE("discrete curl of a gradient vanishes and div is the adjoint of the Dirichlet gradient") {
    Grid g = build_grid(16, 12);
    ScalarField q = sample(g, [](double x, double y) { return std::sin(2 * x + y) + x * y * y; });
    CHECK(norm(curl(grad(q, g), g), g) < 1e-12);

    ScalarField p = sample(g, [](double x, double y) { return std::cos(x - y) * (1 - x * x - y * y); });
    VectorField W{sample(g, [](double x, double y) { return std::exp(x) * y; }),
                  sample(g, [](double x, double y) { return x - y * y; })};
    OneForm dp = grad_dirichlet(p, g);
    double lhs = quadrature(dp.x * W.x + dp.y * W.y, g);
    double rhs = -quadrature(p * div(W, g), g);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("flat Dirichlet solve against closed forms") {
    Grid g = build_grid(64, 64);
    Metric m = Metric::identity(g);
    // Delta q = 1 with q = (r^2 - 1)/4.
    ScalarField q1 = solve_dirichlet(ScalarField::Ones(64, 64), m, g);
    CHECK(maxabs(q1 - (g.R * g.R - 1.0) / 4.0) < 1e-11);
    // Delta q = r cos(theta) with q = (r^3 - r) cos(theta) / 8.
    ScalarField q2 = solve_dirichlet(g.R * g.cos_t, m, g);
    ScalarField exact = (g.R * g.R * g.R - g.R) * g.cos_t / 8.0;
    CHECK(maxabs(q2 - exact) < 2e-6);
    CHECK(maxabs(apply_laplacian(q2, m, g) - g.R * g.cos_t) < 1e-10);
}

TEST_CASE("general-metric solve reproduces the flat solve for a constant rescaling") {
    Grid g = build_grid(24, 16);
    ScalarField one = ScalarField::Ones(24, 16);
    // g = 2 I, kappa = 2: L_g q = (1/2) Delta q.
    Metric m = Metric::from(SymTensor{2.0 * one, 0.0 * one, 2.0 * one}, 2.0 * one);
    CHECK_FALSE(m.flat);
    ScalarField rhs = g.R * g.sin_t + 0.3;
    SolveStats st;
    ScalarField q = solve_dirichlet(rhs, m, g, 1e-10, &st);
    ScalarField qf = solve_dirichlet(2.0 * rhs, Metric::identity(g), g);
    CHECK(maxabs(q - qf) < 1e-9);
    CHECK(st.residual <= 1e-10);
}

TEST_CASE("non-SPD metric is rejected") {
    Grid g = build_grid(8, 8);
    ScalarField one = ScalarField::Ones(8, 8);
    CHECK_THROWS_AS(Metric::from(SymTensor{one, 2.0 * one, one}, one), GridError);
}

TEST_CASE("cutoff profiles") {
    CHECK(rho_of_d(0.1) == doctest::Approx(0.1));
    CHECK(rho_of_d(0.75) == doctest::Approx(0.5));
    CHECK(rho_of_d(0.7499999) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(chi(0.2) == 0.0);
    CHECK(chi(0.8) == 1.0);
    // chi' integrates to one.
    double s = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) s += chi_prime((i + 0.5) / n) / n;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-8));
    Grid g = build_grid(8, 8);
    CHECK_THROWS(cutoff_profiles(boundary_distance(g), 0.3));
    CHECK_THROWS(cutoff_profiles(boundary_distance(g), 0.0));
    CHECK_NOTHROW(cutoff_profiles(boundary_distance(g), 0.25));
}
