#include <doctest.h>

#include "config.hpp"

using namespace fblin;
using namespace fblin::cli;

namespace {

std::string key_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.key();
    }
    return "";
}

}  // namespace

TEST_CASE("config: defaults and overrides") {
    Config d = parse_config("");
    CHECK(d.background == "rigid_rotation");
    CHECK(d.n_r == 64);
    CHECK(d.resolutions == std::vector<int>{32, 64, 128});
    CHECK(d.evolve.scheme == Scheme::ImplicitMidpoint);

    Config c = parse_config(R"(
; comment
[background]
Omega = 0.5
pressure = euler_consistent
[grid]
n_r = 48
n_theta = 32
resolutions = 16, 32, 64, 128
[evolve]
scheme = rk4
mode = regularized
eps = 0.05
T = 2
lift_order = 1
[diagnostics]
eps_values = 0.1, 0.05
time_study = true
)");
    CHECK(c.omega == 0.5);
    CHECK(c.pressure == PressureConvention::EulerConsistent);
    CHECK(c.n_r == 48);
    CHECK(c.n_theta == 32);
    CHECK(c.resolutions.size() == 4);
    CHECK(c.evolve.scheme == Scheme::RK4);
    CHECK(c.evolve.mode == OperatorMode::Regularized);
    CHECK(c.evolve.reg.eps == 0.05);
    CHECK(c.evolve.T_final == 2.0);
    CHECK(c.evolve.lift_order == 1);
    CHECK(c.eps_values == std::vector<double>{0.1, 0.05});
    CHECK(c.time_study);
    CHECK(c.echo.at("background.omega") == "0.5");
}

TEST_CASE("config: errors name the key") {
    CHECK(key_of("[evolve]\neps = 0.3\nd0 = 0.5\n") == "evolve.eps");
    CHECK(key_of("[grid]\nn_rr = 3\n") == "grid.n_rr");
    CHECK(key_of("[solver]\ntol = 1\n") == "solver.tol");
    CHECK(key_of("[grid]\nn_r = 32\nn_r = 64\n") == "grid.n_r");
    CHECK(key_of("[grid]\nn_r = many\n") == "grid.n_r");
    CHECK(key_of("[grid]\nn_r = 4\n") == "grid.n_r");
    CHECK(key_of("[grid]\nn_theta = 33\n") == "grid.n_theta");
    CHECK(key_of("[evolve]\nscheme = euler\n") == "evolve.scheme");
    CHECK(key_of("[evolve]\nlift_order = 9\n") == "evolve.lift_order");
    CHECK(key_of("[diagnostics]\nfault = everything\n") == "diagnostics.fault");
    CHECK(key_of("n_r = 32\n") == "n_r");
    CHECK_THROWS_AS(load_config("/nonexistent/config.ini"), ConfigError);
}
