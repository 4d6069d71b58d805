#include "fblin/normal_ops.hpp"

#include <array>
#include <cmath>

#include <fmt/format.h>

#include "fblin/ops.hpp"
#include "fblin/projection.hpp"

namespace fblin {

void RegularizationParams::check() const {
    if (!(eps > 0.0) || eps > d0 / 2.0 + 1e-15)
        throw OperatorError(fmt::format("eps = {} outside (0, d0/2] with d0 = {}", eps, d0));
}

namespace {

// Lagrange weights on the last three nodes plus r = 1 (where the value is zero).
std::array<double, 3> slope_weights(const Grid& grid) {
    const int n = grid.n_r;
    double x[4] = {grid.r(n - 3), grid.r(n - 2), grid.r(n - 1), 1.0};
    std::array<double, 3> w{};
    for (int i = 0; i < 3; ++i) {
        double v = 1.0 / (x[i] - x[3]);
        for (int k = 0; k < 3; ++k)
            if (k != i) v *= (x[3] - x[k]) / (x[i] - x[k]);
        w[size_t(i)] = v;
    }
    return w;
}

Eigen::RowVectorXd polar_radial_trace_weights(const Grid& grid) { return grid.radial().t_right.transpose(); }

}  // namespace

Eigen::RowVectorXd boundary_slope(const ScalarField& f, const Grid& grid) {
    grid.check(f, "boundary_slope");
    grid.require_operators("boundary_slope");
    auto w = slope_weights(grid);
    const int n = grid.n_r;
    return (w[0] * f.row(n - 3) + w[1] * f.row(n - 2) + w[2] * f.row(n - 1)).matrix();
}

void require_vanishing_trace(const ScalarField& f, const Grid& grid) {
    grid.check(f, "require_vanishing_trace");
    const int n = grid.n_r;
    if (n < 4) return;
    double x[4] = {grid.r(n - 4), grid.r(n - 3), grid.r(n - 2), grid.r(n - 1)};
    Eigen::RowVectorXd tr = Eigen::RowVectorXd::Zero(grid.n_theta);
    for (int i = 0; i < 4; ++i) {
        double l = 1.0;
        for (int k = 0; k < 4; ++k)
            if (k != i) l *= (1.0 - x[k]) / (x[i] - x[k]);
        tr += l * f.row(n - 4 + i).matrix();
    }
    double tol = 1e-8 + std::pow(grid.dr, 3) * f.abs().maxCoeff();
    double got = tr.cwiseAbs().maxCoeff();
    if (got > tol)
        throw OperatorError(fmt::format("f must vanish on the boundary: trace {:.3e} exceeds {:.3e}", got, tol));
}

Eigen::RowVectorXd normal_trace(const VectorField& W, const Metric& m, const Grid& grid) {
    Polar p = to_polar(W, grid);
    ScalarField v = m.flat ? ScalarField(grid.R * p.rad) : ScalarField(m.kappa * grid.R * p.rad);
    return polar_radial_trace_weights(grid) * v.matrix();
}

namespace {

// The one-form dr scaled by tR_j / (sigma_j dr) * amp(theta): the adjoint of
// the trace in the quadrature.
OneForm trace_adjoint(const Eigen::RowVectorXd& amp, const Grid& grid) {
    const Eigen::VectorXd& tR = grid.radial().t_right;
    ScalarField rad(grid.n_r, grid.n_theta);
    for (int j = 0; j < grid.n_r; ++j) rad.row(j) = (tR(j) / (grid.sigma(j) * grid.dr)) * amp.array();
    return {grid.cos_t * rad, grid.sin_t * rad};
}

}  // namespace

OneForm af_preprojection(const ScalarField& f, const VectorField& W, const Metric& m, const Grid& grid) {
    require_vanishing_trace(f, grid);
    Eigen::RowVectorXd amp = boundary_slope(f, grid).cwiseProduct(normal_trace(W, m, grid));
    OneForm u = trace_adjoint(amp, grid);
    u *= -1.0;
    return u;
}

VectorField apply_Af(const ScalarField& f, const VectorField& W, const Metric& m, const Grid& grid) {
    return project_form(af_preprojection(f, W, m, grid), m, grid);
}

VectorField apply_A(const VectorField& W, const BackgroundJet& b, const Grid& grid) {
    return apply_Af(b.p.at(0), W, b.metric, grid);
}

double af_form(const VectorField& U, const VectorField& W, const ScalarField& f, const Metric& m, const Grid& grid) {
    Eigen::RowVectorXd a = boundary_slope(f, grid);
    Eigen::RowVectorXd tu = normal_trace(U, m, grid), tw = normal_trace(W, m, grid);
    Eigen::RowVectorXd terms = (a.array() * tu.array() * tw.array()).matrix();
    return -grid.dtheta * pairwise_sum(terms.data(), size_t(terms.size()));
}

double boundary_quadratic_form(const VectorField& U, const VectorField& W, const ScalarField& f, const Metric& m,
                               const Grid& grid) {
    grid.require_operators("boundary_quadratic_form");
    Eigen::RowVectorXd un = trace(to_polar(U, grid).rad, grid);
    Eigen::RowVectorXd wn = trace(to_polar(W, grid).rad, grid);
    Eigen::RowVectorXd dnf = normal_derivative(f, m, grid);
    Eigen::RowVectorXd k = trace(m.kappa, grid);
    Eigen::RowVectorXd terms = (-dnf.array() * un.array() * wn.array() * k.array()).matrix();
    return grid.dtheta * pairwise_sum(terms.data(), size_t(terms.size()));
}

namespace {

struct Collar {
    ScalarField weight;  // chi'_eps(rho) / rho
    OneForm drho;        // d rho = -rho'(d) (cos, sin)
};

Collar collar(const RegularizationParams& reg, const Grid& grid) {
    reg.check();
    Cutoffs c = cutoff_profiles(boundary_distance(grid), reg.eps, reg.d0);
    return {c.chi_eps_prime / c.rho, {-c.rho_prime * grid.cos_t, -c.rho_prime * grid.sin_t}};
}

ScalarField along(const OneForm& w, const VectorField& W) { return w.x * W.x + w.y * W.y; }

}  // namespace

OneForm af_eps_preprojection(const ScalarField& f, const VectorField& W, const RegularizationParams& reg,
                             const Metric& m, const Grid& grid) {
    grid.check(f, "apply_Af_eps");
    (void)m;
    Collar c = collar(reg, grid);
    ScalarField coef = c.weight * f * along(c.drho, W);
    return {coef * c.drho.x, coef * c.drho.y};
}

VectorField apply_Af_eps(const ScalarField& f, const VectorField& W, const RegularizationParams& reg, const Metric& m,
                         const Grid& grid) {
    return project_form(af_eps_preprojection(f, W, reg, m, grid), m, grid);
}

double af_eps_form(const VectorField& U, const VectorField& W, const ScalarField& f, const RegularizationParams& reg,
                   const Metric& m, const Grid& grid) {
    Collar c = collar(reg, grid);
    ScalarField integrand = c.weight * f * along(c.drho, U) * along(c.drho, W);
    if (!m.flat) integrand *= m.kappa;
    return quadrature(integrand, grid);
}

VectorField apply_mult(const TwoForm& alpha, const VectorField& W, const Metric& m, const Grid& grid) {
    return project_form(contract(alpha, W), m, grid);
}

VectorField apply_mult(const SymTensor& alpha, const VectorField& W, const Metric& m, const Grid& grid) {
    return project_form(lower_pointwise(alpha, W), m, grid);
}

double power_iteration_lambda_max(const std::function<VectorField(const VectorField&)>& op, const Metric& m,
                                  const Grid& grid, int steps) {
    // Smooth seed with a nonzero normal trace in every low Fourier mode.
    ScalarField y1 = grid.R * grid.cos_t, y2 = grid.R * grid.sin_t;
    VectorField x = project({1.0 + 0.3 * y2 + 0.2 * y1 * y1 + (3.0 * y1).sin(), 0.5 - 0.4 * y1 + (2.0 * y2).cos() * y1},
                            m, grid);
    double lambda = 0.0;
    for (int i = 0; i < steps; ++i) {
        double nx = norm(x, m, grid);
        if (nx == 0.0) return 0.0;
        x *= 1.0 / nx;
        VectorField y = op(x);
        lambda = inner_product(x, y, m, grid);
        x = std::move(y);
    }
    return lambda;
}

double commutator_residual(const VectorFamily& fam, Member T, const ScalarField& f, const VectorField& W,
                           const std::optional<RegularizationParams>& reg, const Metric& m, const Grid& grid) {
    if (!T.tangential() || !T.spatial())
        throw OperatorError(fmt::format("commutator_residual needs a tangential spatial field, got {}", T.label()));
    auto A = [&](const ScalarField& ff, const VectorField& V) {
        return reg ? apply_Af_eps(ff, V, *reg, m, grid) : apply_Af(ff, V, m, grid);
    };
    VectorField AW = A(f, W);
    OneForm low = m.flat ? OneForm{AW.x, AW.y} : lower_pointwise(m.g, AW);
    VectorField lhs = project_form(lie_derive(fam, T, low, grid), m, grid);
    VectorField rhs = A(f, lie_derive(fam, T, W, grid)) + A(lie_derive(fam, T, f, grid), W);
    return norm(lhs - rhs, m, grid);
}

}  // namespace fblin
