#include "fblin/ops.hpp"

#include <cmath>
#include <vector>

#include <fmt/format.h>

namespace fblin {

namespace {

ScalarField radial_apply(const RowSparse& D, const ScalarField& f) {
    return (D * f.matrix()).array();
}

}  // namespace

Metric Metric::identity(const Grid& grid) {
    Metric m;
    m.g = SymTensor::identity(grid.n_r, grid.n_theta);
    m.g_inv = m.g;
    m.kappa = ScalarField::Ones(grid.n_r, grid.n_theta);
    m.flat = true;
    return m;
}

void require_spd(const SymTensor& h, const char* what) {
    ScalarField d = det(h);
    ScalarField tr = h.xx + h.yy;
    if (!(d > 0.0).all() || !(tr > 0.0).all() || !d.allFinite())
        throw GridError(fmt::format("{} is not positive definite at every node", what));
}

Metric Metric::from(SymTensor g, ScalarField kappa) {
    require_spd(g, "metric");
    Metric m;
    m.g_inv = inverse(g);
    constexpr double tol = 1e-13;
    m.flat = ((g.xx - 1.0).abs() <= tol).all() && (g.xy.abs() <= tol).all() && ((g.yy - 1.0).abs() <= tol).all() &&
             ((kappa - 1.0).abs() <= tol).all();
    m.g = std::move(g);
    m.kappa = std::move(kappa);
    return m;
}

ScalarField d_theta(const ScalarField& f, const Grid& grid) {
    grid.check(f, "d_theta");
    return (f.matrix() * grid.d_theta_t()).array();
}

ScalarField d_r(const ScalarField& f, const Grid& grid) {
    grid.check(f, "d_r");
    return radial_apply(grid.radial().dff, f);
}

Polar to_polar(const ScalarField& ax, const ScalarField& ay, const Grid& grid) {
    grid.check(ax, "to_polar");
    grid.check(ay, "to_polar");
    return {grid.cos_t * ax + grid.sin_t * ay, -grid.sin_t * ax + grid.cos_t * ay};
}

VectorField vector_from_polar(const ScalarField& rad, const ScalarField& ang, const Grid& grid) {
    return {grid.cos_t * rad - grid.sin_t * ang, grid.sin_t * rad + grid.cos_t * ang};
}

OneForm form_from_polar(const ScalarField& rad, const ScalarField& ang, const Grid& grid) {
    return {grid.cos_t * rad - grid.sin_t * ang, grid.sin_t * rad + grid.cos_t * ang};
}

ScalarField d_x(const ScalarField& f, const Grid& grid) {
    return grid.cos_t * d_r(f, grid) - grid.sin_t * d_theta(f, grid) / grid.R;
}

ScalarField d_y(const ScalarField& f, const Grid& grid) {
    return grid.sin_t * d_r(f, grid) + grid.cos_t * d_theta(f, grid) / grid.R;
}

OneForm grad(const ScalarField& q, const Grid& grid) {
    grid.check(q, "grad");
    return form_from_polar(radial_apply(grid.radial().dff, q), d_theta(q, grid) / grid.R, grid);
}

OneForm grad_dirichlet(const ScalarField& q, const Grid& grid) {
    grid.check(q, "grad_dirichlet");
    return form_from_polar(radial_apply(grid.radial().dfz, q), d_theta(q, grid) / grid.R, grid);
}

ScalarField div(const VectorField& w, const Grid& grid) {
    Polar p = to_polar(w, grid);
    return (radial_apply(grid.radial().dzf, grid.R * p.rad) + d_theta(p.ang, grid)) / grid.R;
}

ScalarField div(const VectorField& w, const ScalarField& kappa, const Grid& grid) {
    grid.check(kappa, "div");
    VectorField kw{kappa * w.x, kappa * w.y};
    return div(kw, grid) / kappa;
}

TwoForm curl(const OneForm& w, const Grid& grid) {
    Polar p = to_polar(w, grid);
    return TwoForm((radial_apply(grid.radial().dff, grid.R * p.ang) - d_theta(p.rad, grid)) / grid.R);
}

OneForm lower(const VectorField& w, const SymTensor& g) {
    require_spd(g, "lower: metric");
    return lower_pointwise(g, w);
}

VectorField raise(const OneForm& w, const SymTensor& g_inv) {
    require_spd(g_inv, "raise: inverse metric");
    return raise_pointwise(g_inv, w);
}

double pairwise_sum(const double* v, size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

double quadrature(const ScalarField& f, const Grid& grid) {
    grid.check(f, "quadrature");
    std::vector<double> buf(static_cast<size_t>(f.size()));
    size_t i = 0;
    for (int j = 0; j < grid.n_r; ++j)
        for (int k = 0; k < grid.n_theta; ++k) buf[i++] = grid.weights(j, k) * f(j, k);
    return pairwise_sum(buf.data(), buf.size());
}

double inner_product(const VectorField& a, const VectorField& b, const SymTensor& g, const Grid& grid) {
    return quadrature(g.xx * a.x * b.x + g.xy * (a.x * b.y + a.y * b.x) + g.yy * a.y * b.y, grid);
}

double inner_product(const VectorField& a, const VectorField& b, const Metric& m, const Grid& grid) {
    if (m.flat) return quadrature(a.x * b.x + a.y * b.y, grid);
    return quadrature(m.kappa * (m.g.xx * a.x * b.x + m.g.xy * (a.x * b.y + a.y * b.x) + m.g.yy * a.y * b.y), grid);
}

double norm(const VectorField& a, const Metric& m, const Grid& grid) {
    return std::sqrt(std::max(0.0, inner_product(a, a, m, grid)));
}

double norm(const ScalarField& f, const Grid& grid) { return std::sqrt(quadrature(f * f, grid)); }
double norm(const OneForm& a, const Grid& grid) { return std::sqrt(quadrature(a.x * a.x + a.y * a.y, grid)); }
double norm(const TwoForm& a, const Grid& grid) { return norm(a.c, grid); }

Eigen::RowVectorXd trace(const ScalarField& f, const Grid& grid) {
    grid.check(f, "trace");
    if (grid.n_r < 3) return f.row(grid.n_r - 1).matrix();
    const int n = grid.n_r;
    return (15.0 * f.row(n - 1) - 10.0 * f.row(n - 2) + 3.0 * f.row(n - 3)).matrix() / 8.0;
}

double smoothstep(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    return s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double smoothstep_prime(double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    return 30.0 * s * s * (1.0 - s) * (1.0 - s);
}

// rho' = 1 - smoothstep(2(d - 1/4)) so rho rises with slope one, flattens
// over [1/4, 3/4] and reaches exactly 1/2 there (the smoothstep averages 1/2).
double rho_of_d(double d) {
    if (d <= 0.25) return d;
    if (d >= 0.75) return 0.5;
    double s = 2.0 * (d - 0.25);
    double integral = s * s * s * s * (2.5 - 3.0 * s + s * s);  // int_0^s smoothstep
    return d - 0.5 * integral;
}

double rho_prime_of_d(double d) { return 1.0 - smoothstep(2.0 * (d - 0.25)); }

double chi(double s) { return smoothstep(2.0 * (s - 0.25)); }
double chi_prime(double s) { return 2.0 * smoothstep_prime(2.0 * (s - 0.25)); }

Cutoffs cutoff_profiles(const ScalarField& d, double eps, double d0) {
    if (!(eps > 0.0) || eps > d0 / 2.0 + 1e-15)
        throw std::invalid_argument(fmt::format("eps = {} outside (0, d0/2] with d0 = {}", eps, d0));
    Cutoffs c;
    c.rho = d.unaryExpr([](double v) { return rho_of_d(v); });
    c.rho_prime = d.unaryExpr([](double v) { return rho_prime_of_d(v); });
    c.chi_eps = c.rho.unaryExpr([eps](double v) { return chi(v / eps); });
    c.chi_eps_prime = c.rho.unaryExpr([eps](double v) { return chi_prime(v / eps) / eps; });
    return c;
}

ScalarField boundary_distance(const Grid& grid) { return 1.0 - grid.R; }

}  // namespace fblin
