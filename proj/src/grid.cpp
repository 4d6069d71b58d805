#include "fblin/grid.hpp"

#include <cmath>
#include <mutex>
#include <numbers>

#include <fmt/format.h>

#include "fblin/elliptic.hpp"

namespace fblin {

namespace {

// Closure of the diagonal-norm summation-by-parts first derivative with the
// fourth-order interior stencil, for a boundary half a cell beyond the first
// node and quadratic extrapolation to it.  Rows 0..3 are exact for
// polynomials of degree two; the weights make the norm exact for cubics.
constexpr int kBlock = 4;
constexpr double kSigma[kBlock] = {433.0 / 384.0, 95.0 / 128.0, 451.0 / 384.0, 367.0 / 384.0};
struct Entry {
    int i, j;
    double v;
};
constexpr Entry kBlockS[] = {
    {0, 1, 985.0 / 768.0}, {0, 2, -79.0 / 192.0}, {0, 3, 17.0 / 256.0},
    {1, 2, 235.0 / 256.0}, {1, 3, -25.0 / 96.0},  {2, 3, 199.0 / 256.0},
};
constexpr double kExtrap[3] = {15.0 / 8.0, -10.0 / 8.0, 3.0 / 8.0};

Eigen::MatrixXd antisymmetric_part(int n) {
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        if (i + 1 < n) { S(i, i + 1) = 2.0 / 3.0; S(i + 1, i) = -2.0 / 3.0; }
        if (i + 2 < n) { S(i, i + 2) = -1.0 / 12.0; S(i + 2, i) = 1.0 / 12.0; }
    }
    for (int a = 0; a < kBlock; ++a)
        for (int b = 0; b < kBlock; ++b) S(a, b) = 0.0;
    for (int a = n - kBlock; a < n; ++a)
        for (int b = n - kBlock; b < n; ++b) S(a, b) = 0.0;
    for (const auto& e : kBlockS) {
        S(e.i, e.j) = e.v;
        S(e.j, e.i) = -e.v;
        // Mirror about r = 1/2: reflection flips the sign of a derivative.
        S(n - 1 - e.i, n - 1 - e.j) = -e.v;
        S(n - 1 - e.j, n - 1 - e.i) = e.v;
    }
    return S;
}

RowSparse to_sparse(const Eigen::MatrixXd& m) {
    RowSparse s = m.sparseView(0.0, 0.0);
    s.makeCompressed();
    return s;
}

}  // namespace

struct Grid::Cache {
    RadialOps radial;
    Eigen::MatrixXd d_theta_t;
    Eigen::MatrixXd fourier;
    Eigen::VectorXi mode_m;
    std::once_flag solver_once;
    std::unique_ptr<FlatSolver> solver;
};

Eigen::VectorXd radial_norm_weights(int n_r) {
    Eigen::VectorXd s = Eigen::VectorXd::Ones(n_r);
    if (n_r >= Grid::kMinRadial) {
        for (int a = 0; a < kBlock; ++a) {
            s(a) = kSigma[a];
            s(n_r - 1 - a) = kSigma[a];
        }
    }
    return s;
}

Grid build_grid(int n_r, int n_theta) {
    if (n_r < 1 || n_theta < 4) throw GridError(fmt::format("grid needs n_r >= 1 and n_theta >= 4 (got {}x{})", n_r, n_theta));
    if (n_theta % 2 != 0) throw GridError(fmt::format("n_theta must be even (got {})", n_theta));

    Grid g;
    g.n_r = n_r;
    g.n_theta = n_theta;
    g.dr = 1.0 / n_r;
    g.dtheta = 2.0 * std::numbers::pi / n_theta;
    g.r.resize(n_r);
    g.theta.resize(n_theta);
    for (int j = 0; j < n_r; ++j) g.r(j) = (j + 0.5) * g.dr;
    for (int k = 0; k < n_theta; ++k) g.theta(k) = k * g.dtheta;
    g.sigma = radial_norm_weights(n_r);

    g.R.resize(n_r, n_theta);
    g.cos_t.resize(n_r, n_theta);
    g.sin_t.resize(n_r, n_theta);
    g.weights.resize(n_r, n_theta);
    for (int k = 0; k < n_theta; ++k) {
        double c = std::cos(g.theta(k)), s = std::sin(g.theta(k));
        for (int j = 0; j < n_r; ++j) {
            g.R(j, k) = g.r(j);
            g.cos_t(j, k) = c;
            g.sin_t(j, k) = s;
            g.weights(j, k) = g.sigma(j) * g.r(j) * g.dr * g.dtheta;
        }
    }

    auto cache = std::make_shared<Grid::Cache>();

    // Spectral derivative: D_jk = (-1)^(j-k) cot((j-k) dtheta / 2) / 2.
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n_theta, n_theta);
    for (int j = 0; j < n_theta; ++j)
        for (int k = 0; k < n_theta; ++k)
            if (j != k) {
                int m = j - k;
                double sgn = (m % 2 == 0) ? 1.0 : -1.0;
                D(j, k) = 0.5 * sgn / std::tan(m * g.dtheta / 2.0);
            }
    cache->d_theta_t = D.transpose();

    cache->fourier.resize(n_theta, n_theta);
    cache->mode_m.resize(n_theta);
    const double a0 = 1.0 / std::sqrt(static_cast<double>(n_theta));
    const double a1 = std::sqrt(2.0 / n_theta);
    int col = 0;
    for (int k = 0; k < n_theta; ++k) cache->fourier(k, col) = a0;
    cache->mode_m(col++) = 0;
    for (int m = 1; m < n_theta / 2; ++m) {
        for (int k = 0; k < n_theta; ++k) {
            cache->fourier(k, col) = a1 * std::cos(m * g.theta(k));
            cache->fourier(k, col + 1) = a1 * std::sin(m * g.theta(k));
        }
        cache->mode_m(col++) = m;
        cache->mode_m(col++) = m;
    }
    for (int k = 0; k < n_theta; ++k) cache->fourier(k, col) = (k % 2 == 0 ? a0 : -a0);
    cache->mode_m(col) = n_theta / 2;

    if (n_r >= Grid::kMinRadial) {
        Eigen::MatrixXd S = antisymmetric_part(n_r);
        Eigen::VectorXd tl = Eigen::VectorXd::Zero(n_r), tr = Eigen::VectorXd::Zero(n_r);
        for (int a = 0; a < 3; ++a) {
            tl(a) = kExtrap[a];
            tr(n_r - 1 - a) = kExtrap[a];
        }
        Eigen::MatrixXd EL = tl * tl.transpose(), ER = tr * tr.transpose();
        Eigen::VectorXd hinv = (g.sigma * g.dr).cwiseInverse();
        auto scaled = [&](const Eigen::MatrixXd& q) { return to_sparse(hinv.asDiagonal() * q); };
        cache->radial.dff = scaled(S + 0.5 * ER - 0.5 * EL);
        cache->radial.dfz = scaled(S - 0.5 * ER - 0.5 * EL);
        cache->radial.dzf = scaled(S + 0.5 * ER + 0.5 * EL);
        cache->radial.t_left = tl;
        cache->radial.t_right = tr;
    }
    g.cache_ = std::move(cache);
    return g;
}

void Grid::require_operators(const char* what) const {
    if (!has_operators())
        throw GridError(fmt::format("{} needs n_r >= {} (grid has {})", what, kMinRadial, n_r));
}

const RadialOps& Grid::radial() const {
    require_operators("radial differencing");
    return cache_->radial;
}

const Eigen::MatrixXd& Grid::d_theta_t() const { return cache_->d_theta_t; }
const Eigen::MatrixXd& Grid::fourier() const { return cache_->fourier; }
const Eigen::VectorXi& Grid::mode_m() const { return cache_->mode_m; }

const FlatSolver& Grid::flat_solver() const {
    require_operators("the Dirichlet solver");
    std::call_once(cache_->solver_once, [this] { cache_->solver = std::make_unique<FlatSolver>(*this); });
    return *cache_->solver;
}

void Grid::check(const ScalarField& f, const char* what) const {
    if (!same_shape(f))
        throw GridError(fmt::format("grid mismatch in {}: field is {}x{}, grid is {}x{}", what, f.rows(), f.cols(),
                                    n_r, n_theta));
}

}  // namespace fblin
