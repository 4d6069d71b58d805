#include "fblin/elliptic.hpp"

#include <cmath>

#include <fmt/format.h>

#include "fblin/ops.hpp"
#include "fblin/parallel.hpp"

namespace fblin {

FlatSolver::FlatSolver(const Grid& grid) : n_r_(grid.n_r), n_theta_(grid.n_theta), fourier_(grid.fourier()) {
    grid.require_operators("FlatSolver");
    const RadialOps& R = grid.radial();
    Eigen::MatrixXd zf = Eigen::MatrixXd(R.dzf);
    Eigen::MatrixXd fz = Eigen::MatrixXd(R.dfz);
    Eigen::VectorXd rinv = grid.r.cwiseInverse();
    Eigen::MatrixXd base = rinv.asDiagonal() * zf * grid.r.asDiagonal() * fz;

    const int nyq = grid.n_theta / 2;
    ops_.resize(static_cast<size_t>(nyq + 1));
    lu_.resize(ops_.size());
    for (int m = 0; m <= nyq; ++m) {
        // The spectral derivative drops the Nyquist mode, so it sees no angular term.
        double lambda = (m == nyq) ? 0.0 : double(m) * m;
        Eigen::MatrixXd L = base;
        L.diagonal() -= lambda * rinv.cwiseAbs2();
        ops_[size_t(m)] = L;
        lu_[size_t(m)].compute(L);
    }
    column_op_.resize(size_t(grid.n_theta));
    for (int c = 0; c < grid.n_theta; ++c) column_op_[size_t(c)] = grid.mode_m()(c);
}

ScalarField FlatSolver::solve(const ScalarField& rhs) const {
    if (rhs.rows() != n_r_ || rhs.cols() != n_theta_)
        throw GridError(fmt::format("grid mismatch in FlatSolver::solve: field is {}x{}, grid is {}x{}", rhs.rows(),
                                    rhs.cols(), n_r_, n_theta_));
    Eigen::MatrixXd coef = rhs.matrix() * fourier_;
    Eigen::MatrixXd out(n_r_, n_theta_);
    parallel_for(n_theta_, [&](int c) { out.col(c) = lu_[size_t(column_op_[size_t(c)])].solve(coef.col(c)); });
    return (out * fourier_.transpose()).array();
}

ScalarField apply_laplacian(const ScalarField& q, const Metric& m, const Grid& grid) {
    OneForm dq = grad_dirichlet(q, grid);
    if (m.flat) return div(VectorField{dq.x, dq.y}, grid);
    return div(raise_pointwise(m.g_inv, dq), m.kappa, grid);
}

ScalarField solve_dirichlet(const ScalarField& rhs, const Metric& m, const Grid& grid, double tol, SolveStats* stats,
                            int max_iter) {
    grid.check(rhs, "solve_dirichlet");
    const FlatSolver& flat = grid.flat_solver();
    if (m.flat) {
        ScalarField q = flat.solve(rhs);
        if (stats) {
            stats->iterations = 0;
            double scale = std::max(1.0, rhs.matrix().norm());
            stats->residual = (apply_laplacian(q, m, grid) - rhs).matrix().norm() / scale;
        }
        return q;
    }

    // Symmetric form: K = W kappa (-L_g), preconditioner (-L_0)^-1 W^-1.
    const ScalarField wk = grid.weights * m.kappa;
    auto K = [&](const ScalarField& x) -> ScalarField { return -wk * apply_laplacian(x, m, grid); };
    auto prec = [&](const ScalarField& x) -> ScalarField { return -flat.solve(x / grid.weights); };
    auto dot = [](const ScalarField& a, const ScalarField& b) { return (a * b).sum(); };

    if (max_iter < 0) max_iter = 10 * grid.n_r * grid.n_theta;
    ScalarField b = -wk * rhs;
    double bnorm = std::sqrt(dot(b, b));
    ScalarField x = prec(b);
    ScalarField res = b - K(x);
    if (bnorm == 0.0) bnorm = 1.0;
    ScalarField z = prec(res);
    ScalarField p = z;
    double rz = dot(res, z);
    double rel = std::sqrt(dot(res, res)) / bnorm;
    int it = 0;
    while (rel > tol && it < max_iter) {
        ScalarField Kp = K(p);
        double alpha = rz / dot(p, Kp);
        x += alpha * p;
        res -= alpha * Kp;
        z = prec(res);
        double rz_new = dot(res, z);
        p = z + (rz_new / rz) * p;
        rz = rz_new;
        rel = std::sqrt(dot(res, res)) / bnorm;
        ++it;
    }
    if (stats) {
        stats->iterations = it;
        stats->residual = rel;
    }
    if (!(rel <= tol))
        throw SolverError(fmt::format("Dirichlet solve did not converge: residual {:.3e} after {} iterations", rel, it),
                          rel, it);
    return x;
}

}  // namespace fblin
