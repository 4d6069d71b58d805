#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "fblin/fields.hpp"
#include "fblin/grid.hpp"
#include "fblin/metric.hpp"

namespace fblin {

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& msg, double residual, int iterations)
        : std::runtime_error(msg), residual(residual), iterations(iterations) {}
    double residual;
    int iterations;
};

// Per-Fourier-mode LU factors of the identity-metric Dirichlet Laplacian.
class FlatSolver {
public:
    explicit FlatSolver(const Grid& grid);
    // Solves L q = rhs with L the discrete flat Laplacian (q = 0 at r = 1).
    ScalarField solve(const ScalarField& rhs) const;
    // The radial operator of mode column c (exposed for tests).
    const Eigen::MatrixXd& mode_operator(int c) const { return ops_[static_cast<size_t>(c)]; }

private:
    int n_r_, n_theta_;
    Eigen::MatrixXd fourier_;
    std::vector<Eigen::MatrixXd> ops_;
    std::vector<Eigen::PartialPivLU<Eigen::MatrixXd>> lu_;
    std::vector<int> column_op_;
};

struct SolveStats {
    int iterations = 0;
    double residual = 0.0;
};

// Discrete kappa^-1 d_a(kappa g^ab d_b q) with q = 0 at r = 1.
ScalarField apply_laplacian(const ScalarField& q, const Metric& m, const Grid& grid);

// Solves the divergence-form Dirichlet problem.  Flat metrics use the direct
// per-mode solve; otherwise preconditioned CG in the kappa-weighted norm.
ScalarField solve_dirichlet(const ScalarField& rhs, const Metric& m, const Grid& grid,
                            double tol = 1e-10, SolveStats* stats = nullptr, int max_iter = -1);

}  // namespace fblin
