#pragma once

#include <memory>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "fblin/fields.hpp"

namespace fblin {

class GridError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using RowSparse = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// Radial difference operators on the cell-centred nodes r_j = (j+1/2)dr.
//
// All three share the diagonal norm H = dr*diag(sigma) and the antisymmetric
// interior stencil; they differ only in how the end points r=0 and r=1 are
// closed.  Subscripts name the assumed end values: F = free, Z = zero, with
// the origin first.  With tL, tR the quadratic extrapolations to r=0, r=1:
//   dff = H^-1 (S + tR tR^T/2 - tL tL^T/2)   general functions
//   dfz = H^-1 (S - tR tR^T/2 - tL tL^T/2)   functions vanishing at r=1
//   dzf = H^-1 (S + tR tR^T/2 + tL tL^T/2)   functions vanishing at r=0
// so H dfz = -dzf^T H exactly, which makes the discrete divergence the
// negative adjoint of the Dirichlet gradient.
struct RadialOps {
    RowSparse dff, dfz, dzf;
    Eigen::VectorXd t_right;  // length n_r, quadratic extrapolation to r = 1
    Eigen::VectorXd t_left;   // to r = 0
};

class FlatSolver;

class Grid {
public:
    int n_r = 0;
    int n_theta = 0;
    double dr = 0.0;
    double dtheta = 0.0;
    Eigen::VectorXd r, theta;
    Eigen::VectorXd sigma;  // radial norm weights (1 in the interior)
    ScalarField R, cos_t, sin_t, weights;

    // Minimum radial count for which the difference operators are defined.
    static constexpr int kMinRadial = 8;

    bool has_operators() const { return n_r >= kMinRadial; }
    const RadialOps& radial() const;
    const Eigen::MatrixXd& d_theta_t() const;  // transpose of the spectral derivative
    const FlatSolver& flat_solver() const;

    // Orthogonal real Fourier basis; column c has angular wavenumber mode_m[c].
    const Eigen::MatrixXd& fourier() const;
    const Eigen::VectorXi& mode_m() const;

    bool same_shape(const ScalarField& f) const { return f.rows() == n_r && f.cols() == n_theta; }
    void check(const ScalarField& f, const char* what) const;
    void require_operators(const char* what) const;

private:
    struct Cache;
    std::shared_ptr<Cache> cache_;
    friend Grid build_grid(int n_r, int n_theta);
};

Grid build_grid(int n_r, int n_theta);

// Radial quadrature weights sigma_j for the summation-by-parts norm.
Eigen::VectorXd radial_norm_weights(int n_r);

}  // namespace fblin
