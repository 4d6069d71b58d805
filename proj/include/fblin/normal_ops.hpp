#pragma once

#include <functional>
#include <optional>

#include "fblin/background.hpp"
#include "fblin/families.hpp"
#include "fblin/fields.hpp"
#include "fblin/grid.hpp"
#include "fblin/metric.hpp"

namespace fblin {

class OperatorError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct RegularizationParams {
    double eps = 0.1;
    double d0 = 0.5;
    void check() const;  // throws OperatorError unless 0 < eps <= d0 / 2
};

// Outward radial derivative of f at r = 1 from the cubic through the last
// three nodes and the boundary value zero.
Eigen::RowVectorXd boundary_slope(const ScalarField& f, const Grid& grid);
// Throws OperatorError if the cubic extrapolation of f to r = 1 exceeds
// 1e-8 + dr^3 max|f|.
void require_vanishing_trace(const ScalarField& f, const Grid& grid);

// Discrete normal trace sum_j tR_j kappa r_j W_r(j, .) of a vector field.
Eigen::RowVectorXd normal_trace(const VectorField& W, const Metric& m, const Grid& grid);

// A_f W = P(-g^-1 grad((d f) . W)).  Because P annihilates Dirichlet
// gradients, only the boundary trace of (d f) . W = (d_r f) W^r survives; it is
// applied as the one-form dr weighted by the adjoint of the trace, which
// makes the discrete A_f exactly symmetric.
VectorField apply_Af(const ScalarField& f, const VectorField& W, const Metric& m, const Grid& grid);
// The one-form whose projection (after raising) is A_f W.
OneForm af_preprojection(const ScalarField& f, const VectorField& W, const Metric& m, const Grid& grid);
// A = A_p.
VectorField apply_A(const VectorField& W, const BackgroundJet& b, const Grid& grid);
// <U, A_f W> for divergence-free U, W without an elliptic solve.
double af_form(const VectorField& U, const VectorField& W, const ScalarField& f, const Metric& m, const Grid& grid);

// Boundary integral of (-grad_N f) U_N W_N kappa from independent one-sided
// extrapolations of U, W and grad f to r = 1.
double boundary_quadratic_form(const VectorField& U, const VectorField& W, const ScalarField& f, const Metric& m,
                               const Grid& grid);

// Smoothed normal operator: P(g^-1 chi'_eps(rho) f rho^-1 (W . d rho) d rho).
OneForm af_eps_preprojection(const ScalarField& f, const VectorField& W, const RegularizationParams& reg,
                             const Metric& m, const Grid& grid);
VectorField apply_Af_eps(const ScalarField& f, const VectorField& W, const RegularizationParams& reg, const Metric& m,
                         const Grid& grid);
double af_eps_form(const VectorField& U, const VectorField& W, const ScalarField& f, const RegularizationParams& reg,
                   const Metric& m, const Grid& grid);

// M_alpha W = P(g^-1 alpha W).
VectorField apply_mult(const TwoForm& alpha, const VectorField& W, const Metric& m, const Grid& grid);
VectorField apply_mult(const SymTensor& alpha, const VectorField& W, const Metric& m, const Grid& grid);

// Largest eigenvalue of a symmetric nonnegative operator on divergence-free
// fields: `steps` power iterations from a fixed smooth seed.
double power_iteration_lambda_max(const std::function<VectorField(const VectorField&)>& op, const Metric& m,
                                  const Grid& grid, int steps = 50);

// Norm of P(g^-1 L_T(g A_f W)) - A_f(L_T W) - A_{Tf} W, with A^eps in place of
// A when reg is given.  T must be tangential and spatial (S0 or S1).
double commutator_residual(const VectorFamily& fam, Member T, const ScalarField& f, const VectorField& W,
                           const std::optional<RegularizationParams>& reg, const Metric& m, const Grid& grid);

}  // namespace fblin
