#pragma once

#include "fblin/elliptic.hpp"
#include "fblin/fields.hpp"
#include "fblin/grid.hpp"
#include "fblin/metric.hpp"

namespace fblin {

struct Projected {
    VectorField W;  // divergence-free part
    ScalarField q;  // Dirichlet potential: U = W + g^-1 grad q
};

// Orthogonal projection onto divergence-free fields in the kappa g inner
// product, with complement spanned by gradients of potentials vanishing on
// r = 1.  The discrete divergence is the exact negative adjoint of the
// discrete Dirichlet gradient, so the result is divergence-free up to the
// solver tolerance and P is an orthogonal projector up to the same.
Projected project_full(const VectorField& U, const Metric& m, const Grid& grid, double tol = 1e-10);
VectorField project(const VectorField& U, const Metric& m, const Grid& grid, double tol = 1e-10);
// P(g^-1 u) for a one-form u.
VectorField project_form(const OneForm& u, const Metric& m, const Grid& grid, double tol = 1e-10);

// Quadrature norm of kappa^-1 d_a(kappa W^a).
double divergence_defect(const VectorField& W, const Metric& m, const Grid& grid);

}  // namespace fblin
