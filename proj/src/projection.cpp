#include "fblin/projection.hpp"

#include "fblin/ops.hpp"

namespace fblin {

namespace {

ScalarField divergence(const VectorField& U, const Metric& m, const Grid& grid) {
    return m.flat ? div(U, grid) : div(U, m.kappa, grid);
}

}  // namespace

Projected project_full(const VectorField& U, const Metric& m, const Grid& grid, double tol) {
    ScalarField q = solve_dirichlet(divergence(U, m, grid), m, grid, tol);
    OneForm dq = grad_dirichlet(q, grid);
    VectorField corr = m.flat ? VectorField{dq.x, dq.y} : raise_pointwise(m.g_inv, dq);
    return {U - corr, std::move(q)};
}

VectorField project(const VectorField& U, const Metric& m, const Grid& grid, double tol) {
    return project_full(U, m, grid, tol).W;
}

VectorField project_form(const OneForm& u, const Metric& m, const Grid& grid, double tol) {
    VectorField U = m.flat ? VectorField{u.x, u.y} : raise_pointwise(m.g_inv, u);
    return project(U, m, grid, tol);
}

double divergence_defect(const VectorField& W, const Metric& m, const Grid& grid) {
    return norm(divergence(W, m, grid), grid);
}

}  // namespace fblin
