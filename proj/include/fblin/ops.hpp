#pragma once

#include "fblin/fields.hpp"
#include "fblin/grid.hpp"
#include "fblin/metric.hpp"

namespace fblin {

// Spectral angular derivative d/dtheta (Nyquist mode dropped).
ScalarField d_theta(const ScalarField& f, const Grid& grid);

// Radial derivative of a general function (free at both ends).
ScalarField d_r(const ScalarField& f, const Grid& grid);

struct Polar {
    ScalarField rad, ang;
};
Polar to_polar(const ScalarField& ax, const ScalarField& ay, const Grid& grid);
inline Polar to_polar(const VectorField& w, const Grid& grid) { return to_polar(w.x, w.y, grid); }
inline Polar to_polar(const OneForm& w, const Grid& grid) { return to_polar(w.x, w.y, grid); }
VectorField vector_from_polar(const ScalarField& rad, const ScalarField& ang, const Grid& grid);
OneForm form_from_polar(const ScalarField& rad, const ScalarField& ang, const Grid& grid);

// Cartesian partial derivatives of a scalar.
ScalarField d_x(const ScalarField& f, const Grid& grid);
ScalarField d_y(const ScalarField& f, const Grid& grid);

// Gradient of a general scalar.
OneForm grad(const ScalarField& q, const Grid& grid);
// Gradient of a potential vanishing on r = 1 (the projection's gradient).
OneForm grad_dirichlet(const ScalarField& q, const Grid& grid);
// kappa^-1 d_a(kappa W^a); exactly minus the adjoint of grad_dirichlet in the
// kappa-weighted quadrature.
ScalarField div(const VectorField& w, const Grid& grid);
ScalarField div(const VectorField& w, const ScalarField& kappa, const Grid& grid);
// beta_12 = d_1 w_2 - d_2 w_1.
TwoForm curl(const OneForm& w, const Grid& grid);

OneForm lower(const VectorField& w, const SymTensor& g);
VectorField raise(const OneForm& w, const SymTensor& g_inv);

// Weighted sum with fixed order: radial-major flattening, pairwise reduction.
double quadrature(const ScalarField& f, const Grid& grid);
double inner_product(const VectorField& a, const VectorField& b, const SymTensor& g, const Grid& grid);
double inner_product(const VectorField& a, const VectorField& b, const Metric& m, const Grid& grid);
double norm(const VectorField& a, const Metric& m, const Grid& grid);
double norm(const ScalarField& f, const Grid& grid);
// Euclidean-component norms (no metric), used for one-forms and two-forms.
double norm(const OneForm& a, const Grid& grid);
double norm(const TwoForm& a, const Grid& grid);
double pairwise_sum(const double* v, size_t n);

// Boundary trace on r = 1 by quadratic extrapolation of each ray.
Eigen::RowVectorXd trace(const ScalarField& f, const Grid& grid);

struct Cutoffs {
    ScalarField rho, chi_eps, chi_eps_prime, rho_prime;
};
// rho(d) and chi_eps(rho) = chi(rho/eps); chi_eps_prime is d chi_eps / d rho.
// eps must lie in (0, d0/2].
Cutoffs cutoff_profiles(const ScalarField& d, double eps, double d0 = 0.5);

// Scalar profiles (exposed for tests).
double smoothstep(double s);
double smoothstep_prime(double s);
double rho_of_d(double d);
double rho_prime_of_d(double d);
double chi(double s);
double chi_prime(double s);

// Boundary distance d = 1 - |y| at the nodes.
ScalarField boundary_distance(const Grid& grid);

}  // namespace fblin
