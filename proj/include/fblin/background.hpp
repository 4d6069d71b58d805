#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fblin/fields.hpp"
#include "fblin/grid.hpp"
#include "fblin/metric.hpp"

namespace fblin {

// Pointwise 2x2 matrix field, used for the Jacobian dx/dy and its time jets.
struct MatrixField {
    ScalarField a11, a12, a21, a22;

    static MatrixField zero(Eigen::Index nr, Eigen::Index nt);
    static MatrixField identity(Eigen::Index nr, Eigen::Index nt);
};

// Background quantities at one time, with time jets indexed by derivative
// order: p[s] = D_t^s p and likewise for g and omega, 0 <= s <= max_jet.
struct BackgroundJet {
    double t = 0.0;
    int max_jet = 0;
    std::vector<MatrixField> jacobian;  // at least J and dJ/dt
    std::vector<ScalarField> p;
    std::vector<SymTensor> g;
    std::vector<TwoForm> omega;
    Metric metric;  // g[0], its inverse and kappa

    // Particle trajectory x, velocity V and acceleration, when the provider
    // knows them.  Tabulated backgrounds only carry the Jacobian.
    std::optional<VectorField> x, velocity, acceleration;

    const SymTensor& g_dot() const { return g.at(1); }
    const ScalarField& p_dot() const { return p.at(1); }
    const ScalarField& kappa() const { return metric.kappa; }
};

class BackgroundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Background {
public:
    virtual ~Background() = default;
    virtual BackgroundJet at(double t, const Grid& grid) const = 0;
    virtual int max_jet() const = 0;
    virtual std::string name() const = 0;
};

enum class PressureConvention {
    // p = Omega^2 (1 - |y|^2) / 2: positive inside, satisfies the sign condition.
    Standard,
    // p = Omega^2 (|y|^2 - 1) / 2: the pressure that balances the centripetal
    // acceleration of the rotating disk.
    EulerConsistent,
};

constexpr int kDefaultMaxJet = 4;

// x(t, y) = rotation of y by the angle Omega t.
std::shared_ptr<const Background> rigid_rotation_background(double omega,
                                                            PressureConvention conv = PressureConvention::Standard,
                                                            int max_jet = kDefaultMaxJet);

// Loads samples "t,j,k,J11,J12,J21,J22,p" (header row required).  Every time
// sample must cover the full grid; values between samples use the cubic
// through the four nearest samples.  Throws BackgroundError on malformed or
// inconsistent input.
std::shared_ptr<const Background> load_tabulated_background(const std::string& path, int n_r, int n_theta,
                                                            int max_jet = kDefaultMaxJet);

// Builds g, kappa, omega and their jets from Jacobian jets (jac[s] = D_t^s J).
void fill_from_jacobian(BackgroundJet& b, const std::vector<MatrixField>& jac);

enum class BackgroundFailure { SignCondition, Volume, Euler, Poisson, BoundaryPressure, Metric };
const char* to_string(BackgroundFailure f);

struct BackgroundReport {
    double euler_residual = 0.0;  // NaN when the provider has no trajectory
    double volume_residual = 0.0;
    double poisson_residual = 0.0;
    double boundary_pressure = 0.0;
    double normal_derivative_max = 0.0;  // max over the boundary of grad_N p
    double c0 = 0.0;                     // -normal_derivative_max
    std::vector<BackgroundFailure> failures;
    bool ok() const { return failures.empty(); }
    bool has(BackgroundFailure f) const;
};

// Residuals of the Euler equation, the volume constraint, the pressure
// Poisson equation, the boundary pressure and the sign condition.
BackgroundReport validate_background(const BackgroundJet& b, const Grid& grid, double tol = 1e-8);

// Outward normal derivative of f on r = 1 in the metric g (traced per angle).
Eigen::RowVectorXd normal_derivative(const ScalarField& f, const Metric& m, const Grid& grid);

}  // namespace fblin
