#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fblin/background.hpp"
#include "fblin/data_lift.hpp"
#include "fblin/fields.hpp"
#include "fblin/grid.hpp"
#include "fblin/normal_ops.hpp"

namespace fblin {

enum class Scheme { ImplicitMidpoint, RK4 };
enum class OperatorMode { Direct, Regularized };

const char* to_string(Scheme s);
const char* to_string(OperatorMode m);

struct EvolveConfig {
    double dt = 0.0;  // 0: pick the default for the scheme and mode
    double T_final = 1.0;
    Scheme scheme = Scheme::ImplicitMidpoint;
    OperatorMode mode = OperatorMode::Direct;
    RegularizationParams reg;
    // Re-project W and W' every this many steps (0: only when the defect
    // exceeds 10x the solver tolerance).
    int reproject_every = 0;
    double solver_tol = 1e-10;
    // Order r of the polynomial data lift; -1 evolves the raw data directly.
    int lift_order = 0;
    double stage_tol = 1e-10;
    int max_stage_iterations = 50;
    // Keep every k-th reported state in the result (0: first and last only).
    int keep_every = 0;

    std::optional<RegularizationParams> active_reg() const {
        return mode == OperatorMode::Regularized ? std::optional(reg) : std::nullopt;
    }
    void check() const;
};

struct State {
    double t = 0.0;
    VectorField W, Wdot;
    double div_W = 0.0, div_Wdot = 0.0;  // quadrature norms of the divergence
};

class EvolveError : public std::runtime_error {
public:
    EvolveError(const std::string& what, int step) : std::runtime_error(what), step_(step) {}
    int step() const { return step_; }

private:
    int step_;
};

// Time-dependent forcing; an empty function is zero forcing.
using Forcing = std::function<VectorField(double)>;

// D_t^s F(t) for s < count by central differences of F in time (F is given
// data, not the trajectory).  Zero for empty F.
std::vector<VectorField> forcing_jets(const Forcing& F, double t, int count, const Grid& grid, double h = 1e-3);

// W'' = P(g^-1 (F - (A or A^eps)-form - gdot W' + omega W')) with one projection.
VectorField rhs(const State& s, const VectorField* F, const EvolveConfig& cfg, const BackgroundJet& b,
                const Grid& grid);

// Largest eigenvalue of the active normal operator at the background's time.
double active_lambda_max(const EvolveConfig& cfg, const BackgroundJet& b, const Grid& grid);

// Default step: regularized min(eps, dr)/2; direct 1/sqrt(lambda_max) for the
// midpoint rule and 1.9/sqrt(lambda_max) for RK4.
double default_dt(const EvolveConfig& cfg, double lambda_max, const Grid& grid);

struct StepInfo {
    int step = 0;
    int stage_iterations = 0;
    int reprojections = 0;  // cumulative
};

// Called after every step (and once for the initial state with step 0) with
// the reported state, i.e. with the series lift added back.
using Sink = std::function<void(const State&, const StepInfo&)>;

struct RunResult {
    std::vector<State> states;
    State final_state;
    double dt = 0.0;
    int steps = 0;
    int reprojections = 0;
    double lambda_max = 0.0;  // NaN when not computed
    double max_div_defect = 0.0;
    int max_stage_iterations = 0;
    std::optional<SeriesLift> lift;
};

// Marches (W0, W1) with forcing F to cfg.T_final at a fixed step.  With a
// lift order r >= 0 the data are replaced by the series W_{0r}, the reduced
// problem with vanishing data and forcing F - L_1 W_{0r} is evolved and the
// series is added back to every reported state.
RunResult run(const VectorField& W0, const VectorField& W1, const Forcing& F, const EvolveConfig& cfg,
              const Background& bg, const Grid& grid, const Sink& sink = {});

}  // namespace fblin
