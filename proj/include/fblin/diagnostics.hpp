#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fblin/background.hpp"
#include "fblin/evolution.hpp"
#include "fblin/families.hpp"
#include "fblin/fields.hpp"
#include "fblin/grid.hpp"
#include "fblin/normal_ops.hpp"

namespace fblin {

// D_t^k W for k <= order at the state's time: W and W' from the state, the
// rest from the equation (jet recursion with the given forcing jets).
Jet<VectorField> state_jets(const State& s, const std::vector<VectorField>& F_jets, int order,
                            const BackgroundJet& b, const Grid& grid,
                            const std::optional<RegularizationParams>& reg = std::nullopt);

// <U, A W> (or A^eps) through the boundary form; no elliptic solve.
double a_form(const VectorField& U, const VectorField& W, const ScalarField& f, const BackgroundJet& b,
              const Grid& grid, const std::optional<RegularizationParams>& reg);

// <W', W'> + <W, (A + I) W>.
double energy_base(const VectorField& W, const VectorField& Wdot, const BackgroundJet& b, const Grid& grid,
                   const std::optional<RegularizationParams>& reg = std::nullopt);
inline double energy_base(const State& s, const BackgroundJet& b, const Grid& grid,
                          const std::optional<RegularizationParams>& reg = std::nullopt) {
    return energy_base(s.W, s.Wdot, b, grid, reg);
}

struct IndexEnergy {
    MultiIndex I;
    double E = 0.0;  // E(W_I)
    double D = 0.0;  // corrector
    double D_bound = 0.0;
};

struct TangentialEnergy {
    std::vector<IndexEnergy> per_index;  // shortest first, empty index first
    double E_total = 0.0;                // sum of sqrt(E_I)
};

// E_I and D_I for |I| <= r over `labels` (default: the family T).  D_I sums
// 2 <W_I, A_{I1} W_{I2}> over ordered splits of I into subsequences with I1
// nonempty, where A_{I1} is the normal operator of L^{I1} p.  `jets` must
// reach order r + 1.
TangentialEnergy energy_tangential(const Jet<VectorField>& jets, const VectorFamily& fam, int r,
                                   const BackgroundJet& b, const Grid& grid,
                                   const std::optional<RegularizationParams>& reg = std::nullopt,
                                   std::optional<std::vector<Member>> labels = std::nullopt);

struct CurlReport {
    double C = 0.0;           // curl seminorm C_r
    double mixed_norm = 0.0;  // sum over |I| <= r of ||L^I W||
    double mixed_norm_dot = 0.0;
    double a_seminorm = 0.0;  // sum over I in S, |I| <= r, of <L^I W, A L^I W>^(1/2)
    double a_form_min = 0.0;  // smallest <L^I W, A L^I W> seen (negative values clipped above)
};

// Curl seminorm of the lowered field and its time derivative (C_0 = 0),
// the mixed norms over `labels` (default T) and the A-seminorm over S.
// `jets` must reach order r + 1 when labels contain D_t.
CurlReport curl_seminorms(const Jet<VectorField>& jets, const VectorFamily& fam, int r, const BackgroundJet& b,
                          const Grid& grid, std::optional<std::vector<Member>> labels = std::nullopt);

// Lowered velocity jets w_k = D_t^k (g W).
Jet<OneForm> lowered_jets(const Jet<VectorField>& jets, const BackgroundJet& b);

// curl of w' - omega . W.
TwoForm curl_invariant(const State& s, const BackgroundJet& b, const Grid& grid);

// Running max over states of ||curl dz(t) - curl dz(0)||.
class CurlDrift {
public:
    void add(const State& s, const BackgroundJet& b, const Grid& grid);
    double drift() const { return drift_; }
    const std::vector<double>& series() const { return series_; }

private:
    std::optional<TwoForm> initial_;
    double drift_ = 0.0;
    std::vector<double> series_;
};

std::vector<double> conserved_curl(const std::vector<State>& trajectory, const Background& bg, const Grid& grid);

struct GradientReport {
    double max_ratio = 0.0;  // max over nodes of |dW| / majorant
    double max_gradient = 0.0;
    int worst_j = 0, worst_k = 0;
};

// Pointwise |dW| against |curl w| + |div W| + sum over S of |L_S W| + [g]_1 |W|
// with [g]_1 = 1 + |dg|.  Nodes with a vanishing majorant and gradient are skipped.
GradientReport gradient_estimate_report(const VectorField& W, const VectorFamily& fam, const BackgroundJet& b,
                                        const Grid& grid);
constexpr double kGradientRatioBound = 25.0;

// Energy growth coefficient 1 + sup|gdot| + sup_boundary |grad_N pdot / grad_N p|.
double growth_coefficient(const BackgroundJet& b, const Grid& grid);

struct EnergySample {
    double t = 0.0;
    double E = 0.0;
    double n = 1.0;        // growth coefficient at t
    double F_norm = 0.0;   // ||F(t)||
};

struct BoundCheck {
    bool pass = true;
    // Smallest bound - measured over samples, relative to the bound.
    double margin = 0.0;      // sqrt E(t) <= e^{int n} (sqrt E(0) + int ||F||)
    double sharp_margin = 0.0;  // sqrt E(t) <= e^{int n / 2} (sqrt E(0) + int ||F||)
    double worst_t = 0.0;
};

// Trapezoidal integrals of n and ||F||; both forms must hold within tol.
BoundCheck energy_bound_check(const std::vector<EnergySample>& samples, double tol = 1e-2);

}  // namespace fblin
