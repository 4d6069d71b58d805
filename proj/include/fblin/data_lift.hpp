#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "fblin/background.hpp"
#include "fblin/fields.hpp"
#include "fblin/grid.hpp"
#include "fblin/normal_ops.hpp"

namespace fblin {

class LiftError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Time jets W_0 .. W_{r+2} of a solution of
//   W'' + A W + Gdot W' - C W' = F
// at the background's time, from W_0 = W, W_1 = W' and F_jets[s] = D_t^s F.
// Each W_{s+2} follows from the previous ones by differentiating the
// equation s times (Leibniz in the background jets) and projecting.  With
// reg set, A^eps replaces A.  Missing F jets count as zero.
std::vector<VectorField> jet_recursion(const VectorField& W0, const VectorField& W1,
                                       const std::vector<VectorField>& F_jets, int r, const BackgroundJet& b,
                                       const Grid& grid, const std::optional<RegularizationParams>& reg = std::nullopt);

// Polynomial W_{0r}(t) = sum_{s <= r+2} t^s / s! W_s and its derivatives.
class SeriesLift {
public:
    SeriesLift() = default;
    SeriesLift(std::vector<VectorField> jets, int r) : jets_(std::move(jets)), r_(r) {}
    // D_t^k W_{0r}(t).
    VectorField derivative(double t, int k) const;
    VectorField value(double t) const { return derivative(t, 0); }
    int order() const { return r_; }
    const std::vector<VectorField>& jets() const { return jets_; }
    bool empty() const { return jets_.empty(); }

private:
    std::vector<VectorField> jets_;
    int r_ = 0;
};

SeriesLift assemble_series(std::vector<VectorField> jets, int r);

// L_1 W = P(W'' + g^-1 (-grad((d p) W) + gdot W' - omega W')) evaluated on
// (W, W', W'') at the background's time; with reg set the regularized
// normal operator is used.
VectorField apply_L1(const VectorField& W, const VectorField& Wd, const VectorField& Wdd, const BackgroundJet& b,
                     const Grid& grid, const std::optional<RegularizationParams>& reg = std::nullopt);

}  // namespace fblin
