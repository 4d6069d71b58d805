#include "fblin/data_lift.hpp"

#include <fmt/format.h>

#include "fblin/ops.hpp"
#include "fblin/projection.hpp"

namespace fblin {

namespace {

// Binomial coefficients are small here (r <= J_max); exact in integers.
long long binomial(int n, int k) {
    long long b = 1;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

}  // namespace

std::vector<VectorField> jet_recursion(const VectorField& W0, const VectorField& W1,
                                       const std::vector<VectorField>& F_jets, int r, const BackgroundJet& b,
                                       const Grid& grid, const std::optional<RegularizationParams>& reg) {
    if (r < 0) throw LiftError(fmt::format("lift order must be >= 0 (got {})", r));
    if (b.max_jet < r + 1)
        throw LiftError(fmt::format("lift of order {} needs background jets to order {}, provider has {}", r, r + 1,
                                    b.max_jet));
    const Metric& m = b.metric;
    const auto nr = grid.n_r, nt = grid.n_theta;
    auto F = [&](int s) { return s < int(F_jets.size()) ? F_jets[size_t(s)] : VectorField::zero(nr, nt); };

    std::vector<VectorField> W{W0, W1};
    for (int k = 0; k <= r; ++k) {
        // Accumulate the one-form sum, then project once.
        OneForm acc = OneForm::zero(nr, nt);
        auto add_mult_g = [&](const SymTensor& h, const VectorField& V, double c) {
            OneForm t = lower_pointwise(h, V);
            t *= c;
            acc += t;
        };
        for (int s = 0; s <= k - 1; ++s) add_mult_g(b.g[size_t(k - s)], W[size_t(s + 2)], -double(binomial(k, s)));
        for (int s = 0; s <= k; ++s) {
            const double c = double(binomial(k, s));
            add_mult_g(b.g[size_t(k - s + 1)], W[size_t(s + 1)], -c);
            OneForm cw = contract(b.omega[size_t(k - s)], W[size_t(s + 1)]);
            cw *= c;
            acc += cw;
            const ScalarField& ps = b.p[size_t(k - s)];
            if (ps.abs().maxCoeff() > 0.0) {
                OneForm aw = reg ? af_eps_preprojection(ps, W[size_t(s)], *reg, m, grid)
                                 : af_preprojection(ps, W[size_t(s)], m, grid);
                aw *= -c;
                acc += aw;
            }
            add_mult_g(b.g[size_t(k - s)], F(s), c);
        }
        W.push_back(project_form(acc, m, grid));
    }
    return W;
}

VectorField SeriesLift::derivative(double t, int k) const {
    if (jets_.empty()) throw LiftError("empty series");
    VectorField out = VectorField::zero(jets_[0].x.rows(), jets_[0].x.cols());
    // D^k sum t^s/s! W_s = sum_{s >= k} t^(s-k)/(s-k)! W_s
    double coef = 1.0;
    for (size_t s = size_t(k), i = 0; s < jets_.size(); ++s, ++i) {
        if (i > 0) coef *= t / double(i);
        if (coef != 0.0 || i == 0) out += coef * jets_[s];
    }
    return out;
}

SeriesLift assemble_series(std::vector<VectorField> jets, int r) {
    if (int(jets.size()) < r + 3)
        throw LiftError(fmt::format("series of order {} needs {} jets, got {}", r, r + 3, jets.size()));
    jets.resize(size_t(r + 3));
    return SeriesLift(std::move(jets), r);
}

VectorField apply_L1(const VectorField& W, const VectorField& Wd, const VectorField& Wdd, const BackgroundJet& b,
                     const Grid& grid, const std::optional<RegularizationParams>& reg) {
    const Metric& m = b.metric;
    OneForm acc = m.flat ? OneForm{Wdd.x, Wdd.y} : lower_pointwise(m.g, Wdd);
    acc += reg ? af_eps_preprojection(b.p[0], W, *reg, m, grid) : af_preprojection(b.p[0], W, m, grid);
    acc += lower_pointwise(b.g[1], Wd);
    acc -= contract(b.omega[0], Wd);
    return project_form(acc, m, grid);
}

}  // namespace fblin
