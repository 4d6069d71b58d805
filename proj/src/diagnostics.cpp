#include "fblin/diagnostics.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "fblin/data_lift.hpp"
#include "fblin/ops.hpp"
#include "fblin/parallel.hpp"

namespace fblin {

Jet<VectorField> state_jets(const State& s, const std::vector<VectorField>& F_jets, int order,
                            const BackgroundJet& b, const Grid& grid,
                            const std::optional<RegularizationParams>& reg) {
    if (order <= 1) {
        Jet<VectorField> out{s.W, s.Wdot};
        out.resize(size_t(std::max(order, 0) + 1), VectorField{});
        return out;
    }
    return jet_recursion(s.W, s.Wdot, F_jets, order - 2, b, grid, reg);
}

double a_form(const VectorField& U, const VectorField& W, const ScalarField& f, const BackgroundJet& b,
              const Grid& grid, const std::optional<RegularizationParams>& reg) {
    return reg ? af_eps_form(U, W, f, *reg, b.metric, grid) : af_form(U, W, f, b.metric, grid);
}

double energy_base(const VectorField& W, const VectorField& Wdot, const BackgroundJet& b, const Grid& grid,
                   const std::optional<RegularizationParams>& reg) {
    const Metric& m = b.metric;
    return inner_product(Wdot, Wdot, m, grid) + inner_product(W, W, m, grid) + a_form(W, W, b.p[0], b, grid, reg);
}

namespace {

// Ordered splits of I into two complementary subsequences, I1 nonempty.
std::vector<std::pair<MultiIndex, MultiIndex>> splits(const MultiIndex& I) {
    std::vector<std::pair<MultiIndex, MultiIndex>> out;
    const unsigned n = unsigned(I.size());
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        MultiIndex a, c;
        for (unsigned i = 0; i < n; ++i) (mask >> i & 1u ? a : c).push_back(I[i]);
        out.emplace_back(std::move(a), std::move(c));
    }
    return out;
}

int time_count(const MultiIndex& I) {
    int n = 0;
    for (const Member& m : I) n += m.kind == MemberKind::Dt;
    return n;
}

// Largest eigenvalue magnitude of a symmetric 2x2 field, maximized over nodes.
double sup_norm(const SymTensor& h) {
    ScalarField mean = 0.5 * (h.xx + h.yy);
    ScalarField rad = (0.25 * (h.xx - h.yy).square() + h.xy.square()).sqrt();
    return (mean.abs() + rad).maxCoeff();
}

}  // namespace

TangentialEnergy energy_tangential(const Jet<VectorField>& jets, const VectorFamily& fam, int r,
                                   const BackgroundJet& b, const Grid& grid,
                                   const std::optional<RegularizationParams>& reg,
                                   std::optional<std::vector<Member>> labels) {
    if (r < 0 || r > 3) throw std::invalid_argument(fmt::format("tangential order must be in [0, 3] (got {})", r));
    const std::vector<Member> L = labels ? *labels : fam.T();
    const auto indices = multi_indices(L, r);
    for (const auto& I : indices)
        if (int(jets.size()) < time_count(I) + 2)
            throw LiftError(fmt::format("index {} needs {} time jets, have {}", label(I), time_count(I) + 2,
                                        jets.size()));

    TangentialEnergy out;
    out.per_index.resize(indices.size());
    const Jet<ScalarField> p_jet(b.p.begin(), b.p.end());
    // Normal operators need the boundary-slope ratio of L^{I1} p to p.
    const Eigen::RowVectorXd np = normal_derivative(b.p[0], b.metric, grid);

    parallel_for(int(indices.size()), [&](int i) {
        const MultiIndex& I = indices[size_t(i)];
        IndexEnergy& e = out.per_index[size_t(i)];
        e.I = I;
        Jet<VectorField> WI = lie_multi(fam, I, jets, grid);
        e.E = energy_base(WI[0], WI[1], b, grid, reg);
        const double aI = std::sqrt(std::max(0.0, a_form(WI[0], WI[0], b.p[0], b, grid, reg)));
        for (const auto& [I1, I2] : splits(I)) {
            if (time_count(I1) + 1 > int(p_jet.size())) throw LiftError("background jets too short for corrector");
            ScalarField f = lie_multi(fam, I1, p_jet, grid)[0];
            VectorField W2 = lie_multi(fam, I2, jets, grid)[0];
            e.D += 2.0 * a_form(WI[0], W2, f, b, grid, reg);
            Eigen::RowVectorXd nf = normal_derivative(f, b.metric, grid);
            const double ratio = (nf.array() / np.array()).abs().maxCoeff();
            const double a2 = std::sqrt(std::max(0.0, a_form(W2, W2, b.p[0], b, grid, reg)));
            e.D_bound += 2.0 * aI * ratio * a2;
        }
    });
    for (const auto& e : out.per_index) out.E_total += std::sqrt(std::max(0.0, e.E));
    return out;
}

Jet<OneForm> lowered_jets(const Jet<VectorField>& jets, const BackgroundJet& b) {
    Jet<OneForm> out;
    for (size_t k = 0; k < jets.size(); ++k) {
        if (jets[k].x.size() == 0) break;
        if (k >= b.g.size()) break;
        OneForm w = OneForm::zero(jets[k].x.rows(), jets[k].x.cols());
        long long c = 1;  // binomial(k, s)
        for (size_t s = 0; s <= k; ++s) {
            if (s > 0) c = c * (long long)(k - s + 1) / (long long)s;
            if (s > 0 && b.g[s].xx.abs().maxCoeff() == 0.0 && b.g[s].xy.abs().maxCoeff() == 0.0 &&
                b.g[s].yy.abs().maxCoeff() == 0.0)
                continue;
            OneForm t = lower_pointwise(b.g[s], jets[k - s]);
            t *= double(c);
            w += t;
        }
        out.push_back(std::move(w));
    }
    return out;
}

namespace {

double weighted_norm(const ScalarField& f, const ScalarField& kappa, const Grid& grid) {
    return std::sqrt(std::max(0.0, quadrature(kappa * f * f, grid)));
}

}  // namespace

CurlReport curl_seminorms(const Jet<VectorField>& jets, const VectorFamily& fam, int r, const BackgroundJet& b,
                          const Grid& grid, std::optional<std::vector<Member>> labels) {
    if (r < 0 || r > 3) throw std::invalid_argument(fmt::format("curl order must be in [0, 3] (got {})", r));
    const std::vector<Member> L = labels ? *labels : fam.T();
    const ScalarField& kappa = b.metric.kappa;
    CurlReport rep;
    rep.a_form_min = std::numeric_limits<double>::infinity();

    if (r >= 1) {
        Jet<OneForm> w = lowered_jets(jets, b);
        for (const auto& J : multi_indices(L, r - 1)) {
            if (int(w.size()) < time_count(J) + 2) throw LiftError(fmt::format("index {} needs more time jets", label(J)));
            Jet<OneForm> wJ = lie_multi(fam, J, w, grid);
            const double a = weighted_norm(curl(wJ[1], grid).c, kappa, grid);
            const double c = weighted_norm(curl(wJ[0], grid).c, kappa, grid);
            rep.C += std::sqrt(a * a + c * c);
        }
    }
    for (const auto& I : multi_indices(L, r)) {
        if (int(jets.size()) < time_count(I) + 2) throw LiftError(fmt::format("index {} needs more time jets", label(I)));
        Jet<VectorField> WI = lie_multi(fam, I, jets, grid);
        rep.mixed_norm += norm(WI[0], b.metric, grid);
        rep.mixed_norm_dot += norm(WI[1], b.metric, grid);
    }
    for (const auto& I : multi_indices(fam.S(), r)) {
        VectorField WI = lie_multi(fam, I, Jet<VectorField>{jets[0]}, grid)[0];
        const double q = af_form(WI, WI, b.p[0], b.metric, grid);
        rep.a_form_min = std::min(rep.a_form_min, q);
        rep.a_seminorm += std::sqrt(std::max(0.0, q));
    }
    return rep;
}

TwoForm curl_invariant(const State& s, const BackgroundJet& b, const Grid& grid) {
    Jet<OneForm> w = lowered_jets(Jet<VectorField>{s.W, s.Wdot}, b);
    OneForm dz = w.at(1) - contract(b.omega[0], s.W);
    return curl(dz, grid);
}

void CurlDrift::add(const State& s, const BackgroundJet& b, const Grid& grid) {
    TwoForm c = curl_invariant(s, b, grid);
    if (!initial_) {
        initial_ = c;
        series_.push_back(0.0);
        return;
    }
    const double d = weighted_norm((c - *initial_).c, b.metric.kappa, grid);
    series_.push_back(d);
    drift_ = std::max(drift_, d);
}

std::vector<double> conserved_curl(const std::vector<State>& trajectory, const Background& bg, const Grid& grid) {
    CurlDrift tracker;
    for (const State& s : trajectory) tracker.add(s, bg.at(s.t, grid), grid);
    return tracker.series();
}

GradientReport gradient_estimate_report(const VectorField& W, const VectorFamily& fam, const BackgroundJet& b,
                                        const Grid& grid) {
    const Metric& m = b.metric;
    ScalarField dWxx = d_x(W.x, grid), dWxy = d_y(W.x, grid), dWyx = d_x(W.y, grid), dWyy = d_y(W.y, grid);
    ScalarField grad_mag = (dWxx.square() + dWxy.square() + dWyx.square() + dWyy.square()).sqrt();

    OneForm w = m.flat ? OneForm{W.x, W.y} : lower_pointwise(m.g, W);
    ScalarField maj = curl(w, grid).c.abs() + div(W, m.kappa, grid).abs();
    for (const Member& S : fam.S()) {
        VectorField LW = lie_derive(fam, S, W, grid);
        maj += (LW.x.square() + LW.y.square()).sqrt();
    }
    ScalarField dg = ScalarField::Zero(grid.n_r, grid.n_theta);
    for (const ScalarField* c : {&m.g.xx, &m.g.xy, &m.g.yy}) {
        if (m.flat) break;
        dg += d_x(*c, grid).square() + d_y(*c, grid).square();
    }
    maj += (1.0 + dg.sqrt()) * (W.x.square() + W.y.square()).sqrt();

    GradientReport rep;
    rep.max_gradient = grad_mag.maxCoeff();
    const double wmax = std::max(W.x.abs().maxCoeff(), W.y.abs().maxCoeff());
    const double floor = 1e-10 * std::max(1.0, wmax);
    for (int j = 0; j < grid.n_r; ++j)
        for (int k = 0; k < grid.n_theta; ++k) {
            if (grad_mag(j, k) <= floor) continue;
            const double ratio = maj(j, k) > 0 ? grad_mag(j, k) / maj(j, k) : std::numeric_limits<double>::infinity();
            if (ratio > rep.max_ratio) {
                rep.max_ratio = ratio;
                rep.worst_j = j;
                rep.worst_k = k;
            }
        }
    return rep;
}

double growth_coefficient(const BackgroundJet& b, const Grid& grid) {
    double n = 1.0 + sup_norm(b.g_dot());
    const double pdot = b.p_dot().abs().maxCoeff();
    if (pdot > 0.0) {
        Eigen::RowVectorXd a = normal_derivative(b.p_dot(), b.metric, grid);
        Eigen::RowVectorXd c = normal_derivative(b.p[0], b.metric, grid);
        n += (a.array() / c.array()).abs().maxCoeff();
    }
    return n;
}

BoundCheck energy_bound_check(const std::vector<EnergySample>& samples, double tol) {
    BoundCheck out;
    if (samples.empty()) return out;
    const double root0 = std::sqrt(std::max(0.0, samples[0].E));
    double int_n = 0.0, int_F = 0.0;
    out.margin = out.sharp_margin = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < samples.size(); ++i) {
        if (i > 0) {
            const double h = samples[i].t - samples[i - 1].t;
            int_n += 0.5 * h * (samples[i].n + samples[i - 1].n);
            int_F += 0.5 * h * (samples[i].F_norm + samples[i - 1].F_norm);
        }
        const double lhs = std::sqrt(std::max(0.0, samples[i].E));
        const double base = root0 + int_F;
        const double loose = std::exp(int_n) * base, sharp = std::exp(0.5 * int_n) * base;
        auto rel = [](double bound, double v) { return bound > 0 ? (bound - v) / bound : (v > 0 ? -1.0 : 0.0); };
        const double m1 = rel(loose, lhs), m2 = rel(sharp, lhs);
        out.margin = std::min(out.margin, m1);
        if (m2 < out.sharp_margin) {
            out.sharp_margin = m2;
            out.worst_t = samples[i].t;
        }
    }
    // sqrt E <= B (1 + tol)  <=>  relative margin >= -tol
    out.pass = out.margin >= -tol && out.sharp_margin >= -tol;
    return out;
}

}  // namespace fblin
