#include "checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "fblin/data_lift.hpp"
#include "fblin/diagnostics.hpp"
#include "fblin/elliptic.hpp"
#include "fblin/evolution.hpp"
#include "fblin/families.hpp"
#include "fblin/normal_ops.hpp"
#include "fblin/ops.hpp"
#include "fblin/projection.hpp"
#include "fblin/random_fields.hpp"

namespace fblin::cli {

bool Battery::ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass || c.skipped; });
}

std::vector<std::string> Battery::failures() const {
    std::vector<std::string> out;
    for (const auto& c : checks)
        if (!c.pass && !c.skipped) out.push_back(c.name);
    return out;
}

namespace {

constexpr double pi = std::numbers::pi;

double maxabs(const VectorField& w) { return std::max(w.x.abs().maxCoeff(), w.y.abs().maxCoeff()); }
VectorField constant(const Grid& g, double a, double b) { return VectorField::constant(g.n_r, g.n_theta, a, b); }
VectorField zero(const Grid& g) { return VectorField::zero(g.n_r, g.n_theta); }

double order(double coarse, double fine, double ratio) { return std::log(coarse / fine) / std::log(ratio); }

Check upper(std::string name, double value, double bound, std::string note = {}) {
    return {std::move(name), value, bound, "<=", value <= bound, false, std::move(note)};
}
Check lower(std::string name, double value, double bound, std::string note = {}) {
    return {std::move(name), value, bound, ">=", value >= bound, false, std::move(note)};
}
Check skipped(std::string name, std::string why) {
    Check c;
    c.name = std::move(name);
    c.skipped = true;
    c.note = std::move(why);
    c.value = std::numeric_limits<double>::quiet_NaN();
    return c;
}

const char* kBelowMin = "skipped: below minimum resolution";

// Free run of the configured problem at grid g.
struct FreeRunStats {
    BoundCheck bound;
    double sharp_ratio = 0.0;  // max E(t) / (e^{int n} E(0)) - 1
    double drift = 0.0;
    double max_div = 0.0;
    double antisym = 0.0;
};

VectorField initial_data(const Config& c, const Grid& g, const Metric& m) {
    if (c.data == "zero") return zero(g);
    if (c.data == "rotation") return c.data_scale * VectorField{-g.R * g.sin_t, g.R * g.cos_t};
    if (c.data == "random") {
        auto rng = seeded_rng(c.seed, 0);
        return c.data_scale * random_divergence_free(g, m, rng, 2);
    }
    return constant(g, c.data_scale, 0.0);
}

FreeRunStats free_run(const Config& c, const Background& bg, const Grid& g, double T, double dt) {
    EvolveConfig cfg = c.evolve;
    cfg.T_final = T;
    cfg.dt = dt;
    auto reg = cfg.active_reg();
    BackgroundJet b0 = bg.at(0.0, g);
    VectorField W0 = project(initial_data(c, g, b0.metric), b0.metric, g);
    auto rng = seeded_rng(c.seed, 1);
    VectorField W1 = 0.5 * c.data_scale * random_divergence_free(g, b0.metric, rng, 2);
    FreeRunStats s;
    std::vector<EnergySample> samples;
    CurlDrift drift;
    double int_n = 0.0, prev_n = 0.0, prev_t = 0.0, E0 = 0.0;
    RunResult r = run(W0, W1, {}, cfg, bg, g, [&](const State& st, const StepInfo& info) {
        BackgroundJet b = bg.at(st.t, g);
        const double E = energy_base(st, b, g, reg);
        const double n = growth_coefficient(b, g);
        if (info.step == 0) E0 = E;
        else int_n += 0.5 * (st.t - prev_t) * (n + prev_n);
        prev_n = n;
        prev_t = st.t;
        samples.push_back({st.t, E, n, 0.0});
        if (E0 > 0) s.sharp_ratio = std::max(s.sharp_ratio, E / (std::exp(int_n) * E0) - 1.0);
        drift.add(st, b, g);
    });
    s.bound = energy_bound_check(samples);
    s.drift = drift.drift();
    s.max_div = r.max_div_defect;
    BackgroundJet bT = bg.at(r.final_state.t, g);
    const VectorField& V = r.final_state.Wdot;
    const double v2 = inner_product(V, V, bT.metric, g);
    if (v2 > 0) s.antisym = std::abs(inner_product(V, apply_mult(bT.omega[0], V, bT.metric, g), bT.metric, g)) / v2;
    return s;
}

bool rigid(const Config& c) { return c.background == "rigid_rotation"; }

double a_eps_value(double eps, double d0, const Config& c) {
    Grid g = build_grid(512, 16);
    BackgroundJet b = rigid_rotation_background(c.omega, c.pressure)->at(0.0, g);
    VectorField e1 = constant(g, 1.0, 0.0);
    return inner_product(e1, apply_Af_eps(b.p[0], e1, RegularizationParams{eps, d0}, b.metric, g), b.metric, g);
}

double commutator_s1_eps(int n, const Config& c) {
    Grid g = build_grid(n, n);
    BackgroundJet b = rigid_rotation_background(c.omega, c.pressure)->at(0.0, g);
    VectorFamily fam = build_families(g);
    auto rng = seeded_rng(c.seed, 300);
    VectorField W = random_divergence_free(g, b.metric, rng, 2);
    return commutator_residual(fam, Member{MemberKind::S1, 1}, b.p[0], W, RegularizationParams{0.1, 0.5}, b.metric,
                               g) /
           norm(W, b.metric, g);
}

double curl_drift_at(int n, double dt, const Config& c) {
    Grid g = build_grid(n, n);
    auto bg = rigid_rotation_background(c.omega, c.pressure);
    BackgroundJet b = bg->at(0.0, g);
    auto rng = seeded_rng(c.seed, 1000);
    VectorField W0 = random_divergence_free(g, b.metric, rng, 2), W1 = random_divergence_free(g, b.metric, rng, 2);
    EvolveConfig cfg;
    cfg.T_final = 1.0;
    cfg.dt = dt;
    CurlDrift tracker;
    run(W0, W1, {}, cfg, *bg, g, [&](const State& st, const StepInfo&) { tracker.add(st, b, g); });
    return tracker.drift();
}

}  // namespace

Battery run_verification(const Config& c) {
    Battery out;
    auto bg = make_background(c);
    Grid g = make_grid(c);
    BackgroundJet b = bg->at(0.0, g);
    const Metric& m = b.metric;
    const int n = std::min(c.n_r, c.n_theta);
    const double sign = c.fault == "a_sign" ? -1.0 : 1.0;
    auto A = [&](const VectorField& W) { return sign * apply_A(W, b, g); };

    BackgroundReport rep = validate_background(b, g);
    if (rep.has(BackgroundFailure::SignCondition))
        out.warnings.push_back(fmt::format("sign condition fails: c0 = {:.3g} (needs c0 > 0)", rep.c0 + 0.0));
    for (auto f : rep.failures)
        if (f != BackgroundFailure::SignCondition)
            out.warnings.push_back(fmt::format("background check '{}' fails", to_string(f)));

    // Projection.
    {
        double idem = 0, ortho = 0;
        for (int i = 0; i < 5; ++i) {
            auto rng = seeded_rng(c.seed, std::uint64_t(10 + i));
            VectorField U = random_vector_field(g, rng), W = random_divergence_free(g, m, rng);
            VectorField PU = project(U, m, g);
            idem = std::max(idem, norm(project(PU, m, g) - PU, m, g) / std::max(norm(PU, m, g), 1e-300));
            ortho = std::max(ortho, std::abs(inner_product(W, U - PU, m, g)) / (norm(W, m, g) * norm(U, m, g)));
        }
        out.checks.push_back(upper("projection-idempotence", idem, 1e-8));
        out.checks.push_back(upper("projection-orthogonality", ortho, 1e-6));
        if (n < 16) {
            out.checks.push_back(skipped("projection-closed-form", kBelowMin));
        } else {
            Metric id = Metric::identity(g);
            ScalarField y1 = g.R * g.cos_t, y2 = g.R * g.sin_t;
            VectorField P = project(VectorField{y1, ScalarField::Zero(g.n_r, g.n_theta)}, id, g);
            out.checks.push_back(upper("projection-closed-form", maxabs(P - VectorField{y1 / 2.0, -y2 / 2.0}), 1e-3));
        }
    }

    // Normal operator.
    {
        double sym = 0, pos = std::numeric_limits<double>::infinity();
        for (int i = 0; i < 5; ++i) {
            auto rng = seeded_rng(c.seed, std::uint64_t(20 + i));
            VectorField U = random_divergence_free(g, m, rng), W = random_divergence_free(g, m, rng);
            const double nu = norm(U, m, g), nw = norm(W, m, g);
            sym = std::max(sym, std::abs(inner_product(U, A(W), m, g) - inner_product(W, A(U), m, g)) / (nu * nw));
            pos = std::min(pos, inner_product(W, A(W), m, g) / (nw * nw));
        }
        out.checks.push_back(upper("A-symmetry", sym, 1e-6));
        out.checks.push_back(lower("A-positivity", pos, -1e-6));
        if (!rigid(c) || c.pressure != PressureConvention::Standard) {
            out.checks.push_back(skipped("A-eigen", "skipped: needs the standard rigid rotation"));
        } else if (n < 16) {
            out.checks.push_back(skipped("A-eigen", kBelowMin));
        } else {
            VectorField e1 = constant(g, 1.0, 0.0);
            out.checks.push_back(upper("A-eigen", maxabs(A(e1) - c.omega * c.omega * e1), 1e-3));
        }
        if (!rigid(c) || c.omega == 0.0 || c.pressure != PressureConvention::Standard) {
            out.checks.push_back(skipped("Aeps-convergence", "skipped: needs the standard rigid rotation with omega != 0"));
        } else if (c.eps_values.size() < 2) {
            out.checks.push_back(skipped("Aeps-convergence", "skipped: needs two eps values"));
        } else {
            std::vector<double> eps = c.eps_values;
            std::sort(eps.rbegin(), eps.rend());
            const double target = pi * c.omega * c.omega;
            const double e0 = std::abs(a_eps_value(eps[eps.size() - 2], c.evolve.reg.d0, c) - target);
            const double e1 = std::abs(a_eps_value(eps.back(), c.evolve.reg.d0, c) - target);
            out.checks.push_back(lower("Aeps-convergence", order(e0, e1, eps[eps.size() - 2] / eps.back()), 0.9,
                                       "eps-order of <e1, A^eps e1>"));
        }
        auto rng = seeded_rng(c.seed, 30);
        VectorField U = random_divergence_free(g, m, rng), W = random_divergence_free(g, m, rng);
        RegularizationParams reg = c.evolve.reg;
        const double s = std::abs(inner_product(U, apply_Af_eps(b.p[0], W, reg, m, g), m, g) -
                                  inner_product(W, apply_Af_eps(b.p[0], U, reg, m, g), m, g));
        out.checks.push_back(upper("Aeps-symmetry", s / (norm(U, m, g) * norm(W, m, g)), 1e-8));
    }

    // Commutators and Lie identities.
    {
        VectorFamily fam = build_families(g);
        if (n < 32) {
            out.checks.push_back(skipped("commutator-S0", kBelowMin));
            out.checks.push_back(skipped("lie-curl-commute", kBelowMin));
            out.checks.push_back(skipped("lie-divergence-free", kBelowMin));
        } else {
            auto rng = seeded_rng(c.seed, 40);
            VectorField W = random_divergence_free(g, m, rng, 2);
            const double nw = norm(W, m, g);
            const Member S0{MemberKind::S0, 0};
            out.checks.push_back(
                upper("commutator-S0", commutator_residual(fam, S0, b.p[0], W, std::nullopt, m, g) / nw, 1e-8));
            OneForm w = lower_pointwise(m.g, W);
            const double cc = norm(curl(lie_derive(fam, S0, w, g), g) - lie_derive(fam, S0, curl(w, g), g), g) /
                              std::max(norm(curl(w, g), g), 1e-300);
            out.checks.push_back(upper("lie-curl-commute", cc, 1e-8));
            out.checks.push_back(
                upper("lie-divergence-free", divergence_defect(lie_derive(fam, S0, W, g), m, g) / nw, 1e-8));
        }
        if (!rigid(c)) {
            out.checks.push_back(skipped("commutator-S1-eps", "skipped: needs the rigid rotation"));
        } else if (n < 64) {
            out.checks.push_back(skipped("commutator-S1-eps", kBelowMin));
        } else {
            const double r1 = commutator_s1_eps(n, c), r2 = commutator_s1_eps(2 * n, c);
            out.checks.push_back(lower("commutator-S1-eps", order(r1, r2, 2.0), 1.7,
                                       fmt::format("residuals {:.3e} -> {:.3e}", r1, r2)));
        }
    }

    // Data lift: the residual of the lifted series is O(t^(r+1)).
    {
        auto rng = seeded_rng(c.seed, 50);
        VectorField W0 = random_divergence_free(g, m, rng), W1 = random_divergence_free(g, m, rng);
        VectorField F0 = random_vector_field(g, rng);
        auto F = [&](double t) { return std::cos(t) * F0; };
        std::vector<VectorField> Fj{F0, zero(g), -1.0 * F0};
        const int r = std::min(2, bg->max_jet() - 1);
        SeriesLift s = assemble_series(jet_recursion(W0, W1, Fj, r, b, g), r);
        auto R = [&](double t) {
            BackgroundJet bt = bg->at(t, g);
            return maxabs(apply_L1(s.value(t), s.derivative(t, 1), s.derivative(t, 2), bt, g) -
                          project(F(t), bt.metric, g));
        };
        const double a = R(0.1), bb = R(0.05);
        const double scale = 1.0 + maxabs(W0) + maxabs(W1) + maxabs(F0);
        const std::string note = fmt::format("r = {}: |R(0.1)| {:.3e}, |R(0.05)| {:.3e}", r, a, bb);
        if (bb <= 1e-10 * scale)
            out.checks.push_back(upper("data-lift-residual", bb / scale, 1e-10, note + " (round-off)"));
        else
            out.checks.push_back(lower("data-lift-residual", order(a, bb, 2.0), r + 0.7, note + " (order in t)"));
    }

    // Evolution: energy bound, divergence, antisymmetry, curl invariant.
    {
        FreeRunStats s = free_run(c, *bg, g, c.evolve.T_final, c.evolve.dt);
        out.checks.push_back(lower("energy-bound", s.bound.sharp_margin, -1e-2,
                                   fmt::format("relative margin of sqrt E against e^(int n / 2) sqrt E(0); e^(int n) form {:.3e}",
                                               s.bound.margin)));
        out.checks.push_back(upper("divergence-preservation", s.max_div, 10 * c.evolve.solver_tol * 1e2));
        out.checks.push_back(upper("coriolis-antisymmetry", s.antisym, 1e-8));
        if (!rigid(c) || n < 32) {
            out.checks.push_back(skipped("curl-conservation", rigid(c) ? kBelowMin : "skipped: needs the rigid rotation"));
        } else {
            const double dt = 0.64 / n;
            const double d1 = curl_drift_at(n, dt, c), d2 = curl_drift_at(2 * n, dt / 2, c);
            Check ch = lower("curl-conservation", d1 / d2, 3.5, fmt::format("drift {:.3e} -> {:.3e}", d1, d2));
            ch.pass = d2 <= 1e-12 || d1 / d2 >= 3.5;
            out.checks.push_back(ch);
        }
    }

    // Gradient estimate.
    if (n < 32) {
        out.checks.push_back(skipped("gradient-estimate", kBelowMin));
    } else {
        VectorFamily fam = build_families(g);
        double worst = 0;
        for (int i = 0; i < 5; ++i) {
            auto rng = seeded_rng(c.seed, std::uint64_t(60 + i));
            worst = std::max(worst, gradient_estimate_report(random_vector_field(g, rng), fam, b, g).max_ratio);
        }
        out.checks.push_back(upper("gradient-estimate", worst, kGradientRatioBound));
    }
    return out;
}

std::vector<OrderRow> run_convergence(const Config& c) {
    std::vector<int> res = c.resolutions;
    std::sort(res.begin(), res.end());
    res.erase(std::unique(res.begin(), res.end()), res.end());
    if (res.size() < 3) throw ConfigError("grid.resolutions", "a convergence study needs at least three resolutions");
    if (c.eps_values.size() < 3)
        throw ConfigError("diagnostics.eps_values", "a convergence study needs at least three eps values");
    if (!rigid(c) || c.pressure != PressureConvention::Standard)
        throw ConfigError("background.type", "convergence studies use closed forms of the standard rigid rotation");

    auto finish = [](OrderRow row, double floor) {
        const size_t k = row.values.size();
        row.order = order(row.values[k - 2], row.values[k - 1], row.levels[k - 1] / row.levels[k - 2]);
        if (row.levels[k - 1] < row.levels[k - 2]) row.order = -row.order;  // decreasing parameter (eps)
        if (row.values[k - 1] <= floor) row.status = "floor";
        else row.status = row.order >= row.min_order ? "pass" : "fail";
        return row;
    };
    std::vector<OrderRow> rows;
    std::vector<double> levels(res.begin(), res.end());

    OrderRow ell{"elliptic-closed-form", levels, {}, 0, 1.7, ""};
    OrderRow proj{"projection-closed-form", levels, {}, 0, 1.7, ""};
    OrderRow eig{"A-eigen", levels, {}, 0, 1.7, ""};
    OrderRow com{"commutator-S1-eps", levels, {}, 0, 1.7, ""};
    OrderRow cd{"curl-drift", levels, {}, 0, 1.7, ""};
    for (int n : res) {
        Grid g = build_grid(n, n);
        Metric id = Metric::identity(g);
        ScalarField y1 = g.R * g.cos_t, y2 = g.R * g.sin_t;
        ScalarField q = solve_dirichlet(y1, id, g);
        ell.values.push_back((q - y1 * (g.R * g.R - 1.0) / 8.0).abs().maxCoeff());
        VectorField P = project(VectorField{y1, ScalarField::Zero(n, n)}, id, g);
        proj.values.push_back(maxabs(P - VectorField{y1 / 2.0, -y2 / 2.0}));
        BackgroundJet b = rigid_rotation_background(c.omega, c.pressure)->at(0.0, g);
        VectorField e1 = constant(g, 1.0, 0.0);
        eig.values.push_back(maxabs(apply_A(e1, b, g) - c.omega * c.omega * e1));
        com.values.push_back(commutator_s1_eps(n, c));
        cd.values.push_back(curl_drift_at(n, 0.64 / n, c));
    }
    rows.push_back(finish(ell, 1e-12));
    rows.push_back(finish(proj, 1e-10));
    rows.push_back(finish(eig, 1e-10));

    std::vector<double> eps = c.eps_values;
    std::sort(eps.rbegin(), eps.rend());
    OrderRow ae{"Aeps-form", eps, {}, 0, 0.9, ""};
    for (double e : eps) ae.values.push_back(std::abs(a_eps_value(e, c.evolve.reg.d0, c) - pi * c.omega * c.omega));
    rows.push_back(finish(ae, 1e-12));
    rows.push_back(finish(com, 1e-9));
    rows.push_back(finish(cd, 1e-12));

    if (c.time_study) {
        Grid g = build_grid(res[0], res[0]);
        auto bg = rigid_rotation_background(c.omega, c.pressure);
        BackgroundJet b = bg->at(0.0, g);
        auto rng = seeded_rng(c.seed, 700);
        VectorField W0 = constant(g, 1.0, 0.0) + 0.5 * random_divergence_free(g, b.metric, rng, 2);
        EvolveConfig cfg;
        cfg.T_final = 1.0;
        std::vector<State> finals;
        const std::vector<double> dts{0.04, 0.02, 0.01, 0.005};
        for (double dt : dts) {
            cfg.dt = dt;
            finals.push_back(run(W0, zero(g), {}, cfg, *bg, g).final_state);
        }
        // Successive differences stand in for errors.
        OrderRow t{"midpoint-temporal", {}, {}, 0, 1.9, ""};
        for (size_t i = 0; i + 1 < finals.size(); ++i) {
            t.levels.push_back(1.0 / dts[i]);
            t.values.push_back(maxabs(finals[i].W - finals[i + 1].W) + maxabs(finals[i].Wdot - finals[i + 1].Wdot));
        }
        rows.push_back(finish(t, 1e-13));
    }
    return rows;
}

}  // namespace fblin::cli
