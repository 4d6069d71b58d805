#include "fblin/evolution.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "fblin/ops.hpp"
#include "fblin/projection.hpp"

namespace fblin {

const char* to_string(Scheme s) { return s == Scheme::ImplicitMidpoint ? "implicit-midpoint" : "rk4"; }
const char* to_string(OperatorMode m) { return m == OperatorMode::Direct ? "direct" : "regularized"; }

void EvolveConfig::check() const {
    if (!(dt >= 0.0) || !std::isfinite(dt)) throw std::invalid_argument(fmt::format("dt must be >= 0 (got {})", dt));
    if (!(T_final >= 0.0) || !std::isfinite(T_final))
        throw std::invalid_argument(fmt::format("T_final must be >= 0 (got {})", T_final));
    if (mode == OperatorMode::Regularized) reg.check();
    if (reproject_every < 0) throw std::invalid_argument("reproject_every must be >= 0");
    if (lift_order < -1) throw std::invalid_argument("lift order must be >= -1");
    if (!(solver_tol > 0.0) || !(stage_tol > 0.0)) throw std::invalid_argument("tolerances must be positive");
    if (max_stage_iterations < 1) throw std::invalid_argument("max_stage_iterations must be >= 1");
}

std::vector<VectorField> forcing_jets(const Forcing& F, double t, int count, const Grid& grid, double h) {
    std::vector<VectorField> out;
    if (!F) {
        for (int s = 0; s < count; ++s) out.push_back(VectorField::zero(grid.n_r, grid.n_theta));
        return out;
    }
    if (count <= 0) return out;
    VectorField f0 = F(t);
    out.push_back(f0);
    if (count == 1) return out;
    // Five-point central stencils, fourth order.
    VectorField fm2 = F(t - 2 * h), fm1 = F(t - h), fp1 = F(t + h), fp2 = F(t + 2 * h);
    out.push_back((1.0 / (12 * h)) * (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2));
    if (count > 2) out.push_back((1.0 / (12 * h * h)) * (-1.0 * fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2));
    if (count > 3) out.push_back((1.0 / (2 * h * h * h)) * (-1.0 * fm2 + 2.0 * fm1 - 2.0 * fp1 + fp2));
    if (count > 4) throw LiftError("forcing jets above third order are not supported");
    return out;
}

VectorField rhs(const State& s, const VectorField* F, const EvolveConfig& cfg, const BackgroundJet& b,
                const Grid& grid) {
    const Metric& m = b.metric;
    OneForm acc = OneForm::zero(grid.n_r, grid.n_theta);
    if (F) acc = m.flat ? OneForm{F->x, F->y} : lower_pointwise(m.g, *F);
    auto reg = cfg.active_reg();
    acc -= reg ? af_eps_preprojection(b.p[0], s.W, *reg, m, grid) : af_preprojection(b.p[0], s.W, m, grid);
    acc -= lower_pointwise(b.g_dot(), s.Wdot);
    acc += contract(b.omega[0], s.Wdot);
    return project_form(acc, m, grid, cfg.solver_tol);
}

double active_lambda_max(const EvolveConfig& cfg, const BackgroundJet& b, const Grid& grid) {
    auto reg = cfg.active_reg();
    auto op = [&](const VectorField& W) {
        return reg ? apply_Af_eps(b.p[0], W, *reg, b.metric, grid) : apply_A(W, b, grid);
    };
    return power_iteration_lambda_max(op, b.metric, grid);
}

double default_dt(const EvolveConfig& cfg, double lambda_max, const Grid& grid) {
    if (cfg.mode == OperatorMode::Regularized) return 0.5 * std::min(cfg.reg.eps, grid.dr);
    const double root = std::sqrt(std::max(lambda_max, 1e-12));
    return (cfg.scheme == Scheme::RK4 ? 1.9 : 1.0) / root;
}

namespace {

double max_norm(const VectorField& w) { return std::max(w.x.abs().maxCoeff(), w.y.abs().maxCoeff()); }

struct Stepper {
    const EvolveConfig& cfg;
    const Background& bg;
    const Grid& grid;
    std::function<std::optional<VectorField>(double)> forcing;  // reduced-problem forcing
    VectorField last_accel;
    int last_iterations = 0;

    VectorField accel(const State& s, const BackgroundJet& b, const std::optional<VectorField>& F) const {
        return rhs(s, F ? &*F : nullptr, cfg, b, grid);
    }

    State midpoint(const State& s, double dt, int step) {
        const double tm = s.t + 0.5 * dt;
        BackgroundJet b = bg.at(tm, grid);
        auto F = forcing(tm);
        // Warm start from the previous step's acceleration.
        VectorField V = s.Wdot + dt * last_accel;
        VectorField W = s.W + (0.5 * dt) * (s.Wdot + V);
        double first_change = -1.0;
        for (int k = 1; k <= cfg.max_stage_iterations; ++k) {
            State mid{tm, 0.5 * (s.W + W), 0.5 * (s.Wdot + V)};
            VectorField a = accel(mid, b, F);
            VectorField Vn = s.Wdot + dt * a;
            VectorField Wn = s.W + (0.5 * dt) * (s.Wdot + Vn);
            const double change = max_norm(Vn - V) + max_norm(Wn - W);
            const double scale = 1.0 + max_norm(Vn) + max_norm(Wn);
            V = std::move(Vn);
            W = std::move(Wn);
            if (!std::isfinite(change) || (first_change > 0 && change > 1e6 * first_change))
                throw EvolveError(fmt::format("stage iteration diverged at step {}", step), step);
            if (first_change < 0) first_change = std::max(change, 1e-300);
            if (change <= cfg.stage_tol * scale) {
                last_accel = std::move(a);
                last_iterations = k;
                return {s.t + dt, std::move(W), std::move(V)};
            }
        }
        throw EvolveError(fmt::format("stage iteration did not converge in {} iterations at step {}",
                                      cfg.max_stage_iterations, step),
                          step);
    }

    State rk4(const State& s, double dt) {
        auto f = [&](double t, const VectorField& W, const VectorField& V) {
            BackgroundJet b = bg.at(t, grid);
            return accel(State{t, W, V}, b, forcing(t));
        };
        const double h = dt;
        VectorField k1w = s.Wdot, k1v = f(s.t, s.W, s.Wdot);
        VectorField k2w = s.Wdot + (0.5 * h) * k1v, k2v = f(s.t + 0.5 * h, s.W + (0.5 * h) * k1w, k2w);
        VectorField k3w = s.Wdot + (0.5 * h) * k2v, k3v = f(s.t + 0.5 * h, s.W + (0.5 * h) * k2w, k3w);
        VectorField k4w = s.Wdot + h * k3v, k4v = f(s.t + h, s.W + h * k3w, k4w);
        last_iterations = 4;
        return {s.t + h, s.W + (h / 6) * (k1w + 2.0 * k2w + 2.0 * k3w + k4w),
                s.Wdot + (h / 6) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)};
    }
};

}  // namespace

RunResult run(const VectorField& W0, const VectorField& W1, const Forcing& F, const EvolveConfig& cfg,
              const Background& bg, const Grid& grid, const Sink& sink) {
    cfg.check();
    grid.check(W0.x, "run: W0");
    grid.check(W1.x, "run: W1");
    RunResult res;
    BackgroundJet b0 = bg.at(0.0, grid);

    res.lambda_max = std::numeric_limits<double>::quiet_NaN();
    double dt = cfg.dt;
    if (dt == 0.0 || cfg.scheme == Scheme::RK4) {
        if (cfg.mode == OperatorMode::Direct || cfg.scheme == Scheme::RK4)
            res.lambda_max = active_lambda_max(cfg, b0, grid);
        if (dt == 0.0) dt = default_dt(cfg, res.lambda_max, grid);
    }
    if (cfg.scheme == Scheme::RK4 && dt * std::sqrt(res.lambda_max) > 2.0)
        throw EvolveError(fmt::format("dt = {} violates the explicit limit 2/sqrt(lambda_max) = {}", dt,
                                      2.0 / std::sqrt(res.lambda_max)),
                          0);
    const int steps = cfg.T_final > 0.0 ? std::max(1, int(std::ceil(cfg.T_final / dt - 1e-9))) : 0;
    if (steps > 0) dt = cfg.T_final / steps;
    res.dt = dt;
    res.steps = steps;

    const auto nr = grid.n_r, nt = grid.n_theta;
    Stepper st{cfg, bg, grid, {}, VectorField::zero(nr, nt)};
    State s{0.0, W0, W1};
    if (cfg.lift_order >= 0) {
        auto jets = jet_recursion(W0, W1, forcing_jets(F, 0.0, cfg.lift_order + 1, grid), cfg.lift_order, b0, grid,
                                  cfg.active_reg());
        res.lift = assemble_series(std::move(jets), cfg.lift_order);
        s.W = VectorField::zero(nr, nt);
        s.Wdot = VectorField::zero(nr, nt);
        const SeriesLift& lift = *res.lift;
        auto reg = cfg.active_reg();
        st.forcing = [&, reg](double t) -> std::optional<VectorField> {
            BackgroundJet b = bg.at(t, grid);
            VectorField L1 = apply_L1(lift.value(t), lift.derivative(t, 1), lift.derivative(t, 2), b, grid, reg);
            if (F) return F(t) - L1;
            return -L1;
        };
    } else {
        st.forcing = [&](double t) -> std::optional<VectorField> {
            if (F) return F(t);
            return std::nullopt;
        };
    }
    {
        auto Fi = st.forcing(0.0);
        st.last_accel = st.accel(s, b0, Fi);
    }

    auto report = [&](const State& raw) {
        State out = raw;
        if (res.lift) {
            out.W += res.lift->value(raw.t);
            out.Wdot += res.lift->derivative(raw.t, 1);
        }
        return out;
    };
    auto certify = [&](State& x, const Metric& m) {
        x.div_W = divergence_defect(x.W, m, grid);
        x.div_Wdot = divergence_defect(x.Wdot, m, grid);
    };

    StepInfo info;
    certify(s, b0.metric);
    State rep = report(s);
    certify(rep, b0.metric);
    res.states.push_back(rep);
    if (sink) sink(rep, info);

    for (int n = 1; n <= steps; ++n) {
        State next = cfg.scheme == Scheme::ImplicitMidpoint ? st.midpoint(s, dt, n) : st.rk4(s, dt);
        if (n == steps) next.t = cfg.T_final;
        BackgroundJet bn = bg.at(next.t, grid);
        certify(next, bn.metric);
        const double thresh = 10.0 * cfg.solver_tol * (1.0 + norm(next.W, bn.metric, grid) + norm(next.Wdot, bn.metric, grid));
        const bool cadence = cfg.reproject_every > 0 && n % cfg.reproject_every == 0;
        if (cadence || next.div_W > thresh || next.div_Wdot > thresh) {
            next.W = project(next.W, bn.metric, grid, cfg.solver_tol);
            next.Wdot = project(next.Wdot, bn.metric, grid, cfg.solver_tol);
            certify(next, bn.metric);
            ++res.reprojections;
        }
        s = std::move(next);
        info.step = n;
        info.stage_iterations = st.last_iterations;
        info.reprojections = res.reprojections;
        res.max_stage_iterations = std::max(res.max_stage_iterations, st.last_iterations);
        rep = report(s);
        certify(rep, bn.metric);
        res.max_div_defect = std::max({res.max_div_defect, rep.div_W, rep.div_Wdot});
        if (sink) sink(rep, info);
        if (n == steps || (cfg.keep_every > 0 && n % cfg.keep_every == 0)) res.states.push_back(rep);
    }
    res.final_state = rep;
    return res;
}

}  // namespace fblin
