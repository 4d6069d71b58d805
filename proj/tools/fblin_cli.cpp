#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/os.h>
#include <json.hpp>

#include "checks.hpp"
#include "config.hpp"
#include "fblin/diagnostics.hpp"
#include "fblin/elliptic.hpp"
#include "fblin/evolution.hpp"
#include "fblin/families.hpp"
#include "fblin/normal_ops.hpp"
#include "fblin/ops.hpp"
#include "fblin/projection.hpp"
#include "fblin/random_fields.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace fblin;
using namespace fblin::cli;

namespace {

enum Exit { kOk = 0, kConfig = 1, kSolver = 2, kVerify = 3, kConverge = 4 };

struct Options {
    std::string config;
    std::string out = ".";
    int dump_fields = 0;
    std::optional<std::uint64_t> seed;
};

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string csv(double v) { return fmt::format("{:.10e}", v); }

json config_echo(const Config& c) {
    json j = json::object();
    for (const auto& [k, v] : c.echo) j[k] = v;
    j["seed"] = c.seed;
    return j;
}

json background_json(const BackgroundReport& rep, const Config& c, std::vector<std::string>& warnings) {
    json j{{"name", c.background},
           {"euler_residual", num(rep.euler_residual)},
           {"volume_residual", num(rep.volume_residual)},
           {"poisson_residual", num(rep.poisson_residual)},
           {"boundary_pressure", num(rep.boundary_pressure)},
           {"c0", num(rep.c0)}};
    json fails = json::array();
    for (auto f : rep.failures) fails.push_back(to_string(f));
    j["failures"] = fails;
    for (auto f : rep.failures) {
        if (f == BackgroundFailure::SignCondition)
            warnings.push_back(fmt::format("c0 = {:.3g}: the sign condition c0 > 0 fails", rep.c0 + 0.0));
        else
            warnings.push_back(fmt::format("background check '{}' fails", to_string(f)));
    }
    return j;
}

VectorField initial_data(const Config& c, const Grid& g, const Metric& m) {
    if (c.data == "zero") return VectorField::zero(g.n_r, g.n_theta);
    if (c.data == "rotation") return c.data_scale * VectorField{-g.R * g.sin_t, g.R * g.cos_t};
    if (c.data == "random") {
        auto rng = seeded_rng(c.seed, 0);
        return c.data_scale * random_divergence_free(g, m, rng, 2);
    }
    return VectorField::constant(g.n_r, g.n_theta, c.data_scale, 0.0);
}

// Gradient of a potential vanishing on the boundary; projects to zero.
Forcing make_forcing(const Config& c, const Grid& g, const Metric& m) {
    if (c.forcing == "none") return {};
    ScalarField q = 0.5 * (1.0 - g.R * g.R) * g.R * g.cos_t;
    VectorField G = c.forcing_scale * raise(grad_dirichlet(q, g), m.g_inv);
    return [G](double t) { return std::cos(t) * G; };
}

void dump_fields(const fs::path& dir, int step, const State& s, const Grid& g) {
    auto f = fmt::output_file((dir / fmt::format("fields_{:06d}.csv", step)).string());
    f.print("t,j,k,r,theta,W_x,W_y,Wdot_x,Wdot_y\n");
    for (int j = 0; j < g.n_r; ++j)
        for (int k = 0; k < g.n_theta; ++k)
            f.print("{},{},{},{},{},{},{},{},{}\n", csv(s.t), j, k, csv(g.r[j]), csv(g.theta[k]), csv(s.W.x(j, k)),
                    csv(s.W.y(j, k)), csv(s.Wdot.x(j, k)), csv(s.Wdot.y(j, k)));
}

int cmd_run(const Config& c, const Options& o) {
    const auto start = std::chrono::steady_clock::now();
    const fs::path dir(o.out);
    fs::create_directories(dir);
    auto bg = make_background(c);
    Grid g = make_grid(c);
    BackgroundJet b0 = bg->at(0.0, g);
    std::vector<std::string> warnings;
    json report;
    report["command"] = "run";
    report["config"] = config_echo(c);
    report["background"] = background_json(validate_background(b0, g), c, warnings);

    VectorField W0 = project(initial_data(c, g, b0.metric), b0.metric, g);
    VectorField W1 = VectorField::zero(g.n_r, g.n_theta);
    Forcing F = make_forcing(c, g, b0.metric);
    auto reg = c.evolve.active_reg();
    VectorFamily fam = build_families(g, c.evolve.reg.d0);
    const int jet_order = std::max(c.tangential_order, c.curl_order) + 1;

    auto tangential = [&](const State& st, const BackgroundJet& b) {
        std::vector<VectorField> Fj = F ? forcing_jets(F, st.t, jet_order, g) : std::vector<VectorField>{};
        auto jets = state_jets(st, Fj, jet_order, b, g, reg);
        return std::make_pair(energy_tangential(jets, fam, c.tangential_order, b, g, reg),
                              curl_seminorms(jets, fam, c.curl_order, b, g));
    };

    std::ofstream traj(dir / "trajectory.csv");
    traj << "t,E,E1_tang,C1_curl,curl_invariant_drift,div_defect,reproj_count\n";
    std::vector<EnergySample> samples;
    CurlDrift drift;
    int reproj = 0, last_row = -1, last_dump = -1;
    State last;
    auto sink = [&](const State& st, const StepInfo& info) {
        BackgroundJet b = bg->at(st.t, g);
        reproj += info.reprojections;
        const double E = energy_base(st, b, g, reg);
        const double Fn = F ? norm(project(F(st.t), b.metric, g), b.metric, g) : 0.0;
        samples.push_back({st.t, E, growth_coefficient(b, g), Fn});
        drift.add(st, b, g);
        last = st;
        if (info.step % c.every == 0) {
            auto [te, cr] = tangential(st, b);
            traj << csv(st.t) << ',' << csv(E) << ',' << csv(te.E_total) << ',' << csv(cr.C) << ','
                 << csv(drift.drift()) << ',' << csv(std::max(st.div_W, st.div_Wdot)) << ',' << reproj << '\n';
            last_row = info.step;
        }
        if (o.dump_fields > 0 && info.step % o.dump_fields == 0) {
            dump_fields(dir, info.step, st, g);
            last_dump = info.step;
        }
    };
    RunResult r = run(W0, W1, F, c.evolve, *bg, g, sink);

    BackgroundJet bT = bg->at(r.final_state.t, g);
    auto [te, cr] = tangential(r.final_state, bT);
    if (last_row != r.steps) {
        traj << csv(r.final_state.t) << ',' << csv(energy_base(r.final_state, bT, g, reg)) << ','
             << csv(te.E_total) << ',' << csv(cr.C) << ',' << csv(drift.drift()) << ','
             << csv(std::max(r.final_state.div_W, r.final_state.div_Wdot)) << ',' << reproj << '\n';
    }
    if (o.dump_fields > 0 && last_dump != r.steps) dump_fields(dir, r.steps, r.final_state, g);

    BoundCheck bc = energy_bound_check(samples);
    json indices = json::array();
    for (const auto& ie : te.per_index)
        indices.push_back({{"I", label(ie.I)}, {"E", num(ie.E)}, {"D", num(ie.D)}, {"D_bound", num(ie.D_bound)}});
    report["grid"] = {{"n_r", g.n_r}, {"n_theta", g.n_theta}};
    report["evolution"] = {{"scheme", to_string(c.evolve.scheme)},
                           {"mode", to_string(c.evolve.mode)},
                           {"dt", num(r.dt)},
                           {"steps", r.steps},
                           {"T", num(r.final_state.t)},
                           {"lambda_max", num(r.lambda_max)},
                           {"lift_order", c.evolve.lift_order},
                           {"reprojections", r.reprojections},
                           {"max_div_defect", num(r.max_div_defect)},
                           {"max_stage_iterations", r.max_stage_iterations}};
    report["energy"] = {
        {"t", num(r.final_state.t)},
        {"E", num(samples.back().E)},
        {"E0", num(samples.front().E)},
        {"growth_coefficient", num(samples.back().n)},
        {"tangential", {{"order", c.tangential_order}, {"E_total", num(te.E_total)}, {"indices", indices}}},
        {"curl",
         {{"order", c.curl_order},
          {"C", num(cr.C)},
          {"mixed_norm", num(cr.mixed_norm)},
          {"mixed_norm_dot", num(cr.mixed_norm_dot)},
          {"a_seminorm", num(cr.a_seminorm)}}},
        {"curl_invariant_drift", num(drift.drift())},
        {"bound",
         {{"pass", bc.pass}, {"margin", num(bc.margin)}, {"sharp_margin", num(bc.sharp_margin)}, {"worst_t", num(bc.worst_t)}}}};
    report["warnings"] = warnings;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report["metadata"] = {{"wall_seconds", secs}};
    std::ofstream(dir / "report.json") << report.dump(2) << '\n';
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    std::cout << fmt::format("run: {} steps to t = {:.6g}, E = {:.6e}, bound {}\n", r.steps, r.final_state.t,
                             samples.back().E, bc.pass ? "holds" : "violated");
    return kOk;
}

int cmd_verify(const Config& c, const Options& o) {
    Battery bat = run_verification(c);
    json j;
    j["command"] = "verify";
    j["config"] = config_echo(c);
    j["checks"] = json::array();
    for (const auto& ch : bat.checks) {
        std::string status = ch.skipped ? "skipped" : (ch.pass ? "pass" : "FAIL");
        if (ch.skipped)
            std::cout << fmt::format("{:<26} {:<7} {}\n", ch.name, status, ch.note);
        else
            std::cout << fmt::format("{:<26} {:<7} {:>10.3e} {} {:<8.3g} {}\n", ch.name, status, ch.value, ch.relation,
                                     ch.bound, ch.note);
        j["checks"].push_back({{"name", ch.name},
                               {"value", num(ch.value)},
                               {"bound", ch.bound},
                               {"relation", ch.relation},
                               {"status", ch.skipped ? "skipped" : (ch.pass ? "pass" : "fail")},
                               {"note", ch.note}});
    }
    j["warnings"] = bat.warnings;
    for (const auto& w : bat.warnings) std::cerr << "warning: " << w << '\n';
    fs::create_directories(o.out);
    std::ofstream(fs::path(o.out) / "verify.json") << j.dump(2) << '\n';
    if (!bat.ok()) {
        std::string names;
        for (const auto& n : bat.failures()) names += (names.empty() ? "" : ", ") + n;
        std::cerr << "verify failed: " << names << '\n';
        return kVerify;
    }
    return kOk;
}

int cmd_converge(const Config& c, const Options& o) {
    auto rows = run_convergence(c);
    fs::create_directories(o.out);
    std::ofstream out(fs::path(o.out) / "convergence.csv");
    out << "study,levels,values,order,min_order,status\n";
    bool ok = true;
    for (const auto& r : rows) {
        std::string lv, vv;
        for (size_t i = 0; i < r.levels.size(); ++i) {
            lv += (i ? ";" : "") + fmt::format("{:g}", r.levels[i]);
            vv += (i ? ";" : "") + fmt::format("{:.6e}", r.values[i]);
        }
        out << r.study << ',' << lv << ',' << vv << ',' << fmt::format("{:.4f}", r.order) << ',' << r.min_order << ','
            << r.status << '\n';
        std::cout << fmt::format("{:<24} order {:>6.2f} (min {:.1f}) {:<5} [{}]\n", r.study, r.order, r.min_order,
                                 r.status, vv);
        ok = ok && r.status != "fail";
    }
    if (!ok) {
        std::cerr << "converge: order shortfall\n";
        return kConverge;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linearized free-boundary Euler solver on the unit disk"};
    app.require_subcommand(1);
    Options o;
    app.add_option("--out", o.out, "output directory")->capture_default_str();
    app.add_option("--dump-fields", o.dump_fields, "write W and its time derivative every N steps")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--seed", o.seed, "seed for random data and checks");
    std::string cmd;
    for (const char* name : {"run", "verify", "converge"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("config", o.config, "INI configuration")->required();
        sub->fallthrough();
        sub->callback([&cmd, name] { cmd = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    Config c;
    try {
        c = load_config(o.config);
        if (o.seed) c.seed = *o.seed;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    }

    try {
        if (cmd == "run") return cmd_run(c, o);
        if (cmd == "verify") return cmd_verify(c, o);
        return cmd_converge(c, o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const EvolveError& e) {
        std::cerr << "solver failure at step " << e.step() << ": " << e.what() << '\n';
        return kSolver;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kSolver;
    } catch (const std::exception& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kSolver;
    }
}
