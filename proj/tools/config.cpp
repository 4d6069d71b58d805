#include "config.hpp"

#include <algorithm>
#include <cctype>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace fblin::cli {

namespace {

using Setter = std::function<void(Config&, const std::vector<std::string>&)>;

std::string single(const std::string& key, const std::vector<std::string>& v) {
    if (v.size() != 1) throw ConfigError(key, "expected a single value");
    return v[0];
}

double to_double(const std::string& key, const std::string& s) {
    size_t pos = 0;
    double x;
    try {
        x = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ConfigError(key, fmt::format("'{}' is not a number", s));
    }
    if (pos != s.size() || !std::isfinite(x)) throw ConfigError(key, fmt::format("'{}' is not a number", s));
    return x;
}

int to_int(const std::string& key, const std::string& s) {
    size_t pos = 0;
    long x;
    try {
        x = std::stol(s, &pos);
    } catch (const std::exception&) {
        throw ConfigError(key, fmt::format("'{}' is not an integer", s));
    }
    if (pos != s.size() || x < -1000000 || x > 1000000) throw ConfigError(key, fmt::format("'{}' is not an integer", s));
    return int(x);
}

bool to_bool(const std::string& key, const std::string& s) {
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError(key, fmt::format("'{}' is not a boolean", s));
}

std::string one_of(const std::string& key, const std::string& s, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed)
        if (s == a) return s;
    std::string list;
    for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
    throw ConfigError(key, fmt::format("'{}' is not one of {}", s, list));
}

Setter real(double Config::*field) {
    return [field](Config& c, const std::vector<std::string>& v) { c.*field = to_double("", single("", v)); };
}

const std::map<std::string, Setter>& schema() {
    static const std::map<std::string, Setter> s{
        {"background.type",
         [](Config& c, const auto& v) { c.background = one_of("", single("", v), {"rigid_rotation", "tabulated"}); }},
        {"background.omega", real(&Config::omega)},
        {"background.pressure",
         [](Config& c, const auto& v) {
             c.pressure = one_of("", single("", v), {"standard", "euler_consistent"}) == "standard"
                              ? PressureConvention::Standard
                              : PressureConvention::EulerConsistent;
         }},
        {"background.table", [](Config& c, const auto& v) { c.table = single("", v); }},
        {"background.max_jet", [](Config& c, const auto& v) { c.max_jet = to_int("", single("", v)); }},
        {"grid.n_r", [](Config& c, const auto& v) { c.n_r = to_int("", single("", v)); }},
        {"grid.n_theta", [](Config& c, const auto& v) { c.n_theta = to_int("", single("", v)); }},
        {"grid.resolutions",
         [](Config& c, const auto& v) {
             c.resolutions.clear();
             for (const auto& x : v) c.resolutions.push_back(to_int("", x));
         }},
        {"evolve.scheme",
         [](Config& c, const auto& v) {
             c.evolve.scheme = one_of("", single("", v), {"midpoint", "rk4"}) == "midpoint" ? Scheme::ImplicitMidpoint
                                                                                           : Scheme::RK4;
         }},
        {"evolve.mode",
         [](Config& c, const auto& v) {
             c.evolve.mode = one_of("", single("", v), {"direct", "regularized"}) == "direct"
                                 ? OperatorMode::Direct
                                 : OperatorMode::Regularized;
         }},
        {"evolve.eps", [](Config& c, const auto& v) { c.evolve.reg.eps = to_double("", single("", v)); }},
        {"evolve.d0", [](Config& c, const auto& v) { c.evolve.reg.d0 = to_double("", single("", v)); }},
        {"evolve.dt", [](Config& c, const auto& v) { c.evolve.dt = to_double("", single("", v)); }},
        {"evolve.t", [](Config& c, const auto& v) { c.evolve.T_final = to_double("", single("", v)); }},
        {"evolve.lift_order", [](Config& c, const auto& v) { c.evolve.lift_order = to_int("", single("", v)); }},
        {"evolve.reproject_every",
         [](Config& c, const auto& v) { c.evolve.reproject_every = to_int("", single("", v)); }},
        {"evolve.solver_tol", [](Config& c, const auto& v) { c.evolve.solver_tol = to_double("", single("", v)); }},
        {"evolve.data",
         [](Config& c, const auto& v) { c.data = one_of("", single("", v), {"e1", "rotation", "random", "zero"}); }},
        {"evolve.data_scale", real(&Config::data_scale)},
        {"evolve.forcing", [](Config& c, const auto& v) { c.forcing = one_of("", single("", v), {"none", "gradient"}); }},
        {"evolve.forcing_scale", real(&Config::forcing_scale)},
        {"diagnostics.tangential_order",
         [](Config& c, const auto& v) { c.tangential_order = to_int("", single("", v)); }},
        {"diagnostics.curl_order", [](Config& c, const auto& v) { c.curl_order = to_int("", single("", v)); }},
        {"diagnostics.every", [](Config& c, const auto& v) { c.every = to_int("", single("", v)); }},
        {"diagnostics.eps_values",
         [](Config& c, const auto& v) {
             c.eps_values.clear();
             for (const auto& x : v) c.eps_values.push_back(to_double("", x));
         }},
        {"diagnostics.time_study", [](Config& c, const auto& v) { c.time_study = to_bool("", single("", v)); }},
        {"diagnostics.fault", [](Config& c, const auto& v) { c.fault = one_of("", single("", v), {"none", "a_sign"}); }},
    };
    return s;
}

void validate(const Config& c) {
    auto fail = [](const char* key, const std::string& msg) { throw ConfigError(key, msg); };
    if (c.n_r < 8) fail("grid.n_r", fmt::format("must be >= 8 (got {})", c.n_r));
    if (c.n_theta < 4 || c.n_theta % 2) fail("grid.n_theta", fmt::format("must be even and >= 4 (got {})", c.n_theta));
    for (int n : c.resolutions)
        if (n < 8 || n % 2) fail("grid.resolutions", fmt::format("entries must be even and >= 8 (got {})", n));
    if (c.max_jet < 1 || c.max_jet > 8) fail("background.max_jet", "must be in [1, 8]");
    if (c.background == "tabulated" && c.table.empty()) fail("background.table", "required for tabulated backgrounds");
    const auto& e = c.evolve;
    if (!(e.reg.d0 > 0.0) || e.reg.d0 > 1.0) fail("evolve.d0", fmt::format("must be in (0, 1] (got {})", e.reg.d0));
    if (!(e.reg.eps > 0.0) || e.reg.eps > e.reg.d0 / 2)
        fail("evolve.eps", fmt::format("must be in (0, d0/2] = (0, {}] (got {})", e.reg.d0 / 2, e.reg.eps));
    if (e.dt < 0.0) fail("evolve.dt", "must be >= 0 (0 picks the default)");
    if (!(e.T_final > 0.0)) fail("evolve.T", "must be positive");
    if (e.lift_order < -1 || e.lift_order > c.max_jet - 1)
        fail("evolve.lift_order", fmt::format("must be in [-1, max_jet - 1] = [-1, {}]", c.max_jet - 1));
    if (e.reproject_every < 0) fail("evolve.reproject_every", "must be >= 0");
    if (!(e.solver_tol > 0.0) || e.solver_tol > 1e-4) fail("evolve.solver_tol", "must be in (0, 1e-4]");
    if (c.tangential_order < 0 || c.tangential_order > 2) fail("diagnostics.tangential_order", "must be in [0, 2]");
    if (c.curl_order < 0 || c.curl_order > 2) fail("diagnostics.curl_order", "must be in [0, 2]");
    if (c.every < 1) fail("diagnostics.every", "must be >= 1");
    for (double eps : c.eps_values)
        if (!(eps > 0.0) || eps > e.reg.d0 / 2)
            fail("diagnostics.eps_values", fmt::format("entries must be in (0, d0/2] (got {})", eps));
}

Config from_items(const std::vector<CLI::ConfigItem>& items) {
    Config c;
    std::set<std::string> seen;
    for (const auto& it : items) {
        if (it.name == "++" || it.name == "--") continue;
        if (it.parents.size() != 1) throw ConfigError(it.name, "keys must sit inside a [section]");
        std::string key = it.parents[0] + "." + it.name;
        std::transform(key.begin(), key.end(), key.begin(), [](unsigned char ch) { return std::tolower(ch); });
        auto s = schema().find(key);
        if (s == schema().end()) throw ConfigError(key, "unknown key");
        if (!seen.insert(key).second) throw ConfigError(key, "duplicate key");
        if (it.inputs.empty()) throw ConfigError(key, "missing value");
        try {
            s->second(c, it.inputs);
        } catch (const ConfigError& e) {
            throw ConfigError(key, e.what());
        }
        std::string raw;
        for (const auto& x : it.inputs) raw += (raw.empty() ? "" : ",") + x;
        c.echo[key] = raw;
    }
    validate(c);
    return c;
}

}  // namespace

Config parse_config(const std::string& text) {
    std::istringstream in(text);
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigINI().from_config(in);
    } catch (const CLI::Error& e) {
        throw ConfigError("", fmt::format("malformed config: {}", e.what()));
    }
    return from_items(items);
}

Config load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("", fmt::format("cannot read config '{}'", path));
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::shared_ptr<const Background> make_background(const Config& c) {
    if (c.background == "tabulated") return load_tabulated_background(c.table, c.n_r, c.n_theta, c.max_jet);
    return rigid_rotation_background(c.omega, c.pressure, c.max_jet);
}

Grid make_grid(const Config& c) { return build_grid(c.n_r, c.n_theta); }

}  // namespace fblin::cli
