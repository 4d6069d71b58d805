#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "fblin/background.hpp"
#include "fblin/evolution.hpp"
#include "fblin/grid.hpp"

namespace fblin::cli {

class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& key, const std::string& msg)
        : std::runtime_error(key.empty() ? msg : key + ": " + msg), key_(key) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

struct Config {
    // [background]
    std::string background = "rigid_rotation";  // or "tabulated"
    double omega = 1.0;
    PressureConvention pressure = PressureConvention::Standard;
    std::string table;  // CSV path for tabulated backgrounds
    int max_jet = kDefaultMaxJet;

    // [grid]
    int n_r = 64, n_theta = 64;
    std::vector<int> resolutions{32, 64, 128};  // convergence study

    // [evolve]
    EvolveConfig evolve;
    std::string data = "e1";  // e1 | rotation | random | zero
    double data_scale = 1.0;
    std::string forcing = "none";  // none | gradient
    double forcing_scale = 1.0;

    // [diagnostics]
    int tangential_order = 1;
    int curl_order = 1;
    int every = 1;  // CSV row stride in steps
    std::vector<double> eps_values{0.2, 0.1, 0.05};
    bool time_study = false;
    std::string fault = "none";  // test hook: a_sign

    std::uint64_t seed = 0;
    std::map<std::string, std::string> echo;  // "section.key" -> raw value, as read
};

// Parses "key = value" lines under [background], [grid], [evolve] and
// [diagnostics].  Unknown sections or keys, duplicates and invalid values
// throw ConfigError naming the key.
Config load_config(const std::string& path);
Config parse_config(const std::string& text);

std::shared_ptr<const Background> make_background(const Config& c);
Grid make_grid(const Config& c);

}  // namespace fblin::cli
