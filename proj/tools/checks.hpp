#pragma once

#include <string>
#include <vector>

#include "config.hpp"

namespace fblin::cli {

struct Check {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    std::string relation = "<=";  // value relation bound
    bool pass = true;
    bool skipped = false;
    std::string note;
};

struct Battery {
    std::vector<Check> checks;
    std::vector<std::string> warnings;
    bool ok() const;
    std::vector<std::string> failures() const;
};

// The invariant battery behind `verify`.
Battery run_verification(const Config& c);

struct OrderRow {
    std::string study;
    std::vector<double> levels;  // resolutions, eps values or steps
    std::vector<double> values;  // errors or residuals
    double order = 0.0;          // from the finest pair
    double min_order = 0.0;
    std::string status;          // pass | floor | fail
};

// Convergence studies behind `converge`.  Needs at least three resolutions.
std::vector<OrderRow> run_convergence(const Config& c);

}  // namespace fblin::cli
