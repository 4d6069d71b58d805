#pragma once

#include "fblin/fields.hpp"

namespace fblin {

class Grid;

// Lagrangian metric data needed by every metric-aware operator.
struct Metric {
    SymTensor g, g_inv;
    ScalarField kappa;
    // True when g is the identity and kappa is one to round-off; selects the
    // direct per-mode elliptic solver.
    bool flat = true;

    static Metric identity(const Grid& grid);
    // Builds g_inv and the flat flag; throws GridError on a non-SPD g.
    static Metric from(SymTensor g, ScalarField kappa);
};

// Throws GridError unless h is positive definite at every node.
void require_spd(const SymTensor& h, const char* what);

}  // namespace fblin
