#pragma once

#include <cmath>

#include "fblin/fields.hpp"
#include "fblin/grid.hpp"

namespace fblin::test {

inline ScalarField y1(const Grid& g) { return g.R * g.cos_t; }
inline ScalarField y2(const Grid& g) { return g.R * g.sin_t; }
inline VectorField e1(const Grid& g) { return VectorField::constant(g.n_r, g.n_theta, 1.0, 0.0); }
inline VectorField e2(const Grid& g) { return VectorField::constant(g.n_r, g.n_theta, 0.0, 1.0); }
inline VectorField rotation(const Grid& g) { return {-y2(g), y1(g)}; }
inline double maxabs(const ScalarField& f) { return f.abs().maxCoeff(); }
inline double maxabs(const VectorField& w) { return std::max(maxabs(w.x), maxabs(w.y)); }
// Max over nodes with r <= rmax.
inline double maxabs_interior(const VectorField& w, const Grid& g, double rmax) {
    double m = 0.0;
    for (int j = 0; j < g.n_r; ++j)
        if (g.r(j) <= rmax) m = std::max({m, w.x.row(j).abs().maxCoeff(), w.y.row(j).abs().maxCoeff()});
    return m;
}

}  // namespace fblin::test
