#pragma once

#include <Eigen/Dense>

namespace fblin {

// Node-sampled scalar: rows are radial rings j, columns are angles k.
using ScalarField = Eigen::ArrayXXd;

// Contravariant Cartesian components (W^1, W^2).
struct VectorField {
    ScalarField x, y;

    VectorField() = default;
    VectorField(ScalarField a, ScalarField b) : x(std::move(a)), y(std::move(b)) {}
    static VectorField zero(Eigen::Index nr, Eigen::Index nt) {
        return {ScalarField::Zero(nr, nt), ScalarField::Zero(nr, nt)};
    }
    static VectorField constant(Eigen::Index nr, Eigen::Index nt, double a, double b) {
        return {ScalarField::Constant(nr, nt, a), ScalarField::Constant(nr, nt, b)};
    }

    VectorField& operator+=(const VectorField& o) { x += o.x; y += o.y; return *this; }
    VectorField& operator-=(const VectorField& o) { x -= o.x; y -= o.y; return *this; }
    VectorField& operator*=(double s) { x *= s; y *= s; return *this; }
};

// Covariant components (w_1, w_2).
struct OneForm {
    ScalarField x, y;

    OneForm() = default;
    OneForm(ScalarField a, ScalarField b) : x(std::move(a)), y(std::move(b)) {}
    static OneForm zero(Eigen::Index nr, Eigen::Index nt) {
        return {ScalarField::Zero(nr, nt), ScalarField::Zero(nr, nt)};
    }

    OneForm& operator+=(const OneForm& o) { x += o.x; y += o.y; return *this; }
    OneForm& operator-=(const OneForm& o) { x -= o.x; y -= o.y; return *this; }
    OneForm& operator*=(double s) { x *= s; y *= s; return *this; }
};

// Two-form in 2D: only beta_12 is stored.
struct TwoForm {
    ScalarField c;

    TwoForm() = default;
    explicit TwoForm(ScalarField v) : c(std::move(v)) {}
    static TwoForm zero(Eigen::Index nr, Eigen::Index nt) { return TwoForm(ScalarField::Zero(nr, nt)); }

    TwoForm& operator+=(const TwoForm& o) { c += o.c; return *this; }
    TwoForm& operator-=(const TwoForm& o) { c -= o.c; return *this; }
    TwoForm& operator*=(double s) { c *= s; return *this; }
};

struct SymTensor {
    ScalarField xx, xy, yy;

    SymTensor() = default;
    SymTensor(ScalarField a, ScalarField b, ScalarField c)
        : xx(std::move(a)), xy(std::move(b)), yy(std::move(c)) {}
    static SymTensor zero(Eigen::Index nr, Eigen::Index nt) {
        return {ScalarField::Zero(nr, nt), ScalarField::Zero(nr, nt), ScalarField::Zero(nr, nt)};
    }
    static SymTensor identity(Eigen::Index nr, Eigen::Index nt) {
        return {ScalarField::Ones(nr, nt), ScalarField::Zero(nr, nt), ScalarField::Ones(nr, nt)};
    }

    SymTensor& operator+=(const SymTensor& o) { xx += o.xx; xy += o.xy; yy += o.yy; return *this; }
    SymTensor& operator-=(const SymTensor& o) { xx -= o.xx; xy -= o.xy; yy -= o.yy; return *this; }
    SymTensor& operator*=(double s) { xx *= s; xy *= s; yy *= s; return *this; }
};

inline VectorField operator+(VectorField a, const VectorField& b) { a += b; return a; }
inline VectorField operator-(VectorField a, const VectorField& b) { a -= b; return a; }
inline VectorField operator*(double s, VectorField a) { a *= s; return a; }
inline VectorField operator-(VectorField a) { a *= -1.0; return a; }
inline OneForm operator+(OneForm a, const OneForm& b) { a += b; return a; }
inline OneForm operator-(OneForm a, const OneForm& b) { a -= b; return a; }
inline OneForm operator*(double s, OneForm a) { a *= s; return a; }
inline TwoForm operator+(TwoForm a, const TwoForm& b) { a += b; return a; }
inline TwoForm operator-(TwoForm a, const TwoForm& b) { a -= b; return a; }
inline TwoForm operator*(double s, TwoForm a) { a *= s; return a; }
inline SymTensor operator+(SymTensor a, const SymTensor& b) { a += b; return a; }
inline SymTensor operator-(SymTensor a, const SymTensor& b) { a -= b; return a; }
inline SymTensor operator*(double s, SymTensor a) { a *= s; return a; }

// Pointwise helpers shared by several modules.
inline ScalarField det(const SymTensor& h) { return h.xx * h.yy - h.xy * h.xy; }

inline SymTensor inverse(const SymTensor& h) {
    ScalarField d = det(h);
    return {h.yy / d, -h.xy / d, h.xx / d};
}

inline OneForm lower_pointwise(const SymTensor& g, const VectorField& w) {
    return {g.xx * w.x + g.xy * w.y, g.xy * w.x + g.yy * w.y};
}

inline VectorField raise_pointwise(const SymTensor& ginv, const OneForm& w) {
    return {ginv.xx * w.x + ginv.xy * w.y, ginv.xy * w.x + ginv.yy * w.y};
}

// (alpha W)_a = alpha_ab W^b for a two-form.
inline OneForm contract(const TwoForm& a, const VectorField& w) { return {a.c * w.y, -a.c * w.x}; }

}  // namespace fblin
