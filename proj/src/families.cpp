#include "fblin/families.hpp"

#include <cmath>
#include <functional>

#include <fmt/format.h>

#include "fblin/ops.hpp"

namespace fblin {

std::string Member::label() const {
    switch (kind) {
        case MemberKind::S0: return "S0";
        case MemberKind::S1: return fmt::format("S1.{}", index);
        case MemberKind::R: return "R";
        case MemberKind::Dt: return "Dt";
    }
    return "?";
}

std::vector<Member> VectorFamily::S() const {
    std::vector<Member> out{{MemberKind::S0, 0}};
    for (int i = 0; i < n_s1; ++i) out.push_back({MemberKind::S1, i});
    return out;
}

std::vector<Member> VectorFamily::T() const {
    auto out = S();
    out.push_back({MemberKind::Dt, 0});
    return out;
}

std::vector<Member> VectorFamily::all() const {
    auto out = T();
    out.push_back({MemberKind::R, 0});
    return out;
}

VectorField VectorFamily::field(Member m, const Grid& grid) const {
    switch (m.kind) {
        case MemberKind::S0: return s0;
        case MemberKind::S1: return s1.at(size_t(m.index));
        case MemberKind::R: return {c1 * grid.R * grid.cos_t, c1 * grid.R * grid.sin_t};
        case MemberKind::Dt: break;
    }
    throw LieError("D_t is not a vector field on the disk");
}

Member VectorFamily::parse(const std::string& s) const {
    if (s == "S0") return {MemberKind::S0, 0};
    if (s == "R") return {MemberKind::R, 0};
    if (s == "Dt") return {MemberKind::Dt, 0};
    if (s.rfind("S1.", 0) == 0) {
        int i = std::stoi(s.substr(3));
        if (i >= 0 && i < n_s1) return {MemberKind::S1, i};
    }
    throw LieError(fmt::format("unknown family label '{}'", s));
}

namespace {

// C-infinity transition psi = a / (a + b), a = exp(-1/z), b = exp(-1/(1-z)),
// with its first two derivatives.
struct Blend {
    double v, d1, d2;
};
Blend blend(double z) {
    if (z <= 0.0) return {0.0, 0.0, 0.0};
    if (z >= 1.0) return {1.0, 0.0, 0.0};
    const double w = 1.0 - z;
    const double a = std::exp(-1.0 / z), b = std::exp(-1.0 / w);
    const double a1 = a / (z * z), a2 = a * (1.0 / std::pow(z, 4) - 2.0 / std::pow(z, 3));
    const double b1 = -b / (w * w), b2 = b * (1.0 / std::pow(w, 4) - 2.0 / std::pow(w, 3));
    const double s = a + b, N = a1 * b - a * b1, D = s * s;
    const double N1 = a2 * b - a * b2, D1 = 2.0 * s * (a1 + b1);
    return {a / s, N / D, (N1 * D - N * D1) / (D * D)};
}

// f = 1 on |s| <= 1/4, 0 on |s| >= 1/2; g = s f.
struct Profile {
    double f, fp, fpp;
};
Profile bump(double s) {
    double a = std::abs(s), sg = s < 0 ? -1.0 : 1.0;
    Blend b = blend(4.0 * (a - 0.25));
    return {1.0 - b.v, -4.0 * b.d1 * sg, -16.0 * b.d2};
}

}  // namespace

PatternSample interior_pattern(double y1, double y2, int k, int count, double scale) {
    const double phi = k * M_PI / count, c = std::cos(phi), s = std::sin(phi);
    // Rotated, scaled coordinates.
    const double u = (c * y1 + s * y2) / scale, v = (-s * y1 + c * y2) / scale;
    Profile fu = bump(u), fv = bump(v);
    double g = v * fv.f, gp = fv.f + v * fv.fp, gpp = 2.0 * fv.fp + v * fv.fpp;
    double X1 = fu.f * gp, X2 = -fu.fp * g;
    // d(X1, X2)/d(u, v)
    double a11 = fu.fp * gp, a12 = fu.f * gpp, a21 = -fu.fpp * g, a22 = -fu.fp * gp;
    // Back to y: X = Rot X~ and J_y = Rot J_uv Rot^T / scale.
    auto rot = [&](double p, double q) { return std::pair{c * p - s * q, s * p + c * q}; };
    auto [x, y] = rot(X1, X2);
    // M = J_uv Rot^T
    double m11 = a11 * c - a12 * s, m12 = a11 * s + a12 * c;
    double m21 = a21 * c - a22 * s, m22 = a21 * s + a22 * c;
    double j11 = (c * m11 - s * m21) / scale, j12 = (c * m12 - s * m22) / scale;
    double j21 = (s * m11 + c * m21) / scale, j22 = (s * m12 + c * m22) / scale;
    return {x, y, j11, j12, j21, j22};
}

VectorFamily build_families(const Grid& grid, double d0, double c1) {
    if (!(d0 > 0.0 && d0 < 1.0)) throw LieError(fmt::format("d0 = {} outside (0, 1)", d0));
    if (!(c1 > 0.0)) throw LieError(fmt::format("c1 = {} must be positive", c1));
    VectorFamily fam;
    fam.d0 = d0;
    fam.c1 = c1;
    fam.n_s1 = kInteriorFields;
    fam.s0 = {-grid.R * grid.sin_t, grid.R * grid.cos_t};
    const auto nr = grid.n_r, nt = grid.n_theta;
    for (int k = 0; k < kInteriorFields; ++k) {
        VectorField X = VectorField::zero(nr, nt);
        MatrixField J = MatrixField::zero(nr, nt);
        for (int j = 0; j < nr; ++j)
            for (int a = 0; a < nt; ++a) {
                PatternSample p = interior_pattern(grid.R(j, a) * grid.cos_t(j, a), grid.R(j, a) * grid.sin_t(j, a), k);
                X.x(j, a) = p.x;
                X.y(j, a) = p.y;
                J.a11(j, a) = p.dxdx;
                J.a12(j, a) = p.dxdy;
                J.a21(j, a) = p.dydx;
                J.a22(j, a) = p.dydy;
            }
        fam.s1.push_back(std::move(X));
        fam.s1_jac.push_back(std::move(J));
    }
    return fam;
}

namespace {

// Directional derivative T.d and the Jacobian d_a T^c of a spatial member.
struct Flow {
    std::function<ScalarField(const ScalarField&)> along;
    MatrixField jac;  // a{c}{a} = d_a T^c
};

Flow flow_of(const VectorFamily& fam, Member T, const Grid& grid) {
    const auto nr = grid.n_r, nt = grid.n_theta;
    switch (T.kind) {
        case MemberKind::S0: {
            ScalarField z = ScalarField::Zero(nr, nt), o = ScalarField::Ones(nr, nt);
            return {[&grid](const ScalarField& f) -> ScalarField { return d_theta(f, grid); }, {z, -o, o, z}};
        }
        case MemberKind::R: {
            MatrixField J = MatrixField::identity(nr, nt);
            double c1 = fam.c1;
            J.a11 *= c1;
            J.a22 *= c1;
            return {[&grid, c1](const ScalarField& f) -> ScalarField { return c1 * grid.R * d_r(f, grid); }, J};
        }
        case MemberKind::S1: {
            const VectorField& X = fam.s1.at(size_t(T.index));
            return {[&grid, &X](const ScalarField& f) -> ScalarField { return X.x * d_x(f, grid) + X.y * d_y(f, grid); },
                    fam.s1_jac.at(size_t(T.index))};
        }
        case MemberKind::Dt: break;
    }
    throw LieError("D_t needs a time jet; use the jet overload");
}

}  // namespace

ScalarField lie_derive(const VectorFamily& fam, Member T, const ScalarField& f, const Grid& grid) {
    return flow_of(fam, T, grid).along(f);
}

VectorField lie_derive(const VectorFamily& fam, Member T, const VectorField& W, const Grid& grid) {
    Flow F = flow_of(fam, T, grid);
    const MatrixField& J = F.jac;
    return {F.along(W.x) - J.a11 * W.x - J.a12 * W.y, F.along(W.y) - J.a21 * W.x - J.a22 * W.y};
}

OneForm lie_derive(const VectorFamily& fam, Member T, const OneForm& w, const Grid& grid) {
    Flow F = flow_of(fam, T, grid);
    const MatrixField& J = F.jac;
    return {F.along(w.x) + J.a11 * w.x + J.a21 * w.y, F.along(w.y) + J.a12 * w.x + J.a22 * w.y};
}

TwoForm lie_derive(const VectorFamily& fam, Member T, const TwoForm& b, const Grid& grid) {
    Flow F = flow_of(fam, T, grid);
    return TwoForm(F.along(b.c) + (F.jac.a11 + F.jac.a22) * b.c);
}

SymTensor lie_derive(const VectorFamily& fam, Member T, const SymTensor& h, const Grid& grid) {
    Flow F = flow_of(fam, T, grid);
    const MatrixField& J = F.jac;
    // (L h)_ab = T.d h_ab + h_cb d_a T^c + h_ac d_b T^c
    return {F.along(h.xx) + 2.0 * (h.xx * J.a11 + h.xy * J.a21),
            F.along(h.xy) + h.xx * J.a12 + h.xy * J.a22 + h.xy * J.a11 + h.yy * J.a21,
            F.along(h.yy) + 2.0 * (h.xy * J.a12 + h.yy * J.a22)};
}

std::vector<MultiIndex> multi_indices(const std::vector<Member>& labels, int r) {
    std::vector<MultiIndex> out{{}};
    size_t begin = 0;
    for (int len = 1; len <= r; ++len) {
        size_t end = out.size();
        for (size_t i = begin; i < end; ++i)
            for (const Member& m : labels) {
                MultiIndex I = out[i];
                I.push_back(m);
                out.push_back(std::move(I));
            }
        begin = end;
    }
    return out;
}

std::string label(const MultiIndex& I) {
    if (I.empty()) return "()";
    std::string s = "(";
    for (size_t i = 0; i < I.size(); ++i) s += (i ? "," : "") + I[i].label();
    return s + ")";
}

}  // namespace fblin
