#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fblin/background.hpp"
#include "fblin/fields.hpp"
#include "fblin/grid.hpp"

namespace fblin {

enum class MemberKind { S0, S1, R, Dt };

// A label in a family: the rotation (S0), interior field number `index` (S1),
// the radial field (R) or material time differentiation (Dt).
struct Member {
    MemberKind kind = MemberKind::S0;
    int index = 0;

    bool tangential() const { return kind != MemberKind::R; }
    bool spatial() const { return kind != MemberKind::Dt; }
    std::string label() const;
    bool operator==(const Member&) const = default;
};

using MultiIndex = std::vector<Member>;

// D_t^s beta for s = 0, 1, ...; entry 0 is beta itself.
template <class T>
using Jet = std::vector<T>;

class LieError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct VectorFamily {
    double d0 = 0.5;
    double c1 = 1.0;
    int n_s1 = 0;
    // Sampled fields and their Jacobians (jac.aCA = d_A T^C) for S0 and S1 members.
    std::vector<VectorField> s1;
    std::vector<MatrixField> s1_jac;
    VectorField s0;

    std::vector<Member> S() const;  // S0 then S1
    std::vector<Member> T() const;  // S then Dt
    std::vector<Member> all() const;
    VectorField field(Member m, const Grid& grid) const;  // Dt has no field
    Member parse(const std::string& label) const;
};

// S1 members: copies of a compactly supported divergence-free pattern
// (f(u) g'(v), -f'(u) g(v)) in coordinates rotated by k pi / n about the
// origin, supported in |y| <= 0.721 and spanning every direction on |y| <= 1 - d0.
constexpr int kInteriorFields = 5;
constexpr double kInteriorScale = 1.02;
VectorFamily build_families(const Grid& grid, double d0 = 0.5, double c1 = 1.0);

// The S1 pattern at a point: value and Jacobian d_a X^c.
struct PatternSample {
    double x, y;
    double dxdx, dxdy, dydx, dydy;
};
PatternSample interior_pattern(double y1, double y2, int k, int count = kInteriorFields,
                               double scale = kInteriorScale);

// Spatial Lie derivatives (Dt rejected).
ScalarField lie_derive(const VectorFamily& fam, Member T, const ScalarField& f, const Grid& grid);
VectorField lie_derive(const VectorFamily& fam, Member T, const VectorField& W, const Grid& grid);
OneForm lie_derive(const VectorFamily& fam, Member T, const OneForm& w, const Grid& grid);
TwoForm lie_derive(const VectorFamily& fam, Member T, const TwoForm& b, const Grid& grid);
SymTensor lie_derive(const VectorFamily& fam, Member T, const SymTensor& h, const Grid& grid);

// On time jets: Dt shifts the jet, spatial members act entrywise (they are
// time independent, so they commute with D_t).
template <class X>
Jet<X> lie_derive(const VectorFamily& fam, Member T, const Jet<X>& jet, const Grid& grid) {
    if (jet.empty()) throw LieError("empty jet");
    if (T.kind == MemberKind::Dt) {
        if (jet.size() < 2) throw LieError("missing time jet for D_t");
        return Jet<X>(jet.begin() + 1, jet.end());
    }
    Jet<X> out;
    out.reserve(jet.size());
    for (const X& x : jet) out.push_back(lie_derive(fam, T, x, grid));
    return out;
}

// L^I = L_{i1} ... L_{ir}: the last label acts first.  Empty I is the identity.
template <class X>
Jet<X> lie_multi(const VectorFamily& fam, const MultiIndex& I, Jet<X> jet, const Grid& grid) {
    for (auto it = I.rbegin(); it != I.rend(); ++it) jet = lie_derive(fam, *it, jet, grid);
    return jet;
}

// All multi-indices over `labels` with length <= r, shortest first.
std::vector<MultiIndex> multi_indices(const std::vector<Member>& labels, int r);
std::string label(const MultiIndex& I);

}  // namespace fblin
