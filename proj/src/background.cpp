#include "fblin/background.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "fblin/ops.hpp"

namespace fblin {

MatrixField MatrixField::zero(Eigen::Index nr, Eigen::Index nt) {
    ScalarField z = ScalarField::Zero(nr, nt);
    return {z, z, z, z};
}

MatrixField MatrixField::identity(Eigen::Index nr, Eigen::Index nt) {
    ScalarField z = ScalarField::Zero(nr, nt), o = ScalarField::Ones(nr, nt);
    return {o, z, z, o};
}

namespace {

double binom(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
    return b;
}

}  // namespace

void fill_from_jacobian(BackgroundJet& b, const std::vector<MatrixField>& jac) {
    const int J = b.max_jet;
    const auto nr = jac[0].a11.rows(), nt = jac[0].a11.cols();
    auto jet = [&](int s) -> MatrixField {
        return s < static_cast<int>(jac.size()) ? jac[size_t(s)] : MatrixField::zero(nr, nt);
    };
    b.jacobian = jac;
    b.g.assign(size_t(J + 1), SymTensor::zero(nr, nt));
    b.omega.assign(size_t(J + 1), TwoForm::zero(nr, nt));
    for (int s = 0; s <= J; ++s) {
        SymTensor& g = b.g[size_t(s)];
        // g = J^T J and omega_12 = sum_i (dJ_i1 J_i2 - dJ_i2 J_i1), differentiated by Leibniz.
        for (int a = 0; a <= s; ++a) {
            double c = binom(s, a);
            MatrixField L = jet(a), R = jet(s - a), Ld = jet(a + 1);
            g.xx += c * (L.a11 * R.a11 + L.a21 * R.a21);
            g.xy += c * (L.a11 * R.a12 + L.a21 * R.a22);
            g.yy += c * (L.a12 * R.a12 + L.a22 * R.a22);
            b.omega[size_t(s)].c += c * (Ld.a11 * R.a12 - Ld.a12 * R.a11 + Ld.a21 * R.a22 - Ld.a22 * R.a21);
        }
    }
    const MatrixField& J0 = jac[0];
    ScalarField kappa = J0.a11 * J0.a22 - J0.a12 * J0.a21;
    b.metric = Metric::from(b.g[0], kappa);
}

namespace {

class RigidRotation final : public Background {
public:
    RigidRotation(double omega, PressureConvention conv, int max_jet) : omega_(omega), conv_(conv), max_jet_(max_jet) {}

    BackgroundJet at(double t, const Grid& grid) const override {
        const auto nr = grid.n_r, nt = grid.n_theta;
        BackgroundJet b;
        b.t = t;
        b.max_jet = max_jet_;
        const double c = std::cos(omega_ * t), s = std::sin(omega_ * t);
        // D_t^k R(Omega t) = Omega^k R(Omega t + k pi / 2).
        for (int k = 0; k <= std::max(1, max_jet_ + 1); ++k) {
            double ang = omega_ * t + k * M_PI / 2, sc = std::pow(omega_, k);
            double ck = sc * std::cos(ang), sk = sc * std::sin(ang);
            b.jacobian.push_back({ScalarField::Constant(nr, nt, ck), ScalarField::Constant(nr, nt, -sk),
                                  ScalarField::Constant(nr, nt, sk), ScalarField::Constant(nr, nt, ck)});
        }
        b.metric = Metric::identity(grid);
        b.g.assign(size_t(max_jet_ + 1), SymTensor::zero(nr, nt));
        b.g[0] = b.metric.g;
        b.omega.assign(size_t(max_jet_ + 1), TwoForm::zero(nr, nt));
        b.omega[0] = TwoForm(ScalarField::Constant(nr, nt, 2.0 * omega_));
        b.p.assign(size_t(max_jet_ + 1), ScalarField::Zero(nr, nt));
        double sign = conv_ == PressureConvention::Standard ? 1.0 : -1.0;
        b.p[0] = sign * 0.5 * omega_ * omega_ * (1.0 - grid.R * grid.R);

        ScalarField y1 = grid.R * grid.cos_t;
        ScalarField y2 = grid.R * grid.sin_t;
        VectorField x{c * y1 - s * y2, s * y1 + c * y2};
        b.velocity = VectorField{-omega_ * x.y, omega_ * x.x};
        b.acceleration = VectorField{-omega_ * omega_ * x.x, -omega_ * omega_ * x.y};
        b.x = std::move(x);
        return b;
    }
    int max_jet() const override { return max_jet_; }
    std::string name() const override { return fmt::format("rigid_rotation(Omega={})", omega_); }

private:
    double omega_;
    PressureConvention conv_;
    int max_jet_;
};

class Tabulated final : public Background {
public:
    struct Sample {
        double t;
        MatrixField J;
        ScalarField p;
    };

    Tabulated(std::vector<Sample> samples, int max_jet, std::string path)
        : samples_(std::move(samples)), max_jet_(max_jet), path_(std::move(path)) {}

    BackgroundJet at(double t, const Grid& grid) const override {
        const Sample& s0 = samples_.front();
        if (grid.n_r != s0.p.rows() || grid.n_theta != s0.p.cols())
            throw GridError(fmt::format("grid mismatch in tabulated background: table is {}x{}, grid is {}x{}",
                                        s0.p.rows(), s0.p.cols(), grid.n_r, grid.n_theta));
        const int n = static_cast<int>(samples_.size());
        const int m = std::min(4, n);
        // Window of m samples centred on t, clamped to the table.
        int lo = 0;
        while (lo + 1 < n && samples_[size_t(lo + 1)].t <= t) ++lo;
        int start = std::clamp(lo - (m / 2 - 1), 0, n - m);

        Eigen::MatrixXd V(m, m);
        for (int k = 0; k < m; ++k)
            for (int l = 0; l < m; ++l) V(k, l) = std::pow(samples_[size_t(start + k)].t - t, l);
        Eigen::MatrixXd C = V.inverse();  // row l: Taylor coefficient l as a combination of samples

        const auto nr = grid.n_r, nt = grid.n_theta;
        BackgroundJet b;
        b.t = t;
        b.max_jet = max_jet_;
        std::vector<MatrixField> jac(size_t(max_jet_ + 2), MatrixField::zero(nr, nt));
        b.p.assign(size_t(max_jet_ + 1), ScalarField::Zero(nr, nt));
        double fact = 1.0;
        for (int l = 0; l < m && l <= max_jet_ + 1; ++l) {
            if (l > 0) fact *= l;
            MatrixField& J = jac[size_t(l)];
            for (int k = 0; k < m; ++k) {
                const Sample& smp = samples_[size_t(start + k)];
                double w = fact * C(l, k);
                J.a11 += w * smp.J.a11;
                J.a12 += w * smp.J.a12;
                J.a21 += w * smp.J.a21;
                J.a22 += w * smp.J.a22;
                if (l <= max_jet_) b.p[size_t(l)] += w * smp.p;
            }
        }
        fill_from_jacobian(b, jac);
        return b;
    }
    int max_jet() const override { return max_jet_; }
    std::string name() const override { return fmt::format("tabulated({})", path_); }

private:
    std::vector<Sample> samples_;
    int max_jet_;
    std::string path_;
};

}  // namespace

std::shared_ptr<const Background> rigid_rotation_background(double omega, PressureConvention conv, int max_jet) {
    if (max_jet < 1) throw BackgroundError("max_jet must be at least 1");
    return std::make_shared<RigidRotation>(omega, conv, max_jet);
}

std::shared_ptr<const Background> load_tabulated_background(const std::string& path, int n_r, int n_theta,
                                                            int max_jet) {
    std::ifstream in(path);
    if (!in) throw BackgroundError(fmt::format("cannot open tabulated background '{}'", path));
    std::string line;
    if (!std::getline(in, line)) throw BackgroundError(fmt::format("'{}' is empty", path));
    std::map<double, Tabulated::Sample> by_time;
    std::map<double, Eigen::ArrayXXi> seen;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double t, v[5];
        int j, k;
        if (!(ss >> t >> j >> k >> v[0] >> v[1] >> v[2] >> v[3] >> v[4]))
            throw BackgroundError(fmt::format("{}:{}: expected t,j,k,J11,J12,J21,J22,p", path, lineno));
        if (j < 0 || j >= n_r || k < 0 || k >= n_theta)
            throw BackgroundError(fmt::format("{}:{}: node ({}, {}) outside the {}x{} grid", path, lineno, j, k, n_r,
                                              n_theta));
        for (double x : v)
            if (!std::isfinite(x)) throw BackgroundError(fmt::format("{}:{}: non-finite value", path, lineno));
        auto [it, fresh] = by_time.try_emplace(t);
        if (fresh) {
            it->second.t = t;
            it->second.J = MatrixField::zero(n_r, n_theta);
            it->second.p = ScalarField::Zero(n_r, n_theta);
            seen[t] = Eigen::ArrayXXi::Zero(n_r, n_theta);
        }
        Tabulated::Sample& s = it->second;
        s.J.a11(j, k) = v[0];
        s.J.a12(j, k) = v[1];
        s.J.a21(j, k) = v[2];
        s.J.a22(j, k) = v[3];
        s.p(j, k) = v[4];
        seen[t](j, k) += 1;
    }
    if (by_time.empty()) throw BackgroundError(fmt::format("'{}' has no samples", path));
    std::vector<Tabulated::Sample> samples;
    for (auto& [t, s] : by_time) {
        if ((seen[t] != 1).any())
            throw BackgroundError(fmt::format("'{}': sample t = {} does not cover every node exactly once", path, t));
        ScalarField kappa = s.J.a11 * s.J.a22 - s.J.a12 * s.J.a21;
        if ((kappa - 1.0).abs().maxCoeff() > 1e-10)
            throw BackgroundError(
                fmt::format("'{}': det(dx/dy) deviates from 1 by {:.3e} at t = {}", path, (kappa - 1.0).abs().maxCoeff(), t));
        samples.push_back(std::move(s));
    }
    if (max_jet < 1) throw BackgroundError("max_jet must be at least 1");
    return std::make_shared<Tabulated>(std::move(samples), max_jet, path);
}

const char* to_string(BackgroundFailure f) {
    switch (f) {
        case BackgroundFailure::SignCondition: return "sign-condition";
        case BackgroundFailure::Volume: return "volume-constraint";
        case BackgroundFailure::Euler: return "euler-residual";
        case BackgroundFailure::Poisson: return "pressure-poisson";
        case BackgroundFailure::BoundaryPressure: return "boundary-pressure";
        case BackgroundFailure::Metric: return "metric";
    }
    return "unknown";
}

bool BackgroundReport::has(BackgroundFailure f) const {
    return std::find(failures.begin(), failures.end(), f) != failures.end();
}

Eigen::RowVectorXd normal_derivative(const ScalarField& f, const Metric& m, const Grid& grid) {
    OneForm df = grad(f, grid);
    const ScalarField &c = grid.cos_t, &s = grid.sin_t;
    const SymTensor& gi = m.g_inv;
    ScalarField num = c * (gi.xx * df.x + gi.xy * df.y) + s * (gi.xy * df.x + gi.yy * df.y);
    ScalarField nn = (c * c * gi.xx + 2.0 * c * s * gi.xy + s * s * gi.yy).sqrt();
    return trace(num / nn, grid);
}

BackgroundReport validate_background(const BackgroundJet& b, const Grid& grid, double tol) {
    grid.require_operators("validate_background");
    BackgroundReport rep;
    const Metric& m = b.metric;
    try {
        require_spd(m.g, "background metric");
    } catch (const GridError&) {
        rep.failures.push_back(BackgroundFailure::Metric);
    }
    rep.volume_residual = (m.kappa - 1.0).abs().maxCoeff();

    // Eulerian gradient of p: J^{-T} d_y p.
    const MatrixField& J = b.jacobian.at(0);
    ScalarField det = J.a11 * J.a22 - J.a12 * J.a21;
    OneForm dp = grad(b.p.at(0), grid);
    ScalarField px = (J.a22 * dp.x - J.a21 * dp.y) / det;
    ScalarField py = (-J.a12 * dp.x + J.a11 * dp.y) / det;
    if (b.acceleration) {
        rep.euler_residual = std::max((b.acceleration->x + px).abs().maxCoeff(),
                                      (b.acceleration->y + py).abs().maxCoeff());
    } else {
        rep.euler_residual = std::numeric_limits<double>::quiet_NaN();
    }

    // dV/dx = (dJ/dt) J^{-1}; Delta_x p in Lagrangian form.
    const MatrixField& Jd = b.jacobian.at(1);
    ScalarField i11 = J.a22 / det, i12 = -J.a12 / det, i21 = -J.a21 / det, i22 = J.a11 / det;
    ScalarField v11 = Jd.a11 * i11 + Jd.a12 * i21, v12 = Jd.a11 * i12 + Jd.a12 * i22;
    ScalarField v21 = Jd.a21 * i11 + Jd.a22 * i21, v22 = Jd.a21 * i12 + Jd.a22 * i22;
    ScalarField dvdv = v11 * v11 + 2.0 * v12 * v21 + v22 * v22;
    ScalarField lap = div(raise_pointwise(m.g_inv, dp), m.kappa, grid);
    rep.poisson_residual = (-lap - dvdv).abs().maxCoeff();

    rep.boundary_pressure = trace(b.p.at(0), grid).cwiseAbs().maxCoeff();
    Eigen::RowVectorXd dn = normal_derivative(b.p.at(0), m, grid);
    rep.normal_derivative_max = dn.maxCoeff();
    rep.c0 = -rep.normal_derivative_max;

    if (rep.volume_residual > tol) rep.failures.push_back(BackgroundFailure::Volume);
    if (std::isfinite(rep.euler_residual) && rep.euler_residual > tol) rep.failures.push_back(BackgroundFailure::Euler);
    if (rep.poisson_residual > tol) rep.failures.push_back(BackgroundFailure::Poisson);
    if (rep.boundary_pressure > tol) rep.failures.push_back(BackgroundFailure::BoundaryPressure);
    if (!(rep.c0 > tol)) rep.failures.push_back(BackgroundFailure::SignCondition);
    return rep;
}

}  // namespace fblin
