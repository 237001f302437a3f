#include "snse/scaling.hpp"

#include <cmath>
#include <stdexcept>

namespace snse::num {

namespace {

// least squares slope/intercept of y against x
std::pair<double, double> fit_line(const std::vector<std::array<double, 2>>& pts) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double n = double(pts.size());
    for (const auto& p : pts) {
        sx += p[0];
        sy += p[1];
        sxx += p[0] * p[0];
        sxy += p[0] * p[1];
    }
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double intercept = (sy - slope * sx) / n;
    return {slope, intercept};
}

} // namespace

ScalingFit scaling_degree_estimate(const KernelGrid& kernel, int time_weight,
                                   const ScalingOptions& opt) {
    const LatticeSpec& spec = kernel.spec;
    if (opt.nscales < 2) throw std::invalid_argument("scaling: need at least two scales");
    double t_lo = opt.t_lo_frac * spec.T;
    double t_hi = opt.t_hi_frac * spec.T;
    if (t_lo / std::pow(2.0, time_weight * (opt.nscales - 1)) < spec.dt() * 2.0)
        throw std::invalid_argument("scaling: smallest window unresolved; refine nt or "
                                    "reduce nscales");

    BumpSpec window{0.5 * (t_lo + t_hi), 0.5 * (t_hi - t_lo), 0.5};
    BumpSpec xwin{0.0, opt.x_halfwidth_frac * spec.Lx, 0.5};

    ScalingFit fit;
    for (int m = 0; m < opt.nscales; ++m) {
        double lam = std::pow(0.5, m);
        double contr = std::pow(lam, time_weight);
        double pairing = 0.0;
        for (int j = 1; j < spec.nt; ++j) {
            double t = spec.time(j);
            double g = smooth_bump(window, t / contr) / contr;
            if (g == 0.0) continue;
            double row = 0.0;
            for (int i = 0; i < spec.nx; ++i) {
                double h = smooth_bump_periodic(xwin, spec.x(i), spec.Lx);
                if (h != 0.0) row += std::abs(kernel.data.at(j, i)) * h;
            }
            pairing += g * row;
        }
        pairing *= spec.dt() * spec.dx();
        if (pairing <= 0.0)
            throw std::invalid_argument("scaling: empty pairing window");
        fit.points.push_back({std::log(lam), std::log(pairing)});
    }
    auto [slope, intercept] = fit_line(fit.points);
    fit.estimate = -slope;
    for (const auto& p : fit.points)
        fit.max_residual = std::max(fit.max_residual,
                                    std::abs(p[1] - (slope * p[0] + intercept)));
    fit.reliable = fit.max_residual < opt.residual_threshold;
    return fit;
}

std::vector<DecayFit> directional_decay_test(const LatticeSpec& spec, const TestFunction& f,
                                             const std::vector<DecayDirection>& dirs,
                                             int r_lo, int r_hi) {
    spec.validate();
    if (spec.d != 1) throw std::invalid_argument("decay test: d = 1 only");
    KernelGrid g = kernel_G(spec, false);

    // product f * G on the centered grid, then a full 2-d transform
    int nt = spec.nt, nx = spec.nx;
    std::vector<cplx> w(size_t(nt) * nx, 0.0);
    bool base_nonzero = false;
    for (int j = 0; j < nt; ++j) {
        int off = j - nt / 2;
        for (int i = 0; i < nx; ++i) {
            cplx fv = f.values.at(j, i);
            if (off == 0 && std::abs(fv) > 0.0) base_nonzero = true;
            w[size_t(j) * nx + i] = fv * g.at_offset(off, i);
        }
    }
    if (!base_nonzero)
        throw std::invalid_argument("decay test: test function vanishes on the t = 0 row");

    // row transforms then column transforms
    for (int j = 0; j < nt; ++j) fft_pow2(w.data() + size_t(j) * nx, nx, false);
    std::vector<cplx> col(nt);
    for (int i = 0; i < nx; ++i) {
        for (int j = 0; j < nt; ++j) col[j] = w[size_t(j) * nx + i];
        fft_pow2(col.data(), nt, false);
        for (int j = 0; j < nt; ++j) w[size_t(j) * nx + i] = col[j];
    }
    double cell = spec.dt() * spec.dx();

    std::vector<DecayFit> fits;
    for (const auto& dir : dirs) {
        DecayFit df;
        df.dir = dir;
        for (int r = r_lo; r <= r_hi; r *= 2) {
            int mt = int(std::lround(dir.omega * r));
            int mx = int(std::lround(dir.k * r));
            if (std::abs(mt) >= nt / 2 || std::abs(mx) >= nx / 2) break;
            int jt = ((mt % nt) + nt) % nt;
            int jx = ((mx % nx) + nx) % nx;
            double mag = std::abs(w[size_t(jt) * nx + jx]) * cell;
            if (mag < 1e-300) mag = 1e-300;
            df.points.push_back({std::log(double(r)), std::log(mag)});
        }
        if (df.points.size() < 2)
            throw std::invalid_argument("decay test: ray leaves the grid before two samples");
        auto [slope, intercept] = fit_line(df.points);
        (void)intercept;
        df.exponent = -slope;
        fits.push_back(std::move(df));
    }
    return fits;
}

} // namespace snse::num
