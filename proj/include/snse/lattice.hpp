#pragma once

#include <complex>
#include <string>
#include <vector>

#include "snse/fft.hpp"

namespace snse::num {

enum class SignConvention { Plus, Minus };

// Smooth compactly supported plateau bump in one variable: exactly 1 on the
// plateau fraction of the halfwidth, smoothly 0 outside the halfwidth.
struct BumpSpec {
    double center = 0.0;
    double halfwidth = 1.0;
    double plateau = 0.7;
};

double smooth_bump(const BumpSpec& b, double u);
double smooth_bump_periodic(const BumpSpec& b, double u, double period);

struct ChiSpec {
    BumpSpec time;
    BumpSpec space;
};

// Periodic spatial torus, uniform time grid on [0, T). Time index j is the
// physical time j*dt; kernels vanish at nonpositive offsets (strict
// causality on the grid).
struct LatticeSpec {
    int d = 1;
    double T = 1.0;
    double Lx = 2.0 * M_PI;
    int nt = 128;
    int nx = 128;
    double epsilon = 0.0;     // coinciding-time regulator; 0 means one step
    SignConvention sign = SignConvention::Minus;
    ChiSpec chi;

    double dt() const { return T / nt; }
    double dx() const { return Lx / nx; }
    double time(int j) const { return j * dt(); }
    double x(int i) const { return i * dx(); }
    // momentum of FFT bin m with wrap to the signed value
    double momentum(int m) const {
        int half = nx / 2;
        int s = m < half ? m : m - nx;
        return 2.0 * M_PI / Lx * s;
    }
    double sigma() const { return sign == SignConvention::Plus ? 1.0 : -1.0; }
    double effective_epsilon() const { return epsilon > dt() ? epsilon : dt(); }

    void validate() const;
    static LatticeSpec defaults();
};

struct Grid {
    int nt = 0;
    int nx = 0;
    std::vector<cplx> a;

    Grid() = default;
    Grid(int nt_, int nx_) : nt(nt_), nx(nx_), a(size_t(nt_) * nx_) {}
    cplx& at(int j, int i) { return a[size_t(j) * nx + i]; }
    const cplx& at(int j, int i) const { return a[size_t(j) * nx + i]; }
    cplx* row(int j) { return a.data() + size_t(j) * nx; }
    const cplx* row(int j) const { return a.data() + size_t(j) * nx; }
};

Grid chi_grid(const LatticeSpec& spec);   // cutoff sampled on the grid (real)

// Smooth compactly supported test function plus its support box.
struct TestFunction {
    Grid values;
    double t_lo = 0, t_hi = 0, x_lo = 0, x_hi = 0;   // support box

    static TestFunction bump(const LatticeSpec& spec, double t_center, double t_halfwidth,
                             double x_center, double x_halfwidth, cplx amplitude = 1.0,
                             double plateau = 0.5);
};

// Pairing sum(u * f) dt dx. Linear in both; no conjugation.
cplx pair_grid(const LatticeSpec& spec, const Grid& u, const Grid& f);

} // namespace snse::num
