#include "snse/lattice.hpp"

#include <cmath>
#include <stdexcept>

namespace snse::num {

namespace {

double smooth_step(double s) {
    // 1 for s <= 0, 0 for s >= 1, C-infinity in between
    if (s <= 0.0) return 1.0;
    if (s >= 1.0) return 0.0;
    auto f = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
    return f(1.0 - s) / (f(1.0 - s) + f(s));
}

} // namespace

double smooth_bump(const BumpSpec& b, double u) {
    double r = std::abs(u - b.center) / b.halfwidth;
    if (r <= b.plateau) return 1.0;
    return smooth_step((r - b.plateau) / (1.0 - b.plateau));
}

double smooth_bump_periodic(const BumpSpec& b, double u, double period) {
    double du = std::fmod(u - b.center, period);
    if (du < -period / 2) du += period;
    if (du > period / 2) du -= period;
    double r = std::abs(du) / b.halfwidth;
    if (r <= b.plateau) return 1.0;
    return smooth_step((r - b.plateau) / (1.0 - b.plateau));
}

void LatticeSpec::validate() const {
    if (d < 1 || d > 3) throw std::invalid_argument("lattice: d must be 1, 2 or 3");
    if (nt < 8 || nx < 8) throw std::invalid_argument("lattice: nt, nx must be >= 8");
    if (!is_pow2(nt) || !is_pow2(nx))
        throw std::invalid_argument("lattice: nt, nx must be powers of two");
    if (T <= 0 || Lx <= 0) throw std::invalid_argument("lattice: T, Lx must be positive");
    if (epsilon < 0) throw std::invalid_argument("lattice: epsilon must be >= 0");
    if (chi.time.center - chi.time.halfwidth < 0 || chi.time.center + chi.time.halfwidth > T)
        throw std::invalid_argument("lattice: time cutoff leaves the grid");
    if (2 * chi.space.halfwidth > Lx)
        throw std::invalid_argument("lattice: space cutoff wider than the torus");
}

LatticeSpec LatticeSpec::defaults() {
    LatticeSpec s;
    s.chi.time = {0.5 * s.T, 0.45 * s.T, 0.7};
    s.chi.space = {0.5 * s.Lx, 0.45 * s.Lx, 0.7};
    s.epsilon = s.dt();
    return s;
}

Grid chi_grid(const LatticeSpec& spec) {
    Grid g(spec.nt, spec.nx);
    for (int j = 0; j < spec.nt; ++j) {
        double ct = smooth_bump(spec.chi.time, spec.time(j));
        for (int i = 0; i < spec.nx; ++i)
            g.at(j, i) = ct * smooth_bump_periodic(spec.chi.space, spec.x(i), spec.Lx);
    }
    return g;
}

TestFunction TestFunction::bump(const LatticeSpec& spec, double t_center, double t_halfwidth,
                                double x_center, double x_halfwidth, cplx amplitude,
                                double plateau) {
    TestFunction f;
    f.values = Grid(spec.nt, spec.nx);
    BumpSpec bt{t_center, t_halfwidth, plateau};
    BumpSpec bx{x_center, x_halfwidth, plateau};
    for (int j = 0; j < spec.nt; ++j) {
        double vt = smooth_bump(bt, spec.time(j));
        if (vt == 0.0) continue;
        for (int i = 0; i < spec.nx; ++i) {
            double vx = smooth_bump_periodic(bx, spec.x(i), spec.Lx);
            if (vx != 0.0) f.values.at(j, i) = amplitude * vt * vx;
        }
    }
    f.t_lo = t_center - t_halfwidth;
    f.t_hi = t_center + t_halfwidth;
    f.x_lo = x_center - x_halfwidth;
    f.x_hi = x_center + x_halfwidth;
    return f;
}

cplx pair_grid(const LatticeSpec& spec, const Grid& u, const Grid& f) {
    cplx s = 0.0;
    for (size_t i = 0; i < u.a.size(); ++i) s += u.a[i] * f.a[i];
    return s * spec.dt() * spec.dx();
}

} // namespace snse::num
