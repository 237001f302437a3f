#include "snse/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace snse::num {

namespace {

// spectral phase for one step: exp(-i sigma k^2 dt) per momentum bin
std::vector<cplx> step_phase(const LatticeSpec& spec, double tfactor = 1.0) {
    std::vector<cplx> ph(spec.nx);
    for (int m = 0; m < spec.nx; ++m) {
        double k = spec.momentum(m);
        double arg = -spec.sigma() * k * k * spec.dt() * tfactor;
        ph[m] = cplx(std::cos(arg), std::sin(arg));
    }
    return ph;
}

} // namespace

cplx KernelGrid::sample_point(int j, const std::vector<int>& xidx) const {
    if (int(xidx.size()) != spec.d)
        throw std::invalid_argument("kernel sample: wrong spatial dimension");
    if (j <= 0) return 0.0;
    if (spec.d == 1) return at_offset(j, xidx[0]);
    // separable product of the stored axis factor; one causal prefactor
    cplx v(0.0, conjugated ? 1.0 : -1.0);
    for (int ax = 0; ax < spec.d; ++ax) {
        int i = ((xidx[ax] % spec.nx) + spec.nx) % spec.nx;
        v *= data.at(j, i);
    }
    return v;
}

KernelGrid kernel_G(const LatticeSpec& spec, bool bar) {
    spec.validate();
    KernelGrid g;
    g.spec = spec;
    g.kind = bar ? "Gbar" : "G";
    g.conjugated = bar;
    g.data = Grid(spec.nt, spec.nx);
    std::vector<cplx> row(spec.nx);
    for (int j = 1; j < spec.nt; ++j) {
        for (int m = 0; m < spec.nx; ++m) {
            double k = spec.momentum(m);
            double arg = -spec.sigma() * k * k * spec.time(j);
            // axis factor: exp(-i sigma k^2 t); d = 1 carries the -i here
            cplx ph(std::cos(arg), std::sin(arg));
            row[m] = (spec.d == 1) ? cplx(0.0, -1.0) * ph : ph;
        }
        fft_pow2(row, true);
        double norm = 1.0 / spec.Lx;   // inverse transform sum(k) / Lx
        for (int i = 0; i < spec.nx; ++i)
            g.data.at(j, i) = bar ? std::conj(row[i] * norm) : row[i] * norm;
    }
    return g;
}

KernelGrid kernel_G_abs2(const LatticeSpec& spec) {
    KernelGrid g = kernel_G(spec, false);
    g.kind = "GGbar";
    for (auto& v : g.data.a) v = cplx(std::norm(v), 0.0);
    return g;
}

Grid apply_schrodinger_lhs(const LatticeSpec& spec, const KernelGrid& g) {
    // (L u)(t_j, k) = i [exp(i sigma k^2 dt) u(t_{j+1}, k) - u(t_j, k)] / dt
    Grid out(spec.nt, spec.nx);
    std::vector<cplx> cur(spec.nx), nxt(spec.nx);
    auto ph = step_phase(spec, -1.0);   // exp(+i sigma k^2 dt)
    for (int j = 0; j + 1 < spec.nt; ++j) {
        for (int i = 0; i < spec.nx; ++i) { cur[i] = g.data.at(j, i); nxt[i] = g.data.at(j + 1, i); }
        fft_pow2(cur, false);
        fft_pow2(nxt, false);
        std::vector<cplx> res(spec.nx);
        for (int m = 0; m < spec.nx; ++m)
            res[m] = cplx(0.0, 1.0) * (ph[m] * nxt[m] - cur[m]) / spec.dt();
        fft_pow2(res, true);
        for (int i = 0; i < spec.nx; ++i) out.at(j, i) = res[i] * (1.0 / spec.nx);
    }
    return out;
}

Grid propagate_forward(const LatticeSpec& spec, const Grid& src, bool bar) {
    // out(t_j) = sum_{j' < j} dt (1/Lx) sum_k e^{ikx} (-i) e^{-i sigma k^2 (t_j-t_j')} src_hat
    Grid out(spec.nt, spec.nx);
    auto ph = step_phase(spec);
    std::vector<cplx> state(spec.nx, 0.0), work(spec.nx);
    for (int j = 0; j < spec.nt; ++j) {
        for (int i = 0; i < spec.nx; ++i) work[i] = state[i];
        fft_pow2(work, true);
        for (int i = 0; i < spec.nx; ++i) {
            cplx v = work[i] * (1.0 / spec.Lx);
            out.at(j, i) = bar ? std::conj(v) : v;
        }
        for (int i = 0; i < spec.nx; ++i)
            work[i] = bar ? std::conj(src.at(j, i)) : src.at(j, i);
        fft_pow2(work, false);
        double cell = spec.dt() * spec.dx();
        for (int m = 0; m < spec.nx; ++m)
            state[m] = ph[m] * (state[m] + cell * cplx(0.0, -1.0) * work[m]);
    }
    return out;
}

Grid propagate_adjoint(const LatticeSpec& spec, const Grid& f, bool bar) {
    // out(t_j) = sum_{j' > j} dt IFFT[ -i exp(-i sigma k^2 (t_j' - t_j)) FFT(f(t_j')) ]
    Grid out(spec.nt, spec.nx);
    auto ph = step_phase(spec);
    std::vector<cplx> state(spec.nx, 0.0), work(spec.nx);
    for (int j = spec.nt - 1; j >= 0; --j) {
        for (int i = 0; i < spec.nx; ++i) work[i] = state[i];
        fft_pow2(work, true);
        for (int i = 0; i < spec.nx; ++i) {
            cplx v = work[i] * (1.0 / spec.Lx);
            out.at(j, i) = bar ? std::conj(v) : v;
        }
        for (int i = 0; i < spec.nx; ++i)
            work[i] = bar ? std::conj(f.at(j, i)) : f.at(j, i);
        fft_pow2(work, false);
        double cell = spec.dt() * spec.dx();
        for (int m = 0; m < spec.nx; ++m)
            state[m] = ph[m] * (state[m] + cell * cplx(0.0, -1.0) * work[m]);
    }
    return out;
}

QKernel::QKernel(const LatticeSpec& spec) : spec_(spec), chi_(chi_grid(spec)) {
    if (spec.d != 1) throw std::invalid_argument("QKernel: d = 1 lattice only");
}

cplx QKernel::pair(const Grid& f1, const Grid& f2) const {
    Grid u1 = propagate_adjoint(spec_, f1, false);
    Grid f2c = f2;
    for (auto& v : f2c.a) v = std::conj(v);
    Grid u2 = propagate_adjoint(spec_, f2c, false);
    cplx s = 0.0;
    for (size_t i = 0; i < u1.a.size(); ++i) {
        double c = chi_.a[i].real();
        s += u1.a[i] * std::conj(u2.a[i]) * (c * c);
    }
    return s * spec_.dt() * spec_.dx();
}

Grid QKernel::apply_second(const Grid& g) const {
    // sum_b Q(a,b) g(b) = G_chi applied forward to chi^2 * (adjoint Gbar of g)
    Grid inner = propagate_adjoint(spec_, g, true);
    for (size_t i = 0; i < inner.a.size(); ++i) {
        double c = chi_.a[i].real();
        inner.a[i] *= c * c;
    }
    return propagate_forward(spec_, inner, false);
}

Grid QKernel::apply_first(const Grid& g) const {
    Grid inner = propagate_adjoint(spec_, g, false);
    for (size_t i = 0; i < inner.a.size(); ++i) {
        double c = chi_.a[i].real();
        inner.a[i] *= c * c;
    }
    return propagate_forward(spec_, inner, true);
}

namespace {

// C_eps(t,x) = sum over lags tau > eps of dt (|G(tau)|^2 conv_x chi^2(t-tau))
Grid coeff_C_window(const LatticeSpec& spec, double eps) {
    KernelGrid gg = kernel_G_abs2(spec);
    Grid chi = chi_grid(spec);
    int jmin = int(std::floor(eps / spec.dt())) + 1;  // smallest lag with tau > eps
    if (jmin < 1) jmin = 1;

    // FFT rows of |G|^2 once
    std::vector<std::vector<cplx>> ghat(spec.nt, std::vector<cplx>(spec.nx));
    for (int j = 1; j < spec.nt; ++j) {
        for (int i = 0; i < spec.nx; ++i) ghat[j][i] = gg.data.at(j, i);
        fft_pow2(ghat[j], false);
    }
    std::vector<std::vector<cplx>> chat(spec.nt, std::vector<cplx>(spec.nx));
    for (int j = 0; j < spec.nt; ++j) {
        for (int i = 0; i < spec.nx; ++i) {
            double c = chi.at(j, i).real();
            chat[j][i] = c * c;
        }
        fft_pow2(chat[j], false);
    }

    Grid out(spec.nt, spec.nx);
    std::vector<cplx> acc(spec.nx);
    for (int j = 0; j < spec.nt; ++j) {
        std::fill(acc.begin(), acc.end(), cplx(0.0));
        for (int lag = jmin; lag <= j; ++lag)
            for (int m = 0; m < spec.nx; ++m)
                acc[m] += ghat[lag][m] * chat[j - lag][m];
        fft_pow2(acc, true);
        double norm = spec.dt() * spec.dx() / spec.nx;
        for (int i = 0; i < spec.nx; ++i) out.at(j, i) = acc[i].real() * norm;
    }
    return out;
}

} // namespace

Grid coeff_C(const LatticeSpec& spec, Extension ext) {
    spec.validate();
    double eps = spec.effective_epsilon();
    Grid c = coeff_C_window(spec, eps);
    if (ext == Extension::EpsilonCut) return c;
    if (spec.d != 1)
        throw std::invalid_argument("coeff_C: log-subtracted extension is d = 1 only");
    // fitted logarithmic trend from one epsilon doubling, referenced to T
    Grid c2 = coeff_C_window(spec, 2.0 * eps);
    double scale = std::log(spec.T / eps) / std::log(2.0);
    Grid out(spec.nt, spec.nx);
    for (size_t i = 0; i < out.a.size(); ++i)
        out.a[i] = c.a[i] - (c.a[i] - c2.a[i]) * scale;
    return out;
}

Grid naive_coincident_covariance(const LatticeSpec& spec) {
    return coeff_C_window(spec, 0.0);
}

} // namespace snse::num
