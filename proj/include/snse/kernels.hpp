#pragma once

#include "snse/lattice.hpp"

namespace snse::num {

// Translation-invariant kernel sampled at nonnegative time offsets; the
// offset grid row j holds the kernel at time lag j*dt. Causal kernels are
// identically zero at lag <= 0 (row 0 is zero). For d > 1 the data holds the
// one-axis spectral factor; sample_point assembles the separable product.
struct KernelGrid {
    LatticeSpec spec;
    std::string kind;
    bool conjugated = false;
    Grid data;

    cplx at_offset(int j, int i) const {        // signed time offset
        if (j <= 0) return 0.0;
        return data.at(j, ((i % spec.nx) + spec.nx) % spec.nx);
    }
    cplx sample_point(int j, const std::vector<int>& xidx) const;
};

// Fundamental solution of the lattice Schroedinger operator, built
// spectrally so the discrete equation holds exactly. bar=true returns the
// conjugate kernel.
KernelGrid kernel_G(const LatticeSpec& spec, bool bar = false);

// Pointwise |G|^2 on the offset grid (the coinciding-point product before
// any extension choice).
KernelGrid kernel_G_abs2(const LatticeSpec& spec);

// Discrete Schroedinger operator matching the spectral construction;
// applied to kernel_G it returns the unit lattice delta at the origin.
Grid apply_schrodinger_lhs(const LatticeSpec& spec, const KernelGrid& g);

// Spectral causal propagation. forward: out(a) = sum_z G(a,z) src(z) dt dx.
// adjoint: out(z) = sum_a f(a) G(a,z) dt dx. bar selects the conjugate
// kernel. Strictly causal: forward output at time j sees sources at < j.
Grid propagate_forward(const LatticeSpec& spec, const Grid& src, bool bar);
Grid propagate_adjoint(const LatticeSpec& spec, const Grid& f, bool bar);

// Covariance kernel evaluator Q(a,b) = sum_z G_chi(a,z) conj(G_chi(b,z)),
// rows of the cutoff kernel G_chi(a,z) = G(a,z) chi(z).
class QKernel {
public:
    explicit QKernel(const LatticeSpec& spec);

    // Q(f1 (x) f2): both-slot pairing.
    cplx pair(const Grid& f1, const Grid& f2) const;
    // out(a) = sum_b Q(a,b) g(b) dt dx
    Grid apply_second(const Grid& g) const;
    // out(b) = sum_a g(a) Q(a,b) dt dx
    Grid apply_first(const Grid& g) const;

    const LatticeSpec& spec() const { return spec_; }

private:
    LatticeSpec spec_;
    Grid chi_;
};

enum class Extension { EpsilonCut, EpsilonCutLogSub };

// Coinciding-point kernel Cbar on the grid: the cutoff-weighted time
// integral of |G|^2 with the window |t - t'| <= epsilon removed. The logsub
// extension additionally subtracts the fitted logarithmic epsilon trend
// (d = 1 only). Real-valued; the plain C grid is its conjugate.
Grid coeff_C(const LatticeSpec& spec, Extension ext);
// Same sum with only the strict-causality cut (every lag >= dt): the naive
// lattice coinciding-point covariance.
Grid naive_coincident_covariance(const LatticeSpec& spec);

} // namespace snse::num
