#pragma once

#include <cstdint>
#include <vector>

#include "snse/kernels.hpp"

namespace snse::num {

struct Estimate {
    cplx mean{0.0, 0.0};
    double stderror = 0.0;
    long long n = 0;
};

// Sum-based accumulator so that merging batches reproduces the single-batch
// sums exactly.
struct Accumulator {
    cplx sum{0.0, 0.0};
    double sum_abs2 = 0.0;
    long long n = 0;

    void add(cplx z) {
        sum += z;
        sum_abs2 += std::norm(z);
        ++n;
    }
    void merge(const Accumulator& o) {
        sum += o.sum;
        sum_abs2 += o.sum_abs2;
        n += o.n;
    }
    Estimate estimate() const;
};

Estimate merge(const Estimate& a, const Estimate& b);   // exact-mean merge via sums

// Deterministic per-realization noise: the field is a function of
// (seed, realization index) only, independent of threading or batching.
uint64_t mix_seed(uint64_t seed, uint64_t index);

// One realization of complex white noise, cell variance 1/(dt dx) split
// evenly between real and imaginary parts, E[xi xi] = 0 by construction.
Grid white_noise(const LatticeSpec& spec, uint64_t seed, uint64_t index);

// Stochastic convolution for one noise realization: the solution of the
// linear equation with vanishing data, driven by the cutoff noise. The
// overload taking the sampled cutoff avoids rebuilding it per realization.
Grid stochastic_convolution(const LatticeSpec& spec, const Grid& noise);
Grid stochastic_convolution(const LatticeSpec& spec, const Grid& noise, const Grid& chi);

struct ObservablePair {
    const TestFunction* f1;
    const TestFunction* f2;
};

struct LinearStats {
    Estimate covariance;    // E[ phi(f1) conj-field(f2) ]
    Estimate pseudo;        // E[ phi(f1) phi(f2) ]
    Estimate mean1;         // E[ phi(f1) ]
    Estimate mean2;         // E[ phi(f2) ]
};

std::vector<LinearStats> simulate_linear(const LatticeSpec& spec, long long n_real,
                                         const std::vector<ObservablePair>& observables,
                                         uint64_t seed, int threads = 0);

// First-order Monte Carlo oracle: one fixed-point iterate
//   psi = phi + lambda G_chi ** (conj(phi) phi^2 - 2 s phi),
// where s shifts the coinciding-point covariance of the naive lattice
// product to the configured epsilon extension, so the symbolic and Monte
// Carlo sides share one extension choice.
struct FirstOrderStats {
    double lambda = 0.0;
    Estimate two_point;         // E[ psi(f1) conj-field(f2) ] at this lambda
    Estimate slope;             // paired estimate of (E_lambda - E_0)/lambda
    Estimate mean_psi;          // E[ psi(f1) ]
};

struct FirstOrderRun {
    Estimate linear_two_point;  // lambda = 0 baseline
    std::vector<FirstOrderStats> per_lambda;
};

FirstOrderRun simulate_first_order(const LatticeSpec& spec, const std::vector<double>& lambdas,
                                   long long n_real, const TestFunction& f1,
                                   const TestFunction& f2, Extension ext, uint64_t seed,
                                   int threads = 0);

} // namespace snse::num
