#pragma once

#include <array>
#include <vector>

#include "snse/kernels.hpp"

namespace snse::num {

struct ScalingOptions {
    int nscales = 4;                 // dyadic scales 1, 1/2, ...
    double t_lo_frac = 0.2;          // pairing window at scale 1, fractions of T
    double t_hi_frac = 0.5;
    double x_halfwidth_frac = 0.006; // spatial window around the origin; keep it
                                     // inside the dispersive cone at the probed times
    double residual_threshold = 0.25;
};

struct ScalingFit {
    double estimate = 0.0;           // weighted scaling degree
    double max_residual = 0.0;       // worst log-log deviation from the fit
    bool reliable = false;
    std::vector<std::array<double, 2>> points;   // (log lambda, log pairing)
};

// Transversal magnitude profile of the kernel toward the equal-time surface:
// pairs |u| against time windows contracted parabolically (time scales with
// the given weight, space held fixed) and fits the log-log slope.
ScalingFit scaling_degree_estimate(const KernelGrid& kernel, int time_weight = 2,
                                   const ScalingOptions& opt = {});

struct DecayDirection {
    double omega = 0.0;   // frequency bin direction
    double k = 0.0;       // momentum bin direction
};

struct DecayFit {
    DecayDirection dir;
    double exponent = 0.0;           // fitted p in |transform| ~ R^-p
    std::vector<std::array<double, 2>> points;
};

// Fourier decay of f * G along rays. The time axis is centered: grid row j
// is time (j - nt/2) dt and the causal kernel occupies the upper half. The
// test function should be nonzero at the t = 0 row.
std::vector<DecayFit> directional_decay_test(const LatticeSpec& spec, const TestFunction& f,
                                             const std::vector<DecayDirection>& dirs,
                                             int r_lo = 8, int r_hi = 64);

} // namespace snse::num
