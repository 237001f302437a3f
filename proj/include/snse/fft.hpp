#pragma once

#include <complex>
#include <vector>

namespace snse::num {

using cplx = std::complex<double>;

bool is_pow2(int n);

// In-place radix-2 transform, unnormalized. inverse=true applies the
// conjugate transform (still unnormalized; divide by n for the inverse).
void fft_pow2(cplx* a, int n, bool inverse);
void fft_pow2(std::vector<cplx>& a, bool inverse);

} // namespace snse::num
