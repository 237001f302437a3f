#include "snse/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace snse::num {

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

void fft_pow2(cplx* a, int n, bool inverse) {
    if (!is_pow2(n)) throw std::invalid_argument("fft: length must be a power of two");
    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        double ang = 2.0 * M_PI / len * (inverse ? 1.0 : -1.0);
        cplx wl(std::cos(ang), std::sin(ang));
        for (int i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (int j = 0; j < len / 2; ++j) {
                cplx u = a[i + j];
                cplx v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

void fft_pow2(std::vector<cplx>& a, bool inverse) { fft_pow2(a.data(), int(a.size()), inverse); }

} // namespace snse::num
