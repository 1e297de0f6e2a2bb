#ifndef FEXP_FFT_HPP
#define FEXP_FFT_HPP

#include <complex>
#include <cstddef>
#include <vector>

#include "fexp/errors.hpp"

namespace fexp {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
/// (2 pi)^2, the d = 2 spectral normalization constant.
inline constexpr double kFourPiSq = kTwoPi * kTwoPi;

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Iterative radix-2 Cooley-Tukey. sign = -1 forward (e^{-2pi i kt/n}),
/// sign = +1 inverse kernel (unscaled).
inline void fft_pow2(std::vector<cplx>& a, int sign) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * kTwoPi / static_cast<double>(len);
        const cplx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

}  // namespace detail

/// DFT of arbitrary length: X_k = sum_t a_t e^{sign * 2pi i kt/n}.
/// Radix-2 in place when n is a power of two, Bluestein's chirp-z otherwise.
/// No scaling is applied; callers divide by n where the inverse transform
/// is meant as an average.
inline void dft(std::vector<cplx>& a, int sign) {
    const std::size_t n = a.size();
    if (n <= 1) return;
    if (detail::is_pow2(n)) {
        detail::fft_pow2(a, sign);
        return;
    }
    // Bluestein: X_k = conj(c_k) * IFFT(FFT(a_t conj(c_t)) .* FFT(c)) with
    // chirp c_t = e^{sign * pi i t^2 / n}; phases reduced mod 2n for accuracy.
    std::size_t L = 1;
    while (L < 2 * n - 1) L <<= 1;
    std::vector<cplx> chirp(n);
    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t q = (t * t) % (2 * n);
        const double ang = sign * kPi * static_cast<double>(q) / static_cast<double>(n);
        chirp[t] = cplx(std::cos(ang), std::sin(ang));
    }
    std::vector<cplx> u(L, cplx(0.0, 0.0));
    std::vector<cplx> v(L, cplx(0.0, 0.0));
    for (std::size_t t = 0; t < n; ++t) u[t] = a[t] * chirp[t];
    v[0] = std::conj(chirp[0]);
    for (std::size_t t = 1; t < n; ++t) {
        v[t] = std::conj(chirp[t]);
        v[L - t] = std::conj(chirp[t]);
    }
    detail::fft_pow2(u, -1);
    detail::fft_pow2(v, -1);
    for (std::size_t i = 0; i < L; ++i) u[i] *= v[i];
    detail::fft_pow2(u, +1);
    const double inv = 1.0 / static_cast<double>(L);
    for (std::size_t k = 0; k < n; ++k) a[k] = chirp[k] * (u[k] * inv);
}

/// 2-D DFT over an n1 x n2 row-major grid (row-column algorithm).
inline void dft2(std::vector<cplx>& grid, std::size_t n1, std::size_t n2, int sign) {
    if (grid.size() != n1 * n2) throw validation_error("dft2: grid size mismatch");
    std::vector<cplx> scratch;
    scratch.resize(n2);
    for (std::size_t r = 0; r < n1; ++r) {
        for (std::size_t c = 0; c < n2; ++c) scratch[c] = grid[r * n2 + c];
        dft(scratch, sign);
        for (std::size_t c = 0; c < n2; ++c) grid[r * n2 + c] = scratch[c];
    }
    scratch.resize(n1);
    for (std::size_t c = 0; c < n2; ++c) {
        for (std::size_t r = 0; r < n1; ++r) scratch[r] = grid[r * n2 + c];
        dft(scratch, sign);
        for (std::size_t r = 0; r < n1; ++r) grid[r * n2 + c] = scratch[r];
    }
}

}  // namespace fexp

#endif  // FEXP_FFT_HPP
