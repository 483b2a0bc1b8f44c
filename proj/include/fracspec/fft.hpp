#ifndef FRACSPEC_FFT_HPP
#define FRACSPEC_FFT_HPP

#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace fracspec::fft {

using cplx = std::complex<double>;

namespace detail {

// exp(-i*2*pi*num/den) with the angle reduced to [0, den) in integer arithmetic first
inline cplx unit_root(std::uint64_t num, std::uint64_t den) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(num % den) / static_cast<double>(den);
    return {std::cos(angle), std::sin(angle)};
}

inline void radix2_inplace(std::vector<cplx>& a) {
    const std::size_t n = a.size();
    if (n <= 1) {
        return;
    }
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) {
            j ^= bit;
        }
        j ^= bit;
        if (i < j) {
            std::swap(a[i], a[j]);
        }
    }
    std::vector<cplx> twiddle(n / 2);
    for (std::size_t i = 0; i < n / 2; ++i) {
        twiddle[i] = unit_root(i, n);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half   = len / 2;
        const std::size_t stride = n / len;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t j = 0; j < half; ++j) {
                const cplx t       = twiddle[j * stride] * a[start + j + half];
                a[start + j + half] = a[start + j] - t;
                a[start + j] += t;
            }
        }
    }
}

// Bluestein chirp-z for lengths that are not powers of two.
inline std::vector<cplx> bluestein(std::span<const cplx> x) {
    const std::size_t n = x.size();
    const std::size_t m = std::bit_ceil(2 * n - 1);
    std::vector<cplx> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::uint64_t sq = (static_cast<std::uint64_t>(k) * k) % (2 * n);
        chirp[k]               = unit_root(sq, 2 * n);
    }
    std::vector<cplx> a(m), b(m);
    for (std::size_t k = 0; k < n; ++k) {
        a[k] = x[k] * chirp[k];
    }
    b[0] = std::conj(chirp[0]);
    for (std::size_t k = 1; k < n; ++k) {
        b[k] = b[m - k] = std::conj(chirp[k]);
    }
    radix2_inplace(a);
    radix2_inplace(b);
    for (std::size_t i = 0; i < m; ++i) {
        a[i] = std::conj(a[i] * b[i]);
    }
    radix2_inplace(a); // conj-forward-conj is the unnormalized inverse
    std::vector<cplx> out(n);
    const double      inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = chirp[k] * std::conj(a[k]) * inv_m;
    }
    return out;
}

} // namespace detail

/// Unnormalized forward DFT: out[m] = sum_t x[t] exp(-i 2 pi m t / n).
inline std::vector<cplx> forward(std::span<const cplx> x) {
    if (x.empty()) {
        return {};
    }
    if (std::has_single_bit(x.size())) {
        std::vector<cplx> a(x.begin(), x.end());
        detail::radix2_inplace(a);
        return a;
    }
    return detail::bluestein(x);
}

inline std::vector<cplx> forward(std::span<const double> x) {
    std::vector<cplx> c(x.begin(), x.end());
    return forward(std::span<const cplx>(c));
}

/// Normalized inverse DFT (1/n), so inverse(forward(x)) == x up to rounding.
inline std::vector<cplx> inverse(std::span<const cplx> spectrum) {
    std::vector<cplx> c(spectrum.size());
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        c[i] = std::conj(spectrum[i]);
    }
    auto         out   = forward(std::span<const cplx>(c));
    const double scale = out.empty() ? 0.0 : 1.0 / static_cast<double>(out.size());
    for (auto& v : out) {
        v = std::conj(v) * scale;
    }
    return out;
}

} // namespace fracspec::fft

#endif // FRACSPEC_FFT_HPP
