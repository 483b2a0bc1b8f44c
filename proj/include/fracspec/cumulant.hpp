#ifndef FRACSPEC_CUMULANT_HPP
#define FRACSPEC_CUMULANT_HPP

// Time-domain triple correlations with circular (mod N) lags.
//
// Lags are nonnegative offsets; a negative lag -r is the same as N - r.
// Fractional times tau + (p/q) t are read from the q-fold band-limited
// (trigonometric) upsampling of the signal, which is the exact time-domain
// dual of the fine-grid spectrum used by fractional_bispectrum_exact_rational.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "fft.hpp"
#include "spectra.hpp"
#include "types.hpp"

namespace fracspec {

inline double triple_correlation(const Signal& signal, std::int64_t rho, std::int64_t tau) {
    const auto x = signal.samples();
    const auto n = static_cast<std::int64_t>(x.size());
    double     sum = 0.0;
    for (std::int64_t t = 0; t < n; ++t) {
        sum += x[detail::wrap_index(t + rho, n)] * x[detail::wrap_index(t + tau, n)] * x[static_cast<std::size_t>(t)];
    }
    return sum;
}

/// Band-limited interpolant of the periodic signal sampled at t = j / q, j in [0, qN).
/// For even N the Nyquist coefficient is shared equally between +N/2 and -N/2 so the
/// interpolant stays real. Samples at integer times are copied from the input exactly.
inline std::vector<double> band_limited_upsample(const Signal& signal, std::int64_t q) {
    if (q <= 0) {
        throw ConfigError("upsampling factor must be positive");
    }
    const auto        x = signal.samples();
    const std::size_t n = x.size();
    const auto        uq = static_cast<std::size_t>(q);
    std::vector<double> out(n * uq);
    if (q == 1) {
        std::copy(x.begin(), x.end(), out.begin());
        return out;
    }
    const auto        coarse = fft::forward(x);
    const std::size_t fine_n = n * uq;
    std::vector<cplx> fine(fine_n);
    for (std::size_t m = 0; m < n; ++m) {
        if (n % 2 == 0 && 2 * m == n) {
            fine[m] += 0.5 * coarse[m];
            fine[fine_n - m] += 0.5 * coarse[m];
        } else if (2 * m < n) {
            fine[m] = coarse[m];
        } else {
            fine[fine_n - (n - m)] = coarse[m];
        }
    }
    const auto   values = fft::inverse(fine);
    const double gain   = static_cast<double>(q);
    for (std::size_t j = 0; j < fine_n; ++j) {
        out[j] = j % uq == 0 ? x[j / uq] : gain * values[j].real();
    }
    return out;
}

namespace detail {

inline double fractional_correlation_from(std::span<const double> x, std::span<const double> upsampled, Ratio ratio, std::int64_t rho, std::int64_t tau) {
    const auto n      = static_cast<std::int64_t>(x.size());
    const auto fine_n = static_cast<std::int64_t>(upsampled.size());
    double     sum    = 0.0;
    for (std::int64_t t = 0; t < n; ++t) {
        const double shifted = upsampled[wrap_index(ratio.q * tau + ratio.p * t, fine_n)];
        sum += x[wrap_index(t + rho, n)] * shifted * x[static_cast<std::size_t>(t)];
    }
    return sum;
}

} // namespace detail

/// sum_t x(t + rho) x(tau + k t) x(t) for k = p/q, circular in t.
inline double fractional_triple_correlation(const Signal& signal, std::int64_t rho, std::int64_t tau, Ratio ratio) {
    ratio.validate();
    const auto up = band_limited_upsample(signal, ratio.q);
    return detail::fractional_correlation_from(signal.samples(), up, ratio, rho, tau);
}

inline CumulantGrid cumulant_grid(const Signal& signal, Ratio ratio, std::size_t extent) {
    ratio.validate();
    if (extent == 0 || extent > signal.size()) {
        throw ConfigError("lag extent " + std::to_string(extent) + " outside [1, " + std::to_string(signal.size()) + "]");
    }
    const auto   up = band_limited_upsample(signal, ratio.q);
    CumulantGrid grid{.values = Matrix<double>(extent, extent), .k = ratio.value(), .lag_resolution = 1.0 / signal.sample_rate()};
    for (std::size_t rho = 0; rho < extent; ++rho) {
        for (std::size_t tau = 0; tau < extent; ++tau) {
            grid.values(rho, tau) = detail::fractional_correlation_from(signal.samples(), up, ratio, static_cast<std::int64_t>(rho), static_cast<std::int64_t>(tau));
        }
    }
    return grid;
}

inline constexpr std::size_t kFourierPairMaxLength = 128;

/// Max |DFT2(R_F) - F| between the 2D forward DFT of the full lag grid and the full
/// frequency-domain triple-product grid, relative to max(max |F|, max |X|^3). The cube
/// bounds every |F| and keeps the ratio meaningful when the triple products cancel.
inline double verify_fourier_pair(const Signal& signal, Ratio ratio, std::size_t max_length = kFourierPairMaxLength) {
    ratio.validate();
    const std::size_t n = signal.size();
    if (n > max_length) {
        throw ConfigError("signal length " + std::to_string(n) + " exceeds the brute-force cap of " + std::to_string(max_length));
    }
    const auto lag       = cumulant_grid(signal, ratio, n).values;
    const auto frequency = full_fractional_bispectrum(signal, ratio);

    // separable 2D DFT by direct summation with an exact-angle twiddle table
    std::vector<cplx> twiddle(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double angle = -2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
        twiddle[i]         = {std::cos(angle), std::sin(angle)};
    }
    Matrix<cplx> rows(n, n); // rows(rho, v) = sum_tau R(rho, tau) w^(v tau)
    for (std::size_t rho = 0; rho < n; ++rho) {
        for (std::size_t v = 0; v < n; ++v) {
            cplx acc{};
            for (std::size_t tau = 0; tau < n; ++tau) {
                acc += lag(rho, tau) * twiddle[(v * tau) % n];
            }
            rows(rho, v) = acc;
        }
    }
    double max_diff = 0.0;
    double max_ref  = 0.0;
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = 0; v < n; ++v) {
            cplx acc{};
            for (std::size_t rho = 0; rho < n; ++rho) {
                acc += rows(rho, v) * twiddle[(u * rho) % n];
            }
            max_diff = std::max(max_diff, std::abs(acc - frequency(u, v)));
            max_ref  = std::max(max_ref, std::abs(frequency(u, v)));
        }
    }
    for (const auto& c : fft::forward(signal.samples())) {
        max_ref = std::max(max_ref, std::abs(c) * std::abs(c) * std::abs(c));
    }
    if (max_ref == 0.0) {
        return max_diff;
    }
    return max_diff / max_ref;
}

} // namespace fracspec

#endif // FRACSPEC_CUMULANT_HPP
