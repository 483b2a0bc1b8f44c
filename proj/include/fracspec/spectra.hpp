#ifndef FRACSPEC_SPECTRA_HPP
#define FRACSPEC_SPECTRA_HPP

// Direct (triple-product) bispectrum and fractional-bispectrum estimators.
//
// Conventions: unnormalized forward DFT, N-periodic bin indexing. A fractional
// index u + k*v is reduced modulo N into the periodic coefficient sequence and
// evaluated by nearest-bin or linear interpolation, or exactly for rational
// k = p/q through the q-fold zero-padded (fine-grid) DFT.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "fft.hpp"
#include "types.hpp"

namespace fracspec {

namespace detail {

inline void check_extent(std::size_t n, std::size_t extent) {
    if (n < 2) {
        throw InvalidInput("grid operations need at least two samples");
    }
    if (extent == 0 || extent > n / 2) {
        throw ConfigError("grid extent " + std::to_string(extent) + " outside [1, " + std::to_string(n / 2) + "]");
    }
}

inline std::size_t wrap_index(std::int64_t i, std::int64_t n) noexcept {
    const std::int64_t r = i % n;
    return static_cast<std::size_t>(r < 0 ? r + n : r);
}

inline double cube_of_peak(std::span<const cplx> coeffs) noexcept {
    double peak = 0.0;
    for (const auto& c : coeffs) {
        peak = std::max(peak, std::abs(c));
    }
    return peak * peak * peak;
}

/// DFT of the signal zero-padded to q*N samples; bin j sits at fractional coarse bin j/q.
inline std::vector<cplx> fine_spectrum(std::span<const double> x, std::int64_t q) {
    std::vector<cplx> padded(x.size() * static_cast<std::size_t>(q));
    std::copy(x.begin(), x.end(), padded.begin());
    return fft::forward(std::span<const cplx>(padded));
}

} // namespace detail

inline Spectrum dft_forward(const Signal& signal) {
    return Spectrum{fft::forward(signal.samples()), signal.sample_rate()};
}

/// Value of the N-periodic coefficient sequence at a real index.
inline cplx spectrum_value_at(const Spectrum& spectrum, double index, Interp interp) {
    if (!std::isfinite(index)) {
        throw InvalidInput("spectrum index must be finite");
    }
    if (interp == Interp::exact_rational) {
        throw ConfigError("spectrum_value_at supports nearest and linear interpolation only");
    }
    const auto&  c = spectrum.coefficients;
    const double n = static_cast<double>(c.size());
    double       r = std::fmod(index, n);
    if (r < 0.0) {
        r += n;
    }
    if (r >= n) {
        r -= n;
    }
    if (interp == Interp::nearest) {
        return c[static_cast<std::size_t>(std::floor(r + 0.5)) % c.size()];
    }
    const double      lo   = std::floor(r);
    const double      frac = r - lo;
    const std::size_t i0   = static_cast<std::size_t>(lo);
    if (frac == 0.0) {
        return c[i0];
    }
    return (1.0 - frac) * c[i0] + frac * c[(i0 + 1) % c.size()];
}

/// values(u, v) = X(u) X(v) conj(X(u + v)) for u, v in [0, extent).
inline BifrequencyGrid bispectrum_direct(const Spectrum& spectrum, std::size_t extent) {
    const auto& c = spectrum.coefficients;
    detail::check_extent(c.size(), extent);
    BifrequencyGrid grid{.values = Matrix<cplx>(extent, extent), .k = 1.0, .bin_resolution = spectrum.bin_resolution()};
    grid.estimator.detrend = Detrend::none;
    grid.reference_scale   = detail::cube_of_peak(c);
    for (std::size_t u = 0; u < extent; ++u) {
        for (std::size_t v = 0; v < extent; ++v) {
            grid.values(u, v) = c[u] * c[v] * std::conj(c[(u + v) % c.size()]);
        }
    }
    return grid;
}

/// values(u, v) = X(u) X(v) conj(X(u + k v)) with X interpolated off the bin grid.
inline BifrequencyGrid fractional_bispectrum_direct(const Spectrum& spectrum, double k, std::size_t extent, Interp interp) {
    if (!std::isfinite(k)) {
        throw InvalidInput("k must be finite");
    }
    if (interp == Interp::exact_rational) {
        throw ConfigError("use fractional_bispectrum_exact_rational for exact evaluation");
    }
    const auto& c = spectrum.coefficients;
    detail::check_extent(c.size(), extent);
    BifrequencyGrid grid{.values = Matrix<cplx>(extent, extent), .k = k, .bin_resolution = spectrum.bin_resolution()};
    grid.estimator.detrend = Detrend::none;
    grid.estimator.interp  = interp;
    grid.reference_scale   = detail::cube_of_peak(c);
    for (std::size_t u = 0; u < extent; ++u) {
        for (std::size_t v = 0; v < extent; ++v) {
            const double index = static_cast<double>(u) + k * static_cast<double>(v);
            grid.values(u, v)  = c[u] * c[v] * std::conj(spectrum_value_at(spectrum, index, interp));
        }
    }
    return grid;
}

namespace detail {

inline Matrix<cplx> exact_rational_values(std::span<const cplx> coarse, std::span<const cplx> fine, Ratio ratio, std::size_t extent) {
    const auto   fine_n = static_cast<std::int64_t>(fine.size());
    Matrix<cplx> values(extent, extent);
    for (std::size_t u = 0; u < extent; ++u) {
        for (std::size_t v = 0; v < extent; ++v) {
            const std::int64_t j = ratio.q * static_cast<std::int64_t>(u) + ratio.p * static_cast<std::int64_t>(v);
            values(u, v)         = coarse[u] * coarse[v] * std::conj(fine[wrap_index(j, fine_n)]);
        }
    }
    return values;
}

} // namespace detail

/// Fractional bispectrum for k = p/q with X(u + k v) read from the q-fold fine-grid DFT
/// (trigonometric interpolation of the spectrum), so no interpolation error is introduced.
inline BifrequencyGrid fractional_bispectrum_exact_rational(const Signal& signal, Ratio ratio, std::size_t extent) {
    ratio.validate();
    detail::check_extent(signal.size(), extent);
    const auto coarse = fft::forward(signal.samples());
    const auto fine   = ratio.q == 1 ? coarse : detail::fine_spectrum(signal.samples(), ratio.q);

    BifrequencyGrid grid{.values = detail::exact_rational_values(coarse, fine, ratio, extent), .k = ratio.value(), .bin_resolution = signal.sample_rate() / static_cast<double>(signal.size())};
    grid.estimator.detrend    = Detrend::none;
    grid.estimator.interp     = Interp::exact_rational;
    grid.estimator.rational_k = ratio;
    grid.reference_scale      = detail::cube_of_peak(coarse);
    return grid;
}

/// Full N x N exact fractional bispectrum over every bin pair.
///
/// Columns v > N/2 stand for the negative frequency v - N, so that
/// F(N-u, N-v) = conj F(u, v) holds for real signals. For even N the Nyquist
/// column is split evenly between +N/2 and -N/2. This is the frequency-domain
/// side of the Fourier pair with fractional_triple_correlation.
inline Matrix<cplx> full_fractional_bispectrum(const Signal& signal, Ratio ratio) {
    ratio.validate();
    const std::size_t n = signal.size();
    if (n < 2) {
        throw InvalidInput("grid operations need at least two samples");
    }
    const auto         coarse = fft::forward(signal.samples());
    const auto         fine   = detail::fine_spectrum(signal.samples(), ratio.q);
    const auto         fine_n = static_cast<std::int64_t>(fine.size());
    const auto         sn     = static_cast<std::int64_t>(n);
    const bool         even   = n % 2 == 0;
    Matrix<cplx>       values(n, n);
    for (std::int64_t u = 0; u < sn; ++u) {
        for (std::int64_t v = 0; v < sn; ++v) {
            const cplx head = coarse[static_cast<std::size_t>(u)] * coarse[static_cast<std::size_t>(v)];
            if (even && 2 * v == sn) {
                const cplx up   = std::conj(fine[detail::wrap_index(ratio.q * u + ratio.p * v, fine_n)]);
                const cplx down = std::conj(fine[detail::wrap_index(ratio.q * u - ratio.p * v, fine_n)]);
                values(static_cast<std::size_t>(u), static_cast<std::size_t>(v)) = head * (0.5 * (up + down));
                continue;
            }
            const std::int64_t signed_v = 2 * v > sn ? v - sn : v;
            const cplx         tail     = std::conj(fine[detail::wrap_index(ratio.q * u + ratio.p * signed_v, fine_n)]);
            values(static_cast<std::size_t>(u), static_cast<std::size_t>(v)) = head * tail;
        }
    }
    return values;
}

/// Start offsets of the analysis segments; a single segment when segment_length is 0.
inline std::vector<std::size_t> segment_starts(std::size_t n, const EstimatorConfig& config) {
    const std::size_t length = config.segment_length == 0 ? n : config.segment_length;
    if (length == 0 || n < length) {
        throw InvalidInput("signal of " + std::to_string(n) + " samples is shorter than one segment of " + std::to_string(length));
    }
    if (config.segment_length == 0) {
        return {0};
    }
    const auto hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(static_cast<double>(length) * (1.0 - config.overlap_fraction))));
    std::vector<std::size_t> starts;
    for (std::size_t s = 0; s + length <= n; s += hop) {
        starts.push_back(s);
    }
    return starts;
}

/// Detrended and windowed copy of one segment.
inline std::vector<double> prepare_segment(std::span<const double> segment, const EstimatorConfig& config) {
    std::vector<double> out(segment.begin(), segment.end());
    if (config.detrend == Detrend::remove_mean) {
        double sum = 0.0;
        for (double x : out) {
            sum += x;
        }
        const double mean = sum / static_cast<double>(out.size());
        for (double& x : out) {
            x -= mean;
        }
    }
    if (config.window == Window::hann) {
        const double len = static_cast<double>(out.size());
        for (std::size_t t = 0; t < out.size(); ++t) {
            out[t] *= 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(t) / len);
        }
    }
    return out;
}

/// Segment-averaged fractional bispectrum (sample-mean realization of the expectation).
/// With interp = exact_rational the ratio in config fixes k; the k argument must agree with it.
inline BifrequencyGrid averaged_fractional_bispectrum(const Signal& signal, double k, const EstimatorConfig& config, std::size_t extent) {
    config.validate();
    if (!std::isfinite(k)) {
        throw InvalidInput("k must be finite");
    }
    if (config.interp == Interp::exact_rational && std::abs(config.rational_k->value() - k) > 1e-12 * std::max(1.0, std::abs(k))) {
        throw ConfigError("k does not match the configured rational_k");
    }
    const auto        starts = segment_starts(signal.size(), config);
    const std::size_t length = config.segment_length == 0 ? signal.size() : config.segment_length;
    detail::check_extent(length, extent);

    BifrequencyGrid grid{.values = Matrix<cplx>(extent, extent), .k = k, .bin_resolution = signal.sample_rate() / static_cast<double>(length), .estimator = config, .segments_averaged = starts.size()};
    double          scale_sum = 0.0;
    for (std::size_t start : starts) {
        const auto segment = prepare_segment(signal.samples().subspan(start, length), config);
        const auto coarse  = fft::forward(std::span<const double>(segment));
        scale_sum += detail::cube_of_peak(coarse);

        Matrix<cplx> values;
        if (config.interp == Interp::exact_rational) {
            const Ratio ratio = *config.rational_k;
            const auto  fine  = ratio.q == 1 ? coarse : detail::fine_spectrum(segment, ratio.q);
            values            = detail::exact_rational_values(coarse, fine, ratio, extent);
        } else {
            values = fractional_bispectrum_direct(Spectrum{coarse, signal.sample_rate()}, k, extent, config.interp).values;
        }
        auto acc = grid.values.flat();
        auto add = values.flat();
        for (std::size_t i = 0; i < acc.size(); ++i) {
            acc[i] += add[i];
        }
    }
    const double inv = 1.0 / static_cast<double>(starts.size());
    for (auto& v : grid.values.flat()) {
        v *= inv;
    }
    grid.reference_scale = scale_sum * inv;
    return grid;
}

} // namespace fracspec

#endif // FRACSPEC_SPECTRA_HPP
