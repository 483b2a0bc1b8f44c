#ifndef FRACSPEC_SIGNAL_GEN_HPP
#define FRACSPEC_SIGNAL_GEN_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fft.hpp"
#include "types.hpp"

namespace fracspec {

struct ToneSpec {
    double frequency{0.0}; // Hz
    double amplitude{1.0};
    double phase{0.0}; // rad
};

struct NoiseSpec {
    double        sigma{1.0};
    std::uint64_t seed{0};
};

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed for Monte Carlo stream (trial, batch) derived from a base seed:
/// splitmix64(splitmix64(splitmix64(base) ^ trial) ^ batch).
constexpr std::uint64_t stream_seed(std::uint64_t base, std::uint64_t trial, std::uint64_t batch) noexcept {
    return splitmix64(splitmix64(splitmix64(base) ^ trial) ^ batch);
}

/// Standard normal draws: std::mt19937_64 (bit-exact across standard libraries)
/// feeding a Box-Muller transform on 53-bit uniforms. Both outputs of each pair are used.
class GaussianSource {
public:
    explicit GaussianSource(std::uint64_t seed) : _engine(seed) {}

    double next() {
        if (_hasSpare) {
            _hasSpare = false;
            return _spare;
        }
        const double u1     = 1.0 - uniform(); // (0, 1]
        const double u2     = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle  = 2.0 * std::numbers::pi * u2;
        _spare              = radius * std::sin(angle);
        _hasSpare           = true;
        return radius * std::cos(angle);
    }

private:
    double uniform() { return static_cast<double>(_engine() >> 11) * 0x1.0p-53; }

    std::mt19937_64 _engine;
    double          _spare{0.0};
    bool            _hasSpare{false};
};

namespace detail {

inline void check_length(std::size_t n) {
    if (n == 0) {
        throw ConfigError("signal length must be at least 1");
    }
}

inline void check_rate(double sample_rate) {
    if (!std::isfinite(sample_rate) || sample_rate <= 0.0) {
        throw ConfigError("sample rate must be finite and positive");
    }
}

} // namespace detail

inline Signal multi_tone(const std::vector<ToneSpec>& tones, std::size_t n, double sample_rate) {
    detail::check_length(n);
    detail::check_rate(sample_rate);
    for (const auto& tone : tones) {
        if (!(tone.frequency >= 0.0 && tone.frequency < sample_rate / 2.0)) {
            throw ConfigError("tone frequency " + std::to_string(tone.frequency) + " Hz not in [0, Nyquist)");
        }
        if (!std::isfinite(tone.amplitude) || !std::isfinite(tone.phase)) {
            throw ConfigError("tone amplitude and phase must be finite");
        }
    }
    std::vector<double> x(n, 0.0);
    for (const auto& tone : tones) {
        // reduce the cycle count modulo 1 before scaling by 2 pi to keep the argument small
        const double cycles_per_sample = tone.frequency / sample_rate;
        for (std::size_t t = 0; t < n; ++t) {
            const double cycles = std::fmod(cycles_per_sample * static_cast<double>(t), 1.0);
            x[t] += tone.amplitude * std::cos(2.0 * std::numbers::pi * cycles + tone.phase);
        }
    }
    return Signal(std::move(x), sample_rate);
}

/// Tones at f1, f2 and f1 + f2 (unit amplitude) with phase(f1 + f2) = phase(f1) + phase(f2).
inline Signal coupled_triple(double f1, double f2, std::size_t n, double sample_rate, std::pair<double, double> phases = {0.0, 0.0}) {
    return multi_tone({{f1, 1.0, phases.first}, {f2, 1.0, phases.second}, {f1 + f2, 1.0, phases.first + phases.second}}, n, sample_rate);
}

inline Signal gaussian_noise(const NoiseSpec& spec, std::size_t n, double sample_rate) {
    detail::check_length(n);
    detail::check_rate(sample_rate);
    if (!std::isfinite(spec.sigma) || spec.sigma < 0.0) {
        throw ConfigError("noise sigma must be finite and nonnegative");
    }
    GaussianSource      source(spec.seed);
    std::vector<double> x(n);
    for (auto& s : x) {
        s = spec.sigma * source.next() + 0.0; // sigma = 0 gives +0, not -0
    }
    return Signal(std::move(x), sample_rate);
}

/// White Gaussian noise hard-masked in the frequency domain to |f| in [low, high].
inline Signal bandpass_noise(double low, double high, const NoiseSpec& spec, std::size_t n, double sample_rate) {
    detail::check_rate(sample_rate);
    if (!(low > 0.0 && low < high && high < sample_rate / 2.0)) {
        throw ConfigError("band must satisfy 0 < low < high < Nyquist");
    }
    const auto white    = gaussian_noise(spec, n, sample_rate);
    auto       spectrum = fft::forward(white.samples());
    const double resolution = sample_rate / static_cast<double>(n);
    for (std::size_t m = 0; m < n; ++m) {
        const double freq = static_cast<double>(std::min(m, n - m)) * resolution;
        const bool   nyquist = n % 2 == 0 && 2 * m == n;
        if (nyquist || freq < low || freq > high) {
            spectrum[m] = 0.0;
        }
    }
    const auto          back = fft::inverse(spectrum);
    std::vector<double> x(n);
    double              peak = 0.0;
    double              residue = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        x[t]    = back[t].real();
        peak    = std::max(peak, std::abs(x[t]));
        residue = std::max(residue, std::abs(back[t].imag()));
    }
    if (residue >= 1e-12 * std::max(1.0, peak)) {
        throw std::logic_error("bandpass synthesis left an imaginary residue of " + std::to_string(residue));
    }
    return Signal(std::move(x), sample_rate);
}

inline Signal add(const Signal& a, const Signal& b) {
    if (a.size() != b.size() || a.sample_rate() != b.sample_rate()) {
        throw InvalidInput("add needs signals with equal length and sample rate");
    }
    std::vector<double> x(a.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = a[i] + b[i];
    }
    return Signal(std::move(x), a.sample_rate());
}

inline Signal scale(const Signal& a, double c) {
    if (!std::isfinite(c)) {
        throw InvalidInput("scale factor must be finite");
    }
    std::vector<double> x(a.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = c * a[i];
    }
    return Signal(std::move(x), a.sample_rate());
}

/// Circular shift: out[t] = a[(t - s) mod N].
inline Signal circular_shift(const Signal& a, std::int64_t s) {
    const auto          n = static_cast<std::int64_t>(a.size());
    std::vector<double> x(a.size());
    for (std::int64_t t = 0; t < n; ++t) {
        const std::int64_t src = ((t - s) % n + n) % n;
        x[static_cast<std::size_t>(t)] = a[static_cast<std::size_t>(src)];
    }
    return Signal(std::move(x), a.sample_rate());
}

} // namespace fracspec

#endif // FRACSPEC_SIGNAL_GEN_HPP
