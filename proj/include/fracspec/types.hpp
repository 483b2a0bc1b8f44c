#ifndef FRACSPEC_TYPES_HPP
#define FRACSPEC_TYPES_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fracspec {

using cplx = std::complex<double>;

/// Bad data: non-finite samples, mismatched lengths, signals too short for the request.
struct InvalidInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Bad parameters: grid extents, ratios, estimator settings.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Real-valued, uniformly sampled sequence.
class Signal {
public:
    Signal(std::vector<double> samples, double sample_rate) : _samples(std::move(samples)), _sampleRate(sample_rate) {
        if (_samples.empty()) {
            throw InvalidInput("signal must contain at least one sample");
        }
        if (!std::isfinite(_sampleRate) || _sampleRate <= 0.0) {
            throw InvalidInput("sample rate must be finite and positive");
        }
        for (std::size_t i = 0; i < _samples.size(); ++i) {
            if (!std::isfinite(_samples[i])) {
                throw InvalidInput("non-finite sample at index " + std::to_string(i));
            }
        }
    }

    static Signal zeros(std::size_t n, double sample_rate) { return Signal(std::vector<double>(n, 0.0), sample_rate); }

    [[nodiscard]] std::span<const double>    samples() const noexcept { return _samples; }
    [[nodiscard]] const std::vector<double>& data() const noexcept { return _samples; }
    [[nodiscard]] double                     sample_rate() const noexcept { return _sampleRate; }
    [[nodiscard]] std::size_t                size() const noexcept { return _samples.size(); }
    [[nodiscard]] double                     operator[](std::size_t i) const noexcept { return _samples[i]; }

    bool operator==(const Signal&) const = default;

private:
    std::vector<double> _samples;
    double              _sampleRate;
};

/// Unnormalized forward DFT coefficients of one signal or segment.
struct Spectrum {
    std::vector<cplx> coefficients;
    double            sample_rate{1.0};

    [[nodiscard]] std::size_t origin_length() const noexcept { return coefficients.size(); }
    [[nodiscard]] double      bin_resolution() const noexcept { return sample_rate / static_cast<double>(coefficients.size()); }
    [[nodiscard]] const cplx& operator[](std::size_t m) const noexcept { return coefficients[m]; }
};

/// Dense row-major 2D array; rows index the first argument (u or rho).
template<typename T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, T fill = T{}) : _rows(rows), _cols(cols), _data(rows * cols, fill) {}

    [[nodiscard]] std::size_t rows() const noexcept { return _rows; }
    [[nodiscard]] std::size_t cols() const noexcept { return _cols; }
    [[nodiscard]] T&          operator()(std::size_t r, std::size_t c) noexcept { return _data[r * _cols + c]; }
    [[nodiscard]] const T&    operator()(std::size_t r, std::size_t c) const noexcept { return _data[r * _cols + c]; }
    [[nodiscard]] std::span<T>       flat() noexcept { return _data; }
    [[nodiscard]] std::span<const T> flat() const noexcept { return _data; }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t    _rows{0};
    std::size_t    _cols{0};
    std::vector<T> _data;
};

/// k = p / q in lowest terms with q > 0.
struct Ratio {
    std::int64_t p{1};
    std::int64_t q{1};

    void validate() const {
        if (q <= 0) {
            throw ConfigError("rational k requires a positive denominator");
        }
        if (std::gcd(p < 0 ? -p : p, q) != 1) {
            throw ConfigError("rational k " + std::to_string(p) + "/" + std::to_string(q) + " is not in lowest terms");
        }
    }
    [[nodiscard]] double value() const noexcept { return static_cast<double>(p) / static_cast<double>(q); }

    bool operator==(const Ratio&) const = default;
};

/// Best rational approximation with denominator <= max_den, via continued fractions.
/// Returns nullopt when no such fraction is within tol of k.
inline std::optional<Ratio> to_ratio(double k, std::int64_t max_den = 64, double tol = 1e-12) {
    if (!std::isfinite(k)) {
        return std::nullopt;
    }
    std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double       x  = k;
    for (int iter = 0; iter < 64; ++iter) {
        const double       a_real = std::floor(x);
        const std::int64_t a      = static_cast<std::int64_t>(a_real);
        const std::int64_t h2     = a * h1 + h0;
        const std::int64_t k2     = a * k1 + k0;
        if (k2 > max_den) {
            break;
        }
        h0 = h1, h1 = h2, k0 = k1, k1 = k2;
        if (std::abs(static_cast<double>(h1) / static_cast<double>(k1) - k) <= tol * std::max(1.0, std::abs(k))) {
            return Ratio{h1, k1};
        }
        const double frac = x - a_real;
        if (frac == 0.0) {
            break;
        }
        x = 1.0 / frac;
    }
    return std::nullopt;
}

enum class Window { rectangular, hann };
enum class Detrend { none, remove_mean };
enum class Interp { nearest, linear, exact_rational };

/// Windowing, segmentation, detrending and fractional-index policy.
struct EstimatorConfig {
    Window               window{Window::rectangular};
    std::size_t          segment_length{0}; // 0: whole signal, otherwise a power of two
    double               overlap_fraction{0.0};
    Detrend              detrend{Detrend::remove_mean};
    Interp               interp{Interp::linear};
    std::optional<Ratio> rational_k;

    void validate() const {
        if (segment_length != 0 && (segment_length & (segment_length - 1)) != 0) {
            throw ConfigError("segment length must be a power of two or 0, got " + std::to_string(segment_length));
        }
        if (!(overlap_fraction >= 0.0 && overlap_fraction <= 0.9)) {
            throw ConfigError("overlap fraction must lie in [0, 0.9]");
        }
        if (interp == Interp::exact_rational) {
            if (!rational_k) {
                throw ConfigError("exact_rational interpolation needs rational_k");
            }
            rational_k->validate();
        }
    }

    bool operator==(const EstimatorConfig&) const = default;
};

/// Complex values over a (u, v) bin grid tagged with the producing k and estimator.
struct BifrequencyGrid {
    Matrix<cplx>    values;
    double          k{1.0};
    double          bin_resolution{1.0};
    EstimatorConfig estimator{};
    std::size_t     segments_averaged{1};
    // mean over segments of (max_m |X(m)|)^3; sets the numerical noise floor used by detection
    double reference_scale{0.0};
};

/// Real triple-correlation values over a (rho, tau) lag grid.
struct CumulantGrid {
    Matrix<double> values;
    double         k{1.0};
    double         lag_resolution{1.0};
};

inline const char* to_string(Window w) { return w == Window::hann ? "hann" : "rectangular"; }
inline const char* to_string(Detrend d) { return d == Detrend::none ? "none" : "remove_mean"; }
inline const char* to_string(Interp i) {
    switch (i) {
    case Interp::nearest: return "nearest";
    case Interp::linear: return "linear";
    case Interp::exact_rational: return "exact_rational";
    }
    return "linear";
}

} // namespace fracspec

#endif // FRACSPEC_TYPES_HPP
