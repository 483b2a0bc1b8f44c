#ifndef FRACSPEC_NOISE_STUDY_HPP
#define FRACSPEC_NOISE_STUDY_HPP

// Monte Carlo harness for the Gaussian-null behaviour of the averaged
// fractional bispectrum. Trial i of segment-count batch j draws its noise
// from stream_seed(base_seed, i, j); the seed does not depend on sigma, so
// runs that differ only in sigma see identically shaped noise.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "detection.hpp"
#include "signal_gen.hpp"
#include "spectra.hpp"
#include "types.hpp"

namespace fracspec {

struct StudyConfig {
    std::uint64_t            base_seed{20240501};
    std::size_t              trials{32};
    std::vector<std::size_t> segment_counts{4, 16, 64};
    double                   sigma{1.0};
    double                   k{1.5};
    std::vector<ToneSpec>    tones;               // deterministic component; empty means pure noise
    std::size_t              grid_extent{32};
    std::size_t              segment_length{64};  // samples per segment
    double                   sample_rate{64.0};   // with the default, tone frequencies in Hz equal segment bins
    EstimatorConfig          estimator{};         // segment_length is overridden by the field above
    std::size_t              margin{1};

    void validate() const {
        if (trials == 0) {
            throw ConfigError("study needs at least one trial");
        }
        if (segment_counts.empty()) {
            throw ConfigError("study needs at least one segment count");
        }
        for (std::size_t i = 0; i < segment_counts.size(); ++i) {
            if (segment_counts[i] == 0 || (i > 0 && segment_counts[i] <= segment_counts[i - 1])) {
                throw ConfigError("segment counts must be positive and strictly increasing");
            }
        }
        if (!std::isfinite(sigma) || sigma < 0.0) {
            throw ConfigError("sigma must be finite and nonnegative");
        }
        segment_config().validate();
    }

    [[nodiscard]] EstimatorConfig segment_config() const {
        EstimatorConfig cfg  = estimator;
        cfg.segment_length   = segment_length;
        cfg.overlap_fraction = 0.0;
        return cfg;
    }

    /// Two unit tones at segment bins 8 and 20, sigma = 1, k = 1.5.
    static StudyConfig default_contaminated() {
        StudyConfig cfg;
        cfg.tones = {{8.0, 1.0, 0.0}, {20.0, 1.0, 0.0}};
        return cfg;
    }
};

struct SuppressionPoint {
    std::size_t segments{0};
    double      mean_abs{0.0};      // trial mean of the grid-mean |F| over the search region
    double      peak_contrast{0.0}; // trial mean of peak_statistic contrast
};

struct SuppressionCurve {
    std::vector<SuppressionPoint> points;
    std::optional<double>         slope_estimate; // least-squares d log(mean_abs) / d log(M)
};

namespace detail {

inline double region_mean_abs(const BifrequencyGrid& grid, std::size_t margin) {
    double      sum   = 0.0;
    std::size_t count = 0;
    for (std::size_t u = margin; u < grid.values.rows(); ++u) {
        for (std::size_t v = margin; v < grid.values.cols(); ++v) {
            sum += std::abs(grid.values(u, v));
            ++count;
        }
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

inline std::optional<double> log_log_slope(const std::vector<SuppressionPoint>& points) {
    if (points.size() < 2) {
        return std::nullopt;
    }
    double sx = 0.0, sy = 0.0;
    for (const auto& p : points) {
        if (!(p.mean_abs > 0.0)) {
            return std::nullopt;
        }
        sx += std::log(static_cast<double>(p.segments));
        sy += std::log(p.mean_abs);
    }
    const double n  = static_cast<double>(points.size());
    const double mx = sx / n, my = sy / n;
    double       sxy = 0.0, sxx = 0.0;
    for (const auto& p : points) {
        const double dx = std::log(static_cast<double>(p.segments)) - mx;
        sxy += dx * (std::log(p.mean_abs) - my);
        sxx += dx * dx;
    }
    return sxx == 0.0 ? std::nullopt : std::optional<double>(sxy / sxx);
}

inline SuppressionCurve run_study(const StudyConfig& config) {
    config.validate();
    const auto       cfg = config.segment_config();
    SuppressionCurve curve;
    for (std::size_t batch = 0; batch < config.segment_counts.size(); ++batch) {
        const std::size_t segments = config.segment_counts[batch];
        const std::size_t n        = segments * config.segment_length;
        std::optional<Signal> deterministic;
        if (!config.tones.empty()) {
            deterministic = multi_tone(config.tones, n, config.sample_rate);
        }
        double abs_sum      = 0.0;
        double contrast_sum = 0.0;
        // fixed trial order keeps the floating-point sums reproducible
        for (std::size_t trial = 0; trial < config.trials; ++trial) {
            Signal x = gaussian_noise({config.sigma, stream_seed(config.base_seed, trial, batch)}, n, config.sample_rate);
            if (deterministic) {
                x = add(*deterministic, x);
            }
            const auto grid = averaged_fractional_bispectrum(x, config.k, cfg, config.grid_extent);
            abs_sum += region_mean_abs(grid, config.margin);
            contrast_sum += peak_statistic(grid, config.margin).contrast;
        }
        const double inv = 1.0 / static_cast<double>(config.trials);
        curve.points.push_back({segments, abs_sum * inv, contrast_sum * inv});
    }
    curve.slope_estimate = log_log_slope(curve.points);
    return curve;
}

} // namespace detail

/// Pure-noise study: grid-mean |F| per segment count and its log-log decay slope.
/// The slope is nullopt when any mean is zero (sigma = 0).
inline SuppressionCurve gaussian_null_study(const StudyConfig& config) {
    if (!config.tones.empty()) {
        throw ConfigError("gaussian_null_study expects a pure-noise configuration (no tones)");
    }
    return detail::run_study(config);
}

/// Tones plus noise: peak contrast per segment count.
inline SuppressionCurve contaminated_signal_study(const StudyConfig& config) {
    if (config.tones.empty()) {
        throw ConfigError("contaminated_signal_study needs a deterministic tone component");
    }
    return detail::run_study(config);
}

} // namespace fracspec

#endif // FRACSPEC_NOISE_STUDY_HPP
