#ifndef FRACSPEC_DETECTION_HPP
#define FRACSPEC_DETECTION_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spectra.hpp"
#include "types.hpp"

namespace fracspec {

/// Guard on the contrast denominator.
inline constexpr double kContrastEpsilon = 1e-300;
/// Background magnitudes below this fraction of the grid's reference scale
/// (mean cubed spectral peak) are rounding noise and are floored to it.
inline constexpr double kNoiseFloorFraction = 1e-12;
/// Contrasts within this relative distance are treated as ties in k_scan.
inline constexpr double kContrastTieTolerance = 1e-9;

struct PeakReport {
    double                              value{0.0};
    std::pair<std::size_t, std::size_t> location{0, 0};
    double                              background{0.0}; // median magnitude over the searched region
    double                              contrast{0.0};
};

struct KScanEntry {
    double     k{0.0};
    PeakReport peak;
};

struct KScanResult {
    std::vector<KScanEntry> entries;
    double                  best_k{0.0};
    PeakReport              best_peak;
};

/// Peak of |F| over u, v >= margin. Ties go to the lexicographically smallest (u, v).
/// contrast = value / max(median, kNoiseFloorFraction * reference_scale, kContrastEpsilon).
inline PeakReport peak_statistic(const BifrequencyGrid& grid, std::size_t margin = 1) {
    const auto& values = grid.values;
    if (values.rows() <= margin || values.cols() <= margin) {
        throw ConfigError("axis margin " + std::to_string(margin) + " leaves an empty search region");
    }
    PeakReport          report{.location = {margin, margin}};
    std::vector<double> magnitudes;
    magnitudes.reserve((values.rows() - margin) * (values.cols() - margin));
    for (std::size_t u = margin; u < values.rows(); ++u) {
        for (std::size_t v = margin; v < values.cols(); ++v) {
            const double mag = std::abs(values(u, v));
            magnitudes.push_back(mag);
            if (mag > report.value) {
                report.value    = mag;
                report.location = {u, v};
            }
        }
    }
    const std::size_t mid = magnitudes.size() / 2;
    std::nth_element(magnitudes.begin(), magnitudes.begin() + static_cast<std::ptrdiff_t>(mid), magnitudes.end());
    double median = magnitudes[mid];
    if (magnitudes.size() % 2 == 0) {
        const double lower = *std::max_element(magnitudes.begin(), magnitudes.begin() + static_cast<std::ptrdiff_t>(mid));
        median             = 0.5 * (lower + median);
    }
    report.background = median;
    const double floor = std::max({median, kNoiseFloorFraction * grid.reference_scale, kContrastEpsilon});
    report.contrast    = report.value / floor;
    return report;
}

namespace detail {

inline bool contrast_beats(const KScanEntry& candidate, const KScanEntry& incumbent) {
    const double a = candidate.peak.contrast;
    const double b = incumbent.peak.contrast;
    if (std::abs(a - b) <= kContrastTieTolerance * std::max(a, b)) {
        if (candidate.k != incumbent.k) {
            return candidate.k < incumbent.k;
        }
        return candidate.peak.location < incumbent.peak.location;
    }
    return a > b;
}

inline EstimatorConfig config_for_k(const EstimatorConfig& config, double k) {
    if (config.interp != Interp::exact_rational) {
        return config;
    }
    auto ratio = to_ratio(k);
    if (!ratio) {
        throw ConfigError("k = " + std::to_string(k) + " has no small rational form for exact_rational mode");
    }
    EstimatorConfig out = config;
    out.rational_k      = ratio;
    return out;
}

} // namespace detail

/// Averaged fractional bispectrum and its peak statistic for every k; best_k maximizes contrast.
inline KScanResult k_scan(const Signal& signal, const std::vector<double>& k_values, const EstimatorConfig& config, std::size_t extent, std::size_t margin = 1) {
    if (k_values.empty()) {
        throw ConfigError("k scan needs at least one k value");
    }
    KScanResult result;
    result.entries.reserve(k_values.size());
    for (double k : k_values) {
        if (!std::isfinite(k)) {
            throw InvalidInput("k values must be finite");
        }
        auto cfg = detail::config_for_k(config, k);
        if (cfg.interp == Interp::exact_rational) {
            k = cfg.rational_k->value();
        }
        const auto grid = averaged_fractional_bispectrum(signal, k, cfg, extent);
        result.entries.push_back({k, peak_statistic(grid, margin)});
    }
    const KScanEntry* best = &result.entries.front();
    for (const auto& entry : result.entries) {
        if (detail::contrast_beats(entry, *best)) {
            best = &entry;
        }
    }
    result.best_k    = best->k;
    result.best_peak = best->peak;
    return result;
}

struct KRange {
    double low{1.0};
    double high{2.0};
    double step{0.05};

    /// low + i * step for every i with the point not beyond high (1e-9 step slack).
    [[nodiscard]] std::vector<double> values() const {
        if (!(std::isfinite(low) && std::isfinite(high) && std::isfinite(step)) || !(low < high) || !(step > 0.0)) {
            throw ConfigError("k range needs low < high and step > 0");
        }
        const auto          count = static_cast<std::size_t>(std::floor((high - low) / step + 1e-9)) + 1;
        std::vector<double> ks(count);
        for (std::size_t i = 0; i < count; ++i) {
            ks[i] = low + static_cast<double>(i) * step;
        }
        return ks;
    }
};

/// Contrast below which estimate_frequency_ratio reports no detection.
inline constexpr double kDefaultDetectionThreshold = 1e3;

struct FrequencyRatioEstimate {
    double      k_star{0.0};
    double      f1{0.0};             // peak u coordinate in Hz
    double      implied_f2{0.0};     // f1 * (1 + k_star), meaningful for diagonal peaks
    bool        diagonal_peak{false}; // u == v at the peak
    bool        detected{false};
    KScanResult scan;
};

/// k scan over an arithmetic grid, reading f1 off the peak's u coordinate.
/// Diagonal-peak interpretation: a peak at (f1, f1) couples f1 with f1 * (1 + k).
inline FrequencyRatioEstimate estimate_frequency_ratio(const Signal& signal, const KRange& range, const EstimatorConfig& config, std::size_t extent = 0, double threshold = kDefaultDetectionThreshold) {
    const std::size_t length = config.segment_length == 0 ? signal.size() : config.segment_length;
    if (extent == 0) {
        extent = length / 2;
    }
    FrequencyRatioEstimate out;
    out.scan              = k_scan(signal, range.values(), config, extent);
    const double resolution = signal.sample_rate() / static_cast<double>(length);
    const auto [u, v]     = out.scan.best_peak.location;
    out.k_star            = out.scan.best_k;
    out.f1                = static_cast<double>(u) * resolution;
    out.implied_f2        = out.f1 * (1.0 + out.k_star);
    out.diagonal_peak     = u == v;
    out.detected          = out.scan.best_peak.contrast >= threshold;
    return out;
}

} // namespace fracspec

#endif // FRACSPEC_DETECTION_HPP
