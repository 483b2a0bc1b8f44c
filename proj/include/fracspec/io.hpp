#ifndef FRACSPEC_IO_HPP
#define FRACSPEC_IO_HPP

// Text file formats.
//
// Signal file:
//   # fracspec-signal v1, sample_rate=<hz>
//   <sample>            one per line, 17 significant digits
//
// Grid file: CSV matrix of |F(u, v)| (row u, column v) plus a JSON sidecar
// "<grid>.json" carrying k, bin resolution, estimator settings, segment count
// and optionally the complex values as [re, im] pairs in row-major order.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "detection.hpp"
#include "noise_study.hpp"
#include "types.hpp"

namespace fracspec::io {

using json = nlohmann::json;

struct ParseError : InvalidInput {
    using InvalidInput::InvalidInput;
};

inline constexpr std::string_view kSignalHeaderPrefix = "# fracspec-signal v1, sample_rate=";

inline std::string format_double(double value) {
    char buffer[32];
    const int len = std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return std::string(buffer, static_cast<std::size_t>(len));
}

inline std::optional<double> parse_double(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
        text.remove_prefix(1);
    }
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
        text.remove_suffix(1);
    }
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    double value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
        return std::nullopt;
    }
    return value;
}

inline void write_signal(std::ostream& out, const Signal& signal) {
    out << kSignalHeaderPrefix << format_double(signal.sample_rate()) << '\n';
    for (double x : signal.samples()) {
        out << format_double(x) << '\n';
    }
}

inline Signal read_signal(std::istream& in, const std::string& source = "<input>") {
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError(source + ":1: empty signal file");
    }
    if (!line.empty() && line.back() == '\r') {
        line.pop_back();
    }
    if (!line.starts_with(kSignalHeaderPrefix)) {
        throw ParseError(source + ":1: expected header '" + std::string(kSignalHeaderPrefix) + "<hz>'");
    }
    const auto rate = parse_double(std::string_view(line).substr(kSignalHeaderPrefix.size()));
    if (!rate) {
        throw ParseError(source + ":1: malformed sample_rate");
    }
    std::vector<double> samples;
    std::size_t         line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const auto value = parse_double(line);
        if (!value) {
            throw ParseError(source + ":" + std::to_string(line_no) + ": cannot parse sample '" + line + "'");
        }
        samples.push_back(*value);
    }
    try {
        return Signal(std::move(samples), *rate);
    } catch (const InvalidInput& e) {
        throw ParseError(source + ": " + e.what());
    }
}

inline Signal read_signal_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open signal file " + path.string());
    }
    return read_signal(in, path.string());
}

/// Writes to "<path>.tmp" and renames over path.
inline void atomic_write(const std::filesystem::path& path, const std::string& contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw std::runtime_error("cannot write " + tmp.string());
        }
        out << contents;
        if (!out) {
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

inline std::string signal_to_string(const Signal& signal) {
    std::ostringstream out;
    write_signal(out, signal);
    return out.str();
}

inline std::string grid_magnitudes_csv(const BifrequencyGrid& grid) {
    std::string out;
    for (std::size_t u = 0; u < grid.values.rows(); ++u) {
        for (std::size_t v = 0; v < grid.values.cols(); ++v) {
            if (v != 0) {
                out += ',';
            }
            out += format_double(std::abs(grid.values(u, v)));
        }
        out += '\n';
    }
    return out;
}

inline std::string ratio_to_string(const Ratio& r) { return std::to_string(r.p) + "/" + std::to_string(r.q); }

inline std::optional<Ratio> parse_ratio(std::string_view text) {
    const auto slash = text.find('/');
    auto       parse_int = [](std::string_view s, std::int64_t& out) {
        if (!s.empty() && s.front() == '+') {
            s.remove_prefix(1);
        }
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
    };
    Ratio r;
    if (slash == std::string_view::npos) {
        if (!parse_int(text, r.p)) {
            return std::nullopt;
        }
        r.q = 1;
        return r;
    }
    if (!parse_int(text.substr(0, slash), r.p) || !parse_int(text.substr(slash + 1), r.q)) {
        return std::nullopt;
    }
    return r;
}

inline json to_json(const EstimatorConfig& config) {
    return json{
        {"window", to_string(config.window)},
        {"segment_length", config.segment_length},
        {"overlap_fraction", config.overlap_fraction},
        {"detrend", to_string(config.detrend)},
        {"interp", to_string(config.interp)},
        {"rational_k", config.rational_k ? json(ratio_to_string(*config.rational_k)) : json(nullptr)},
    };
}

inline EstimatorConfig estimator_from_json(const json& j) {
    EstimatorConfig config;
    config.window           = j.at("window").get<std::string>() == "hann" ? Window::hann : Window::rectangular;
    config.segment_length   = j.at("segment_length").get<std::size_t>();
    config.overlap_fraction = j.at("overlap_fraction").get<double>();
    config.detrend          = j.at("detrend").get<std::string>() == "none" ? Detrend::none : Detrend::remove_mean;
    const auto interp       = j.at("interp").get<std::string>();
    config.interp           = interp == "nearest" ? Interp::nearest : interp == "exact_rational" ? Interp::exact_rational : Interp::linear;
    if (!j.at("rational_k").is_null()) {
        config.rational_k = parse_ratio(j.at("rational_k").get<std::string>());
        if (!config.rational_k) {
            throw ParseError("malformed rational_k in sidecar");
        }
    }
    return config;
}

inline json grid_sidecar(const BifrequencyGrid& grid, bool include_complex, const json& source = nullptr) {
    json j{
        {"format", "fracspec-grid v1"},
        {"k", grid.k},
        {"bin_resolution", grid.bin_resolution},
        {"extent", grid.values.rows()},
        {"segments_averaged", grid.segments_averaged},
        {"reference_scale", grid.reference_scale},
        {"estimator", to_json(grid.estimator)},
        {"source", source},
    };
    if (include_complex) {
        json values = json::array();
        for (const auto& c : grid.values.flat()) {
            values.push_back(json::array({c.real(), c.imag()}));
        }
        j["complex"] = std::move(values);
    }
    return j;
}

inline json to_json(const PeakReport& peak, double bin_resolution) {
    return json{
        {"value", peak.value},
        {"location", json::array({peak.location.first, peak.location.second})},
        {"location_hz", json::array({static_cast<double>(peak.location.first) * bin_resolution, static_cast<double>(peak.location.second) * bin_resolution})},
        {"background", peak.background},
        {"contrast", peak.contrast},
    };
}

inline json to_json(const KScanResult& scan, double bin_resolution) {
    json entries = json::array();
    for (const auto& e : scan.entries) {
        entries.push_back(json{{"k", e.k}, {"peak", to_json(e.peak, bin_resolution)}});
    }
    return json{
        {"best_k", scan.best_k},
        {"best_peak", to_json(scan.best_peak, bin_resolution)},
        {"entries", std::move(entries)},
    };
}

inline json to_json(const FrequencyRatioEstimate& est, double bin_resolution) {
    json j          = to_json(est.scan, bin_resolution);
    j["k_star"]     = est.k_star;
    j["f1_hz"]      = est.f1;
    j["implied_f2_hz"] = est.implied_f2;
    j["diagonal_peak"] = est.diagonal_peak;
    j["detected"]   = est.detected;
    return j;
}

inline json to_json(const SuppressionCurve& curve) {
    json points = json::array();
    for (const auto& p : curve.points) {
        points.push_back(json{{"segments", p.segments}, {"mean_abs", p.mean_abs}, {"peak_contrast", p.peak_contrast}});
    }
    return json{
        {"points", std::move(points)},
        {"slope_estimate", curve.slope_estimate ? json(*curve.slope_estimate) : json(nullptr)},
    };
}

inline std::string curve_csv(const SuppressionCurve& curve) {
    std::string out = "segments,mean_abs,peak_contrast\n";
    for (const auto& p : curve.points) {
        out += std::to_string(p.segments) + "," + format_double(p.mean_abs) + "," + format_double(p.peak_contrast) + "\n";
    }
    return out;
}

} // namespace fracspec::io

#endif // FRACSPEC_IO_HPP
