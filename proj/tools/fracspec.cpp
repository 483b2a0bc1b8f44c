// fracspec command-line front end.
//
// Exit codes: 0 success, 1 verification or detection failure, 2 usage or input error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <fracspec/fracspec.hpp>
#include <fracspec/io.hpp>

namespace {

using namespace fracspec;
using json = nlohmann::json;

constexpr int kExitFailure = 1;
constexpr int kExitUsage   = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

ToneSpec parse_tone(const std::string& text) {
    std::vector<double> parts;
    std::stringstream   ss(text);
    std::string         item;
    while (std::getline(ss, item, ':')) {
        const auto v = io::parse_double(item);
        if (!v) {
            throw UsageError("malformed --freq '" + text + "', expected f[:amp[:phase]]");
        }
        parts.push_back(*v);
    }
    if (parts.empty() || parts.size() > 3) {
        throw UsageError("malformed --freq '" + text + "', expected f[:amp[:phase]]");
    }
    return {parts[0], parts.size() > 1 ? parts[1] : 1.0, parts.size() > 2 ? parts[2] : 0.0};
}

std::vector<ToneSpec> parse_tones(const std::vector<std::string>& specs) {
    std::vector<ToneSpec> tones;
    for (const auto& s : specs) {
        tones.push_back(parse_tone(s));
    }
    return tones;
}

Ratio parse_ratio_flag(const std::string& text) {
    auto r = io::parse_ratio(text);
    if (!r) {
        throw UsageError("malformed --rational '" + text + "', expected p/q");
    }
    r->validate();
    return *r;
}

void emit(const std::string& path, const std::string& contents) {
    if (path.empty() || path == "-") {
        std::cout << contents;
    } else {
        io::atomic_write(path, contents);
    }
}

/// Options shared by analyze and kscan.
struct EstimationFlags {
    std::string window{"rect"};
    std::string detrend{"mean"};
    std::string interp{"linear"};
    std::size_t segments{0};
    double      overlap{0.0};
    std::size_t extent{0};
    std::size_t margin{1};

    void add_to(CLI::App& cmd) {
        cmd.add_option("--window", window, "Segment window")->check(CLI::IsMember({"rect", "hann"}));
        cmd.add_option("--detrend", detrend, "Per-segment detrend")->check(CLI::IsMember({"none", "mean"}));
        cmd.add_option("--interp", interp, "Fractional-index interpolation")->check(CLI::IsMember({"nearest", "linear"}));
        cmd.add_option("--segments", segments, "Segment length in samples (power of two, 0 = whole signal)");
        cmd.add_option("--overlap", overlap, "Segment overlap fraction in [0, 0.9]");
        cmd.add_option("--extent", extent, "Grid extent in bins (default: segment length / 2)");
        cmd.add_option("--margin", margin, "Axis rows/columns excluded from the peak search");
    }

    [[nodiscard]] EstimatorConfig config() const {
        EstimatorConfig c;
        c.window           = window == "hann" ? Window::hann : Window::rectangular;
        c.detrend          = detrend == "none" ? Detrend::none : Detrend::remove_mean;
        c.interp           = interp == "nearest" ? Interp::nearest : Interp::linear;
        c.segment_length   = segments;
        c.overlap_fraction = overlap;
        return c;
    }

    [[nodiscard]] std::size_t extent_for(const Signal& signal) const {
        if (extent != 0) {
            return extent;
        }
        return (segments == 0 ? signal.size() : segments) / 2;
    }
};

/// Fills options not given on the command line from a JSON object keyed by long flag name.
void apply_json_config(CLI::App& cmd, const json& config) {
    for (CLI::Option* opt : cmd.get_options()) {
        if (opt->count() > 0 || opt->get_lnames().empty()) {
            continue;
        }
        const auto& name = opt->get_lnames().front();
        if (name == "config" || !config.contains(name)) {
            continue;
        }
        const json& value = config.at(name);
        auto        as_text = [](const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
        if (value.is_array()) {
            for (const auto& v : value) {
                opt->add_result(as_text(v));
            }
        } else {
            opt->add_result(as_text(value));
        }
        opt->run_callback();
    }
}

json load_json_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot open config file " + path);
    }
    try {
        json j = json::parse(in);
        if (!j.is_object()) {
            throw UsageError("config file " + path + " must hold a JSON object");
        }
        return j;
    } catch (const json::parse_error& e) {
        throw UsageError("config file " + path + ": " + e.what());
    }
}

std::string peak_summary(const PeakReport& peak, double resolution) {
    std::ostringstream out;
    out << "peak |F| = " << io::format_double(peak.value) << " at bins (" << peak.location.first << ", " << peak.location.second << ") = ("
        << io::format_double(static_cast<double>(peak.location.first) * resolution) << " Hz, "
        << io::format_double(static_cast<double>(peak.location.second) * resolution) << " Hz), background " << io::format_double(peak.background)
        << ", contrast " << io::format_double(peak.contrast) << "\n";
    return out.str();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fracspec: bispectrum and fractional bispectrum estimation"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON file with flag values keyed by long flag name (command-line flags win)");

    // gen
    auto*                    gen = app.add_subcommand("gen", "Generate a synthetic signal file");
    std::string              gen_kind;
    std::size_t              gen_n{64};
    std::optional<double>    gen_fs;
    std::vector<std::string> gen_freqs;
    double                   gen_f1{0.0}, gen_f2{0.0}, gen_phase1{0.0}, gen_phase2{0.0};
    double                   gen_sigma{1.0};
    std::uint64_t            gen_seed{0};
    std::string              gen_band;
    std::string              gen_out;
    gen->add_option("kind", gen_kind, "tones | coupled | noise | bandpass")->required()->check(CLI::IsMember({"tones", "coupled", "noise", "bandpass"}));
    gen->add_option("--n", gen_n, "Number of samples");
    gen->add_option("--fs", gen_fs, "Sample rate in Hz (default: --n, so Hz equal DFT bins)");
    gen->add_option("--freq", gen_freqs, "Tone as f[:amp[:phase]] (repeatable)");
    gen->add_option("--f1", gen_f1, "First coupled frequency in Hz");
    gen->add_option("--f2", gen_f2, "Second coupled frequency in Hz");
    gen->add_option("--phase1", gen_phase1, "Phase of f1 in radians");
    gen->add_option("--phase2", gen_phase2, "Phase of f2 in radians");
    gen->add_option("--sigma", gen_sigma, "Noise standard deviation");
    gen->add_option("--seed", gen_seed, "Noise seed");
    gen->add_option("--band", gen_band, "Passband lo:hi in Hz");
    gen->add_option("--out", gen_out, "Output signal file (default: stdout)");

    // analyze
    auto*                 analyze = app.add_subcommand("analyze", "Estimate a (fractional) bispectrum grid");
    std::string           an_in, an_out, an_rational;
    double                an_k{1.0};
    bool                  an_complex{false};
    EstimationFlags       an_flags;
    analyze->add_option("--in", an_in, "Input signal file")->required();
    analyze->add_option("--out", an_out, "Output grid CSV; the sidecar goes to <out>.json");
    analyze->add_option("--k", an_k, "Fractional parameter k");
    analyze->add_option("--rational", an_rational, "Exact rational k as p/q (overrides --k and --interp)");
    analyze->add_flag("--complex", an_complex, "Include complex values in the sidecar");
    an_flags.add_to(*analyze);

    // kscan
    auto*           kscan = app.add_subcommand("kscan", "Scan k for the strongest fractional coupling");
    std::string     ks_in, ks_out;
    double          ks_min{1.0}, ks_max{2.0}, ks_step{0.05};
    double          ks_threshold{kDefaultDetectionThreshold};
    EstimationFlags ks_flags;
    kscan->add_option("--in", ks_in, "Input signal file")->required();
    kscan->add_option("--out", ks_out, "Output JSON with every scan entry");
    kscan->add_option("--kmin", ks_min, "Smallest k");
    kscan->add_option("--kmax", ks_max, "Largest k");
    kscan->add_option("--kstep", ks_step, "k increment");
    kscan->add_option("--threshold", ks_threshold, "Contrast needed to report a detection");
    ks_flags.add_to(*kscan);

    // verify
    auto*         verify = app.add_subcommand("verify", "Check the time/frequency Fourier-pair identity");
    std::string   vf_in, vf_rational{"1/1"};
    std::size_t   vf_n{32};
    std::uint64_t vf_seed{0};
    double        vf_tol{1e-9};
    verify->add_option("--in", vf_in, "Input signal file (default: random vector from --n/--seed)");
    verify->add_option("--n", vf_n, "Length of the generated random vector");
    verify->add_option("--seed", vf_seed, "Seed of the generated random vector");
    verify->add_option("--rational", vf_rational, "k as p/q");
    verify->add_option("--tol", vf_tol, "Pass threshold on the relative discrepancy");

    // noisestudy
    auto*                    study = app.add_subcommand("noisestudy", "Monte Carlo Gaussian-null / suppression study");
    StudyConfig              st_cfg;
    std::string              st_mode{"auto"}, st_rational, st_out, st_csv, st_window{"rect"}, st_interp{"linear"};
    std::vector<std::string> st_freqs;
    std::optional<double>    st_fs;
    study->add_option("--mode", st_mode, "null | contaminated | auto (contaminated when tones are given)")->check(CLI::IsMember({"auto", "null", "contaminated"}));
    study->add_option("--seed", st_cfg.base_seed, "Base seed");
    study->add_option("--trials", st_cfg.trials, "Independent trials per segment count");
    study->add_option("--segment-counts", st_cfg.segment_counts, "Strictly increasing segment counts")->delimiter(',');
    study->add_option("--sigma", st_cfg.sigma, "Noise standard deviation");
    study->add_option("--k", st_cfg.k, "Fractional parameter k");
    study->add_option("--rational", st_rational, "Exact rational k as p/q");
    study->add_option("--freq", st_freqs, "Deterministic tone f[:amp[:phase]] in Hz (repeatable)");
    study->add_option("--segment-length", st_cfg.segment_length, "Samples per segment (power of two)");
    study->add_option("--fs", st_fs, "Sample rate in Hz (default: segment length)");
    study->add_option("--extent", st_cfg.grid_extent, "Grid extent in bins");
    study->add_option("--window", st_window, "Segment window")->check(CLI::IsMember({"rect", "hann"}));
    study->add_option("--interp", st_interp, "Fractional-index interpolation")->check(CLI::IsMember({"nearest", "linear"}));
    study->add_option("--out", st_out, "Output JSON (default: stdout)");
    study->add_option("--csv", st_csv, "Also write the curve as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (!config_path.empty()) {
            const json cfg = load_json_config(config_path);
            for (CLI::App* sub : app.get_subcommands()) {
                apply_json_config(*sub, cfg);
            }
        }

        if (gen->parsed()) {
            const double fs = gen_fs.value_or(static_cast<double>(gen_n));
            Signal       signal = Signal::zeros(1, 1.0);
            if (gen_kind == "tones") {
                signal = multi_tone(parse_tones(gen_freqs), gen_n, fs);
            } else if (gen_kind == "coupled") {
                signal = coupled_triple(gen_f1, gen_f2, gen_n, fs, {gen_phase1, gen_phase2});
            } else if (gen_kind == "noise") {
                signal = gaussian_noise({gen_sigma, gen_seed}, gen_n, fs);
            } else {
                const auto colon = gen_band.find(':');
                const auto lo    = colon == std::string::npos ? std::nullopt : io::parse_double(gen_band.substr(0, colon));
                const auto hi    = colon == std::string::npos ? std::nullopt : io::parse_double(gen_band.substr(colon + 1));
                if (!lo || !hi) {
                    throw UsageError("bandpass needs --band lo:hi");
                }
                signal = bandpass_noise(*lo, *hi, {gen_sigma, gen_seed}, gen_n, fs);
            }
            emit(gen_out, io::signal_to_string(signal));
            return 0;
        }

        if (analyze->parsed()) {
            const Signal    signal = io::read_signal_file(an_in);
            EstimatorConfig config = an_flags.config();
            double          k      = an_k;
            if (!an_rational.empty()) {
                config.interp     = Interp::exact_rational;
                config.rational_k = parse_ratio_flag(an_rational);
                k                 = config.rational_k->value();
            }
            const auto grid = averaged_fractional_bispectrum(signal, k, config, an_flags.extent_for(signal));
            const auto peak = peak_statistic(grid, an_flags.margin);
            std::cout << "k = " << io::format_double(grid.k) << ", segments averaged " << grid.segments_averaged << "\n" << peak_summary(peak, grid.bin_resolution);
            if (!an_out.empty()) {
                const json source{{"path", an_in}, {"samples", signal.size()}, {"sample_rate", signal.sample_rate()}};
                io::atomic_write(an_out, io::grid_magnitudes_csv(grid));
                io::atomic_write(an_out + ".json", io::grid_sidecar(grid, an_complex, source).dump(2) + "\n");
            }
            return 0;
        }

        if (kscan->parsed()) {
            if (!(ks_step > 0.0) || !(ks_min < ks_max)) {
                throw UsageError("empty k grid: need --kmin < --kmax and --kstep > 0");
            }
            const Signal signal = io::read_signal_file(ks_in);
            const auto   config = ks_flags.config();
            const auto   est    = estimate_frequency_ratio(signal, {ks_min, ks_max, ks_step}, config, ks_flags.extent_for(signal), ks_threshold);
            const double resolution = signal.sample_rate() / static_cast<double>(config.segment_length == 0 ? signal.size() : config.segment_length);
            std::cout << "best_k = " << io::format_double(est.k_star) << "\n" << peak_summary(est.scan.best_peak, resolution);
            if (est.diagonal_peak) {
                std::cout << "diagonal coupling: f1 = " << io::format_double(est.f1) << " Hz, f1 * (1 + k) = " << io::format_double(est.implied_f2) << " Hz\n";
            }
            std::cout << (est.detected ? "detected\n" : "no detection\n");
            if (!ks_out.empty()) {
                io::atomic_write(ks_out, io::to_json(est, resolution).dump(2) + "\n");
            }
            return est.detected ? 0 : kExitFailure;
        }

        if (verify->parsed()) {
            const Ratio  ratio  = parse_ratio_flag(vf_rational);
            const Signal signal = vf_in.empty() ? gaussian_noise({1.0, vf_seed}, vf_n, 1.0) : io::read_signal_file(vf_in);
            if (signal.size() > kFourierPairMaxLength) {
                throw UsageError("signal has " + std::to_string(signal.size()) + " samples; the brute-force check is capped at " + std::to_string(kFourierPairMaxLength) + " (reduce --n)");
            }
            const double discrepancy = verify_fourier_pair(signal, ratio);
            const bool   ok          = discrepancy < vf_tol;
            std::cout << "k = " << io::ratio_to_string(ratio) << ", N = " << signal.size() << ", discrepancy = " << io::format_double(discrepancy) << ", tol = " << io::format_double(vf_tol)
                      << (ok ? ", PASS\n" : ", FAIL\n");
            return ok ? 0 : kExitFailure;
        }

        if (study->parsed()) {
            st_cfg.tones       = parse_tones(st_freqs);
            st_cfg.sample_rate = st_fs.value_or(static_cast<double>(st_cfg.segment_length));
            st_cfg.estimator.window = st_window == "hann" ? Window::hann : Window::rectangular;
            st_cfg.estimator.interp = st_interp == "nearest" ? Interp::nearest : Interp::linear;
            if (!st_rational.empty()) {
                st_cfg.estimator.interp     = Interp::exact_rational;
                st_cfg.estimator.rational_k = parse_ratio_flag(st_rational);
                st_cfg.k                    = st_cfg.estimator.rational_k->value();
            }
            const bool contaminated = st_mode == "contaminated" || (st_mode == "auto" && !st_cfg.tones.empty());
            const auto curve        = contaminated ? contaminated_signal_study(st_cfg) : gaussian_null_study(st_cfg);
            json       out          = io::to_json(curve);
            out["mode"]             = contaminated ? "contaminated" : "null";
            out["k"]                = st_cfg.k;
            out["sigma"]            = st_cfg.sigma;
            out["trials"]           = st_cfg.trials;
            out["base_seed"]        = st_cfg.base_seed;
            emit(st_out, out.dump(2) + "\n");
            if (!st_csv.empty()) {
                io::atomic_write(st_csv, io::curve_csv(curve));
            }
            return 0;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const io::ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return kExitUsage;
}
