#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <fracspec/cumulant.hpp>
#include <fracspec/signal_gen.hpp>

#include "oracle.hpp"

namespace {

using namespace fracspec;

Signal random_signal(std::size_t n, std::uint64_t seed) { return Signal(oracle::random_vector(n, seed), 1.0); }

Signal impulse(std::size_t n) {
    std::vector<double> x(n, 0.0);
    x[0] = 1.0;
    return Signal(x, 1.0);
}

/// Inverse 2D DFT of the full frequency grid at lag (rho, tau), by direct summation.
double inverse_at(const Matrix<cplx>& full, std::size_t rho, std::size_t tau) {
    const std::size_t n = full.rows();
    std::complex<long double> acc{};
    for (std::size_t u = 0; u < n; ++u) {
        for (std::size_t v = 0; v < n; ++v) {
            const long double angle = oracle::kTwoPi * static_cast<long double>((u * rho + v * tau) % n) / static_cast<long double>(n);
            acc += std::complex<long double>(full(u, v).real(), full(u, v).imag()) * std::complex<long double>(std::cos(angle), std::sin(angle));
        }
    }
    EXPECT_LT(std::abs(static_cast<double>(acc.imag())), 1e-9 * std::max(1.0L, std::abs(acc.real())));
    return static_cast<double>(acc.real() / static_cast<long double>(n * n));
}

TEST(TripleCorrelation, ZeroSignal) {
    const auto x = Signal::zeros(16, 1.0);
    EXPECT_EQ(triple_correlation(x, 0, 0), 0.0);
    EXPECT_EQ(triple_correlation(x, 3, -5), 0.0);
}

TEST(TripleCorrelation, Impulse) {
    const auto x = impulse(16);
    for (std::int64_t rho = -3; rho < 16; ++rho) {
        for (std::int64_t tau = -3; tau < 16; ++tau) {
            const bool origin = (rho % 16 == 0) && (tau % 16 == 0);
            EXPECT_EQ(triple_correlation(x, rho, tau), origin ? 1.0 : 0.0);
        }
    }
}

TEST(TripleCorrelation, SumOfCubesMatchesInverseBispectrumAtOrigin) {
    const auto x   = multi_tone({{8.0, 1.0, 0.0}, {16.0, 1.0, 0.0}}, 64, 64.0);
    double     sum = 0.0;
    for (double s : x.samples()) {
        sum += s * s * s;
    }
    EXPECT_NEAR(triple_correlation(x, 0, 0), sum, 1e-12 * std::abs(sum));
    const auto full = full_fractional_bispectrum(x, {1, 1});
    EXPECT_NEAR(inverse_at(full, 0, 0), sum, 1e-9 * std::abs(sum));
}

TEST(TripleCorrelation, NegativeLagsWrap) {
    const auto x = random_signal(20, 1);
    EXPECT_EQ(triple_correlation(x, -3, 4), triple_correlation(x, 17, 4));
    EXPECT_EQ(triple_correlation(x, 2, -1), triple_correlation(x, 2, 19));
}

TEST(BandLimitedUpsample, MatchesTrigonometricOracle) {
    for (std::size_t n : {7U, 8U, 16U}) {
        const auto x = oracle::random_vector(n, n);
        for (std::int64_t q : {1, 2, 3, 4}) {
            const auto up = band_limited_upsample(Signal(x, 1.0), q);
            ASSERT_EQ(up.size(), n * static_cast<std::size_t>(q));
            for (std::size_t j = 0; j < up.size(); ++j) {
                const double ref = oracle::band_limited_at(x, static_cast<long double>(j) / static_cast<long double>(q));
                EXPECT_NEAR(up[j], ref, 1e-12) << "n=" << n << " q=" << q << " j=" << j;
                if (j % static_cast<std::size_t>(q) == 0) {
                    EXPECT_EQ(up[j], x[j / static_cast<std::size_t>(q)]);
                }
            }
        }
    }
    EXPECT_THROW(band_limited_upsample(Signal(oracle::random_vector(4, 1), 1.0), 0), ConfigError);
}

TEST(FractionalTripleCorrelation, UnitRatioIsExactlyTripleCorrelation) {
    const auto x = random_signal(24, 3);
    for (std::int64_t rho = 0; rho < 24; rho += 5) {
        for (std::int64_t tau = 0; tau < 24; tau += 3) {
            EXPECT_EQ(fractional_triple_correlation(x, rho, tau, {1, 1}), triple_correlation(x, rho, tau));
        }
    }
}

TEST(FractionalTripleCorrelation, MatchesBandLimitedSumOracle) {
    const auto x = oracle::random_vector(12, 5);
    const Signal s(x, 1.0);
    for (Ratio r : {Ratio{3, 2}, Ratio{-1, 3}}) {
        for (std::int64_t rho : {0, 4, 11}) {
            for (std::int64_t tau : {0, 2, 7}) {
                long double ref = 0.0L;
                for (std::size_t t = 0; t < 12; ++t) {
                    const long double when = static_cast<long double>(tau) + static_cast<long double>(r.p) * t / static_cast<long double>(r.q);
                    ref += x[(t + static_cast<std::size_t>(rho)) % 12] * oracle::band_limited_at(x, when) * x[t];
                }
                EXPECT_NEAR(fractional_triple_correlation(s, rho, tau, r), static_cast<double>(ref), 1e-12);
            }
        }
    }
}

TEST(FractionalTripleCorrelation, MatchesInverseOfFrequencyGrid) {
    const auto x    = random_signal(16, 16);
    const auto full = full_fractional_bispectrum(x, {3, 2});
    double     peak = 0.0;
    for (std::size_t rho = 0; rho < 16; ++rho) {
        for (std::size_t tau = 0; tau < 16; ++tau) {
            peak = std::max(peak, std::abs(fractional_triple_correlation(x, static_cast<std::int64_t>(rho), static_cast<std::int64_t>(tau), {3, 2})));
        }
    }
    for (std::size_t rho = 0; rho < 16; ++rho) {
        for (std::size_t tau = 0; tau < 16; ++tau) {
            const double time = fractional_triple_correlation(x, static_cast<std::int64_t>(rho), static_cast<std::int64_t>(tau), {3, 2});
            EXPECT_LE(std::abs(time - inverse_at(full, rho, tau)), 1e-9 * peak);
        }
    }
}

TEST(FractionalTripleCorrelation, RejectsNonReducedRatio) {
    EXPECT_THROW(fractional_triple_correlation(random_signal(8, 1), 0, 0, {2, 2}), ConfigError);
    EXPECT_THROW(cumulant_grid(random_signal(8, 1), {3, 6}, 4), ConfigError);
}

TEST(CumulantGrid, ZeroAndImpulse) {
    const auto zero = cumulant_grid(Signal::zeros(8, 1.0), {3, 2}, 8);
    for (double v : zero.values.flat()) {
        EXPECT_EQ(v, 0.0);
    }
    const auto imp = cumulant_grid(impulse(8), {1, 1}, 8);
    for (std::size_t rho = 0; rho < 8; ++rho) {
        for (std::size_t tau = 0; tau < 8; ++tau) {
            EXPECT_EQ(imp.values(rho, tau), rho == 0 && tau == 0 ? 1.0 : 0.0);
        }
    }
    EXPECT_EQ(imp.k, 1.0);
}

TEST(CumulantGrid, KOneEqualsClassicalGridAndIsSymmetric) {
    const auto x    = random_signal(20, 8);
    const auto grid = cumulant_grid(x, {1, 1}, 20);
    for (std::size_t rho = 0; rho < 20; ++rho) {
        for (std::size_t tau = 0; tau < 20; ++tau) {
            EXPECT_EQ(grid.values(rho, tau), triple_correlation(x, static_cast<std::int64_t>(rho), static_cast<std::int64_t>(tau)));
            EXPECT_NEAR(grid.values(rho, tau), grid.values(tau, rho), 1e-9 * std::max(1.0, std::abs(grid.values(rho, tau))));
        }
    }
}

TEST(CumulantGrid, CubicScaling) {
    const auto x = random_signal(16, 2);
    for (double a : {-1.5, 0.25, 3.0}) {
        const auto gx = cumulant_grid(x, {5, 4}, 16);
        const auto gy = cumulant_grid(scale(x, a), {5, 4}, 16);
        for (std::size_t i = 0; i < gx.values.flat().size(); ++i) {
            const double expected = a * a * a * gx.values.flat()[i];
            EXPECT_LE(std::abs(gy.values.flat()[i] - expected), 1e-12 * std::max(std::abs(expected), 1e-300) + 1e-300);
        }
    }
}

TEST(CumulantGrid, ExtentValidationAndResolution) {
    const auto x = Signal(oracle::random_vector(8, 1), 4.0);
    EXPECT_THROW(cumulant_grid(x, {1, 1}, 9), ConfigError);
    EXPECT_THROW(cumulant_grid(x, {1, 1}, 0), ConfigError);
    EXPECT_DOUBLE_EQ(cumulant_grid(x, {1, 1}, 4).lag_resolution, 0.25);
}

TEST(VerifyFourierPair, Impulse) {
    for (Ratio r : {Ratio{1, 1}, Ratio{3, 2}, Ratio{1, 2}, Ratio{5, 4}}) {
        EXPECT_LT(verify_fourier_pair(impulse(16), r), 1e-12);
    }
}

TEST(VerifyFourierPair, TwoToneClassical) {
    const auto x = multi_tone({{4.0, 1.0, 0.3}, {8.0, 0.5, 1.1}}, 32, 32.0);
    EXPECT_LT(verify_fourier_pair(x, {1, 1}), 1e-9);
}

TEST(VerifyFourierPair, RandomVectorThreeHalves) { EXPECT_LT(verify_fourier_pair(random_signal(32, 32), {3, 2}), 1e-9); }

TEST(VerifyFourierPair, PropertyOverLengthsAndRatios) {
    // odd and even lengths, negative p, every q up to 4
    std::uint64_t seed = 0;
    for (std::size_t n : {2U, 3U, 9U, 16U, 27U, 40U}) {
        for (std::int64_t q = 1; q <= 4; ++q) {
            for (std::int64_t p = -5; p <= 7; ++p) {
                if (std::gcd(p < 0 ? -p : p, q) != 1) {
                    continue;
                }
                EXPECT_LT(verify_fourier_pair(random_signal(n, ++seed), {p, q}), 1e-9) << "n=" << n << " k=" << p << "/" << q;
            }
        }
    }
}

TEST(VerifyFourierPair, CapAndZeroSignal) {
    EXPECT_THROW(verify_fourier_pair(random_signal(129, 1), {1, 1}), ConfigError);
    EXPECT_NO_THROW(verify_fourier_pair(random_signal(12, 1), {1, 1}, 12));
    EXPECT_THROW(verify_fourier_pair(random_signal(13, 1), {1, 1}, 12), ConfigError);
    EXPECT_EQ(verify_fourier_pair(Signal::zeros(8, 1.0), {3, 2}), 0.0);
}

TEST(VerifyFourierPair, CancellingTonesStayWellConditioned) {
    // bins 3 and 5 of 16 form no coupled triple at k = 1: F is rounding noise everywhere
    const auto x = multi_tone({{3.0, 1.0, 0.0}, {5.0, 1.0, 0.0}}, 16, 16.0);
    EXPECT_LT(verify_fourier_pair(x, {1, 1}), 1e-9);
    EXPECT_LT(verify_fourier_pair(x, {3, 2}), 1e-9);
}

TEST(VerifyFourierPair, LargestAllowedLength) { EXPECT_LT(verify_fourier_pair(random_signal(128, 128), {3, 4}), 1e-9); }

} // namespace
