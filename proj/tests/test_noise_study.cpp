#include <gtest/gtest.h>

#include <fracspec/noise_study.hpp>

namespace {

using namespace fracspec;

TEST(GaussianNullStudy, ZeroSigmaGivesZeroAndNoSlope) {
    StudyConfig cfg;
    cfg.sigma  = 0.0;
    cfg.trials = 2;
    const auto curve = gaussian_null_study(cfg);
    ASSERT_EQ(curve.points.size(), 3U);
    for (const auto& p : curve.points) {
        EXPECT_EQ(p.mean_abs, 0.0);
    }
    EXPECT_FALSE(curve.slope_estimate.has_value());
}

TEST(GaussianNullStudy, DecaysAtRoughlyInverseSqrtM) {
    StudyConfig cfg; // sigma 1, k 1.5, trials 32, M = {4, 16, 64}
    const auto  curve = gaussian_null_study(cfg);
    ASSERT_EQ(curve.points.size(), 3U);
    EXPECT_EQ(curve.points[0].segments, 4U);
    EXPECT_EQ(curve.points[2].segments, 64U);
    for (std::size_t i = 0; i < curve.points.size(); ++i) {
        EXPECT_GT(curve.points[i].mean_abs, 0.0);
        if (i > 0) {
            EXPECT_LT(curve.points[i].mean_abs, curve.points[i - 1].mean_abs);
        }
    }
    ASSERT_TRUE(curve.slope_estimate.has_value());
    EXPECT_GE(*curve.slope_estimate, -0.7);
    EXPECT_LE(*curve.slope_estimate, -0.3);
}

TEST(GaussianNullStudy, DoublingSigmaScalesByEight) {
    StudyConfig a;
    a.trials          = 8;
    StudyConfig b     = a;
    b.sigma           = 2.0;
    const auto ca     = gaussian_null_study(a);
    const auto cb     = gaussian_null_study(b);
    for (std::size_t i = 0; i < ca.points.size(); ++i) {
        EXPECT_NEAR(cb.points[i].mean_abs / ca.points[i].mean_abs, 8.0, 0.05 * 8.0);
    }
}

TEST(GaussianNullStudy, Deterministic) {
    StudyConfig cfg;
    cfg.trials       = 4;
    const auto first = gaussian_null_study(cfg);
    const auto again = gaussian_null_study(cfg);
    ASSERT_EQ(first.points.size(), again.points.size());
    for (std::size_t i = 0; i < first.points.size(); ++i) {
        EXPECT_EQ(first.points[i].mean_abs, again.points[i].mean_abs);
        EXPECT_EQ(first.points[i].peak_contrast, again.points[i].peak_contrast);
    }
    EXPECT_EQ(first.slope_estimate, again.slope_estimate);
}

TEST(GaussianNullStudy, RejectsTonesAndBadConfig) {
    EXPECT_THROW(gaussian_null_study(StudyConfig::default_contaminated()), ConfigError);
    StudyConfig cfg;
    cfg.segment_counts = {16, 4};
    EXPECT_THROW(gaussian_null_study(cfg), ConfigError);
    cfg.segment_counts = {4, 4};
    EXPECT_THROW(gaussian_null_study(cfg), ConfigError);
    cfg.segment_counts = {};
    EXPECT_THROW(gaussian_null_study(cfg), ConfigError);
    cfg                = StudyConfig{};
    cfg.trials         = 0;
    EXPECT_THROW(gaussian_null_study(cfg), ConfigError);
    cfg                = StudyConfig{};
    cfg.segment_length = 48;
    EXPECT_THROW(gaussian_null_study(cfg), ConfigError);
    cfg       = StudyConfig{};
    cfg.sigma = -1.0;
    EXPECT_THROW(gaussian_null_study(cfg), ConfigError);
}

TEST(ContaminatedStudy, ZeroSigmaContrastIsFlat) {
    auto cfg   = StudyConfig::default_contaminated();
    cfg.sigma  = 0.0;
    cfg.trials = 2;
    const auto curve = contaminated_signal_study(cfg);
    for (const auto& p : curve.points) {
        EXPECT_NEAR(p.peak_contrast, curve.points.front().peak_contrast, 1e-9 * curve.points.front().peak_contrast);
    }
}

TEST(ContaminatedStudy, ContrastGrowsWithSegments) {
    const auto curve = contaminated_signal_study(StudyConfig::default_contaminated());
    ASSERT_EQ(curve.points.size(), 3U);
    EXPECT_GT(curve.points.back().peak_contrast, curve.points.front().peak_contrast);
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        EXPECT_GE(curve.points[i].peak_contrast, curve.points[i - 1].peak_contrast);
    }
}

TEST(ContaminatedStudy, ClassicalBispectrumMissesNonHarmonicPair) {
    auto fractional = StudyConfig::default_contaminated();
    auto classical  = fractional;
    classical.k     = 1.0;
    const auto cf   = contaminated_signal_study(fractional);
    const auto cc   = contaminated_signal_study(classical);
    for (std::size_t i = 0; i < cf.points.size(); ++i) {
        // at k = 1 only noise cross terms remain; no growth with averaging
        EXPECT_LT(5.0 * cc.points[i].peak_contrast, cf.points[i].peak_contrast);
    }
    EXPECT_LT(cc.points.back().peak_contrast, 2.0 * cc.points.front().peak_contrast);

    classical.sigma  = 0.0;
    classical.trials = 1;
    for (const auto& p : contaminated_signal_study(classical).points) {
        EXPECT_LT(p.peak_contrast, 1e-3);
    }
}

TEST(ContaminatedStudy, NeedsTones) { EXPECT_THROW(contaminated_signal_study(StudyConfig{}), ConfigError); }

} // namespace
