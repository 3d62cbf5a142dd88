#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ecgemd/error.hpp"
#include "ecgemd/features.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

namespace ecgemd {
namespace {

using V = std::vector<double>;

TEST(TimeDomain, Constant) {
    const V x(10, -2.5);
    EXPECT_DOUBLE_EQ(mean(x), -2.5);
    EXPECT_DOUBLE_EQ(std_dev(x), 0.0);
    EXPECT_DOUBLE_EQ(rms(x), 2.5);
}

TEST(TimeDomain, Examples) {
    EXPECT_NEAR(rms(V{3, 4}), std::sqrt(12.5), 1e-15);
    EXPECT_NEAR(rms(V{3, 4}), 3.53553, 1e-5);
    EXPECT_EQ(mean(V{-1, 1}), 0.0);
    EXPECT_EQ(std_dev(V{-1, 1}), 1.0);
    EXPECT_EQ(rms(V{-1, 1}), 1.0);
}

TEST(TimeDomain, EmptyIsAnError) {
    EXPECT_THROW(mean(V{}), DataError);
    EXPECT_THROW(std_dev(V{}), DataError);
    EXPECT_THROW(rms(V{}), DataError);
}

TEST(Shannon, Examples) {
    EXPECT_EQ(shannon_entropy(V{1, 1}), 0.0);
    EXPECT_EQ(shannon_entropy(V{0, 0, 0}), 0.0);
    EXPECT_NEAR(shannon_entropy(V{0.5, 0.5}), std::log(2.0), 1e-15);
    EXPECT_NEAR(shannon_entropy(V{0.5, 0.5}), 0.693147, 1e-6);
}

TEST(LogEnergy, Examples) {
    EXPECT_EQ(log_energy_entropy(V{1, 1}), 0.0);
    EXPECT_NEAR(log_energy_entropy(V{std::exp(1.0), std::exp(1.0)}), 4.0, 1e-14);
    EXPECT_EQ(log_energy_entropy(V{0, 1}), 0.0);
}

TEST(Threshold, Examples) {
    EXPECT_EQ(threshold_entropy(V{0.1, 0.3, -0.5}, 0.2), 2.0);
    EXPECT_EQ(threshold_entropy(V{0.1, -0.2, 0.0}, 0.2), 0.0);
    EXPECT_EQ(threshold_entropy(V{1e-9, -3e-7, 2.0}, 1e-12), 3.0);
}

TEST(Sure, Examples) {
    EXPECT_NEAR(sure_entropy(V{0.1, 0.3}, 0.2), 1.05, 1e-15);
    EXPECT_EQ(sure_entropy(V(7, 0.0), 0.2), 0.0);
    const V big{1, -2, 3, 0.5};
    const double n = static_cast<double>(big.size());
    EXPECT_NEAR(sure_entropy(big, 0.2), n + n * 0.04, 1e-14);
}

TEST(Norm, Examples) {
    EXPECT_NEAR(norm_entropy(V{1, 1}, 1.0), 2.0, 1e-15);
    EXPECT_NEAR(norm_entropy(V{1, 1}, 1.7), 2.0, 1e-15);
    EXPECT_EQ(norm_entropy(V{0}, 1.1), 0.0);
    EXPECT_NEAR(norm_entropy(V{2, -2}, 1.1), 2 * std::pow(2.0, 1.1), 1e-14);
    EXPECT_NEAR(norm_entropy(V{2, -2}, 1.1), 4.28709, 1e-5);
}

TEST(ApEn, ConstantIsZero) {
    EXPECT_NEAR(approximate_entropy(V(100, 3.0), 2, 0.1), 0.0, 1e-15);
    EXPECT_EQ(approximate_entropy(V(100, 3.0), FeatureConfig{}), 0.0);
}

TEST(ApEn, Alternation) {
    V x(200);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = i % 2 ? 1.5 : -0.5;
    const double r = 0.2 * std_dev(x);
    EXPECT_LE(testing::ref_apen(x, 2, r), 0.01);
    EXPECT_LE(approximate_entropy(x, 2, r), 0.01);
}

TEST(ApEn, MatchesBruteForce) {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const auto x = testing::uniform_noise(100, 0, 1, s);
        const double r = 0.2 * std_dev(x);
        EXPECT_NEAR(approximate_entropy(x, 2, r), testing::ref_apen(x, 2, r), 1e-12);
        EXPECT_NEAR(approximate_entropy(x, 3, 0.3), testing::ref_apen(x, 3, 0.3), 1e-12);
    }
}

TEST(ApEn, Preconditions) {
    EXPECT_THROW(approximate_entropy(V{1, 2, 3}, 2, 0.1), DataError);
    EXPECT_THROW(approximate_entropy(V{1, 2, 3, 4, 5}, 2, 0.0), DataError);
}

TEST(ApEn, PrefixCap) {
    const auto x = testing::gaussian_noise(500, 1, 4);
    FeatureConfig cfg;
    cfg.apen_max_samples = 120;
    const V head(x.begin(), x.begin() + 120);
    EXPECT_EQ(approximate_entropy(x, cfg), approximate_entropy(head, 2, 0.2 * std_dev(head)));
}

TEST(Oracles, AllEntropiesAgree) {
    for (std::uint64_t s = 0; s < 50; ++s) {
        const auto x = testing::gaussian_noise(100, 0.5, s + 1000);
        EXPECT_NEAR(shannon_entropy(x), testing::ref_shannon(x), 1e-12);
        EXPECT_NEAR(log_energy_entropy(x), testing::ref_log_energy(x), 1e-12);
        EXPECT_EQ(threshold_entropy(x, 0.2), testing::ref_threshold(x, 0.2));
        EXPECT_NEAR(sure_entropy(x, 0.2), testing::ref_sure(x, 0.2), 1e-12);
        EXPECT_NEAR(norm_entropy(x, 1.1), testing::ref_norm(x, 1.1), 1e-12);
    }
}

TEST(Invariants, Scaling) {
    const auto x = testing::gaussian_noise(300, 1.0, 21);
    for (double c : {-3.0, 0.25, 7.0}) {
        V y(x);
        for (auto& v : y) v *= c;
        const double ac = std::abs(c);
        EXPECT_NEAR(mean(y), c * mean(x), 1e-9);
        EXPECT_NEAR(std_dev(y), ac * std_dev(x), 1e-9);
        EXPECT_NEAR(rms(y), ac * rms(x), 1e-9);
        EXPECT_EQ(threshold_entropy(y, 0.2 * ac), threshold_entropy(x, 0.2));
        EXPECT_NEAR(norm_entropy(y, 1.1), std::pow(ac, 1.1) * norm_entropy(x, 1.1), 1e-9 * norm_entropy(y, 1.1));
        EXPECT_NEAR(approximate_entropy(y, FeatureConfig{}), approximate_entropy(x, FeatureConfig{}), 1e-6);
    }
}

TEST(Invariants, PermutationEightInvariantApEnNot) {
    V x(200);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.3 * static_cast<double>(i));
    V y(x);
    std::mt19937 rng(2);
    std::shuffle(y.begin(), y.end(), rng);
    FeatureConfig cfg;
    const auto a = imf_measures(x, cfg);
    const auto b = imf_measures(y, cfg);
    for (std::size_t j = 0; j + 1 < kMeasuresPerImf; ++j) EXPECT_NEAR(a[j], b[j], 1e-9 * (1 + std::abs(a[j]))) << j;
    EXPECT_GT(std::abs(a[8] - b[8]), 0.1);
}

ImfDecomposition zero_dec(std::size_t n) {
    ImfDecomposition d;
    d.imfs.assign(5, V(n, 0.0));
    d.residual.assign(n, 0.0);
    return d;
}

TEST(Extract, AllZeroDecomposition) {
    const auto fv = extract_features(zero_dec(64), FeatureConfig{});
    for (double v : fv.values) EXPECT_EQ(v, 0.0);
}

TEST(Extract, LayoutContract) {
    const auto dec = emd_decompose(testing::two_tone(1000));
    FeatureConfig cfg;
    cfg.apen_max_samples = 300;
    const auto fv = extract_features(dec, cfg);
    for (std::size_t k = 0; k < kFeatureImfs; ++k) {
        const auto m = imf_measures(dec.imfs[k], cfg);
        for (std::size_t j = 0; j < kMeasuresPerImf; ++j)
            EXPECT_EQ(fv.values[feature_index(k, static_cast<Measure>(j))], m[j]);
        EXPECT_EQ(fv.values[9 * k + 3], shannon_entropy(dec.imfs[k]));
        EXPECT_EQ(fv.values[9 * k + 0], std_dev(dec.imfs[k]));
    }
}

TEST(Extract, WrongImfCount) {
    auto d = zero_dec(32);
    d.imfs.pop_back();
    EXPECT_THROW(extract_features(d, FeatureConfig{}), Error);
}

TEST(Extract, SureDisabled) {
    FeatureConfig cfg;
    cfg.sure_enabled = false;
    const auto m = imf_measures(testing::gaussian_noise(50, 1, 1), cfg);
    EXPECT_EQ(m[static_cast<std::size_t>(Measure::kSure)], 0.0);
}

TEST(Config, Validation) {
    FeatureConfig c;
    EXPECT_NO_THROW(validate(c));
    c.norm_p = 2.0;
    EXPECT_THROW(validate(c), ConfigError);
    c = {};
    c.entropy_threshold_eps = 0;
    EXPECT_THROW(validate(c), ConfigError);
    c = {};
    c.apen_m = 0;
    EXPECT_THROW(validate(c), ConfigError);
}

TEST(Names, Columns) {
    const auto& names = feature_names();
    EXPECT_EQ(names[0], "imf1_std");
    EXPECT_EQ(names[8], "imf1_apen");
    EXPECT_EQ(names[44], "imf5_apen");
    EXPECT_EQ(names[feature_index(2, Measure::kSure)], "imf3_sure");
}

TEST(Table, LosslessRoundTrip) {
    std::vector<FeatureVector> rows(3);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> dist(-1e6, 1e6);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        rows[r].record_id = "rec" + std::to_string(r);
        rows[r].offset = r * 5000;
        rows[r].label = r % 2 ? ClassLabel::kNormal : ClassLabel::kHpt;
        for (auto& v : rows[r].values) v = dist(rng) / 3.0;
    }
    rows[1].values[0] = 1e-300;
    rows[1].values[1] = -0.0;
    std::stringstream ss;
    write_feature_table(ss, rows);
    EXPECT_EQ(ss.str().rfind(kFeatureTableSchema, 0), 0u);
    const auto back = read_feature_table(ss);
    ASSERT_EQ(back.size(), rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        EXPECT_EQ(back[r].record_id, rows[r].record_id);
        EXPECT_EQ(back[r].offset, rows[r].offset);
        EXPECT_EQ(back[r].label, rows[r].label);
        EXPECT_EQ(back[r].values, rows[r].values);
    }
}

TEST(Table, BadSchemaRejected) {
    std::stringstream ss("# something-else v9\n");
    EXPECT_THROW(read_feature_table(ss), DataError);
}

TEST(Extract, FiniteOnSyntheticSegments) {
    FeatureConfig cfg;
    cfg.apen_max_samples = 500;
    for (std::uint64_t s = 0; s < 4; ++s) {
        const auto fv = extract_features(emd_decompose(testing::ecg_like(5000, 128, 60 + 10 * s, 0.05, s)), cfg);
        for (double v : fv.values) EXPECT_TRUE(std::isfinite(v));
    }
}

}  // namespace
}  // namespace ecgemd
