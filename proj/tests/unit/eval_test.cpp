#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "ecgemd/error.hpp"
#include "ecgemd/eval.hpp"

namespace ecgemd {
namespace {

constexpr auto H = ClassLabel::kHpt;
constexpr auto N = ClassLabel::kNormal;

std::vector<ClassLabel> labels_of(std::size_t hpt, std::size_t normal) {
    std::vector<ClassLabel> out(hpt, H);
    out.insert(out.end(), normal, N);
    return out;
}

void expect_partition(const std::vector<std::vector<std::size_t>>& folds, std::size_t n) {
    std::vector<int> seen(n, 0);
    for (const auto& f : folds)
        for (auto i : f) {
            ASSERT_LT(i, n);
            ++seen[i];
        }
    for (std::size_t i = 0; i < n; ++i) ASSERT_EQ(seen[i], 1) << i;
}

std::size_t count_of(const std::vector<std::size_t>& fold, const std::vector<ClassLabel>& labels, ClassLabel c) {
    return static_cast<std::size_t>(std::count_if(fold.begin(), fold.end(), [&](auto i) { return labels[i] == c; }));
}

TEST(Folds, TenSamplesFiveFolds) {
    const auto labels = labels_of(5, 5);
    const auto folds = make_folds(labels, EvalConfig{});
    ASSERT_EQ(folds.size(), 5u);
    for (const auto& f : folds) {
        EXPECT_EQ(f.size(), 2u);
        EXPECT_EQ(count_of(f, labels, H), 1u);
        EXPECT_EQ(count_of(f, labels, N), 1u);
    }
    expect_partition(folds, labels.size());
}

TEST(Folds, SameSeedSameFolds) {
    const auto labels = labels_of(37, 11);
    EXPECT_EQ(make_folds(labels, EvalConfig{}), make_folds(labels, EvalConfig{}));
    EvalConfig other;
    other.shuffle_seed = 43;
    EXPECT_NE(make_folds(labels, EvalConfig{}), make_folds(labels, other));
}

TEST(Folds, FullCohortAt5000) {
    const auto labels = labels_of(27244, 3600);
    const auto folds = make_folds(labels, EvalConfig{});
    expect_partition(folds, labels.size());
    for (const auto& f : folds) {
        EXPECT_TRUE(f.size() == 6168 || f.size() == 6169) << f.size();
        const auto h = count_of(f, labels, H);
        EXPECT_TRUE(h == 5448 || h == 5449) << h;
        EXPECT_EQ(count_of(f, labels, N), 720u);
    }
}

TEST(Folds, BalancedOverallAndPerClassRandomShapes) {
    std::mt19937 rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t k = 2 + rng() % 9;
        const std::size_t h = k + rng() % 60;
        const std::size_t n = k + rng() % 60;
        auto labels = labels_of(h, n);
        std::shuffle(labels.begin(), labels.end(), rng);
        EvalConfig cfg;
        cfg.k_folds = k;
        cfg.shuffle_seed = trial;
        const auto folds = make_folds(labels, cfg);
        expect_partition(folds, labels.size());
        auto spread = [&](auto size_of) {
            std::size_t lo = SIZE_MAX, hi = 0;
            for (const auto& f : folds) {
                lo = std::min(lo, size_of(f));
                hi = std::max(hi, size_of(f));
            }
            return hi - lo;
        };
        EXPECT_LE(spread([](const auto& f) { return f.size(); }), 1u);
        EXPECT_LE(spread([&](const auto& f) { return count_of(f, labels, H); }), 1u);
        EXPECT_LE(spread([&](const auto& f) { return count_of(f, labels, N); }), 1u);
    }
}

TEST(Folds, UnstratifiedStillPartitions) {
    EvalConfig cfg;
    cfg.stratified = false;
    cfg.k_folds = 3;
    const auto labels = labels_of(10, 1);
    const auto folds = make_folds(labels, cfg);
    expect_partition(folds, labels.size());
}

TEST(Folds, Errors) {
    EvalConfig cfg;
    cfg.k_folds = 1;
    EXPECT_THROW(make_folds(labels_of(5, 5), cfg), ConfigError);
    cfg.k_folds = 5;
    EXPECT_THROW(make_folds(labels_of(10, 4), cfg), ConfigError);
    cfg.stratified = false;
    EXPECT_THROW(make_folds(labels_of(2, 2), cfg), ConfigError);
}

TEST(Shuffle, PermutationAndDeterminism) {
    std::vector<std::size_t> a(1000), b(1000);
    std::iota(a.begin(), a.end(), 0);
    std::iota(b.begin(), b.end(), 0);
    seeded_shuffle(a, 7);
    seeded_shuffle(b, 7);
    EXPECT_EQ(a, b);
    EXPECT_EQ(std::set<std::size_t>(a.begin(), a.end()).size(), 1000u);
    std::vector<std::size_t> sorted(a);
    std::sort(sorted.begin(), sorted.end());
    EXPECT_NE(a, sorted);
}

TEST(Confusion, Examples) {
    const std::vector<ClassLabel> truth{H, H, H, N, N};
    EXPECT_EQ(confusion(truth, truth), (ConfusionMatrix{3, 0, 2, 0}));
    const std::vector<ClassLabel> all_h(5, H);
    EXPECT_EQ(confusion(all_h, truth), (ConfusionMatrix{3, 0, 0, 2}));
    EXPECT_THROW(confusion(std::vector<ClassLabel>{H}, truth), DataError);
}

TEST(Metrics, ReferenceCountsAt5000) {
    const ConfusionMatrix cm{27230, 14, 3587, 13};
    EXPECT_EQ(cm.total(), 30844u);
    const auto m = metrics(cm);
    EXPECT_DOUBLE_EQ(*m.spe, 3587.0 / 3600.0);
    EXPECT_NEAR(*m.spe * 100, 99.6, 0.05);
    EXPECT_DOUBLE_EQ(*m.acc, 30817.0 / 30844.0);
    EXPECT_EQ(format_percent(m.acc), "99.9125%");
    EXPECT_EQ(format_percent(m.spe, 3), "99.639%");
}

TEST(Metrics, ReferenceCountsAt10000) {
    const auto m = metrics({13615, 7, 1791, 9});
    EXPECT_NEAR(*m.spe * 100, 99.5, 0.1);
    EXPECT_EQ(format_percent(m.acc, 3), "99.896%");
}

TEST(Metrics, PerfectSmall) {
    const auto m = metrics({1, 0, 1, 0});
    for (const auto& v : {m.acc, m.rec, m.spe, m.pre, m.f1}) EXPECT_EQ(*v, 1.0);
}

TEST(Metrics, UndefinedIsNotApplicable) {
    const auto m = metrics({0, 0, 5, 0});
    EXPECT_EQ(*m.acc, 1.0);
    EXPECT_FALSE(m.rec);
    EXPECT_FALSE(m.pre);
    EXPECT_FALSE(m.f1);
    EXPECT_EQ(*m.spe, 1.0);
    EXPECT_EQ(format_percent(m.rec), "n/a");
    EXPECT_FALSE(metrics({}).acc);
}

TEST(Metrics, Identities) {
    std::mt19937 rng(6);
    for (int trial = 0; trial < 500; ++trial) {
        const ConfusionMatrix cm{rng() % 50, rng() % 50, rng() % 50, rng() % 50};
        if (cm.total() == 0) continue;
        const auto m = metrics(cm);
        EXPECT_DOUBLE_EQ(*m.acc, static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total()));
        if (m.pre && m.rec && *m.pre + *m.rec > 0) EXPECT_NEAR(*m.f1, 2 * *m.pre * *m.rec / (*m.pre + *m.rec), 1e-12);
        const auto flipped = metrics({cm.tn, cm.fp, cm.tp, cm.fn});
        EXPECT_EQ(flipped.rec, m.spe);
        EXPECT_EQ(flipped.spe, m.rec);
        for (const auto& v : {m.acc, m.rec, m.spe, m.pre, m.f1})
            if (v) EXPECT_TRUE(*v >= 0 && *v <= 1);
    }
}

TrainingSet separable(std::size_t n) {
    TrainingSet data(2);
    for (std::size_t i = 0; i < n; ++i) {
        const auto label = i % 3 == 0 ? N : H;
        const double v[2] = {label == H ? 1.0 + 0.01 * i : -1.0 - 0.01 * i, static_cast<double>(i % 7)};
        data.add_row(v, label);
    }
    return data;
}

TEST(CrossValidate, SeparableIsPerfect) {
    const auto r = cross_validate(separable(90), TreeConfig{}, EvalConfig{});
    EXPECT_EQ(*r.metrics.acc, 1.0);
    EXPECT_EQ(r.pooled.total(), 90u);
    EXPECT_EQ(r.per_fold.size(), 5u);
    ConfusionMatrix sum;
    for (const auto& f : r.per_fold) sum += f;
    EXPECT_EQ(sum, r.pooled);
}

TEST(CrossValidate, NoiseLabelsNearChance) {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> g(0, 1);
    TrainingSet data(5);
    std::vector<ClassLabel> labels = labels_of(200, 200);
    std::shuffle(labels.begin(), labels.end(), rng);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double v[5] = {g(rng), g(rng), g(rng), g(rng), g(rng)};
        data.add_row(v, labels[i]);
    }
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        EvalConfig cfg;
        cfg.shuffle_seed = seed;
        const auto r = cross_validate(data, TreeConfig{}, cfg);
        EXPECT_NEAR(*r.metrics.acc, 0.5, 0.1) << seed;
    }
}

TEST(CrossValidate, DeterministicAcrossWorkerCounts) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0, 1);
    TrainingSet data(3);
    for (int i = 0; i < 120; ++i) {
        const double v[3] = {u(rng), u(rng), u(rng)};
        data.add_row(v, v[0] + 0.2 * u(rng) > 0.6 ? H : N);
    }
    EvalConfig one;
    EvalConfig many;
    many.workers = 4;
    const auto a = cross_validate(data, TreeConfig{}, one);
    const auto b = cross_validate(data, TreeConfig{}, one);
    const auto c = cross_validate(data, TreeConfig{}, many);
    EXPECT_EQ(a.predictions, b.predictions);
    EXPECT_EQ(a.per_fold, c.per_fold);
    EXPECT_EQ(a.metrics, c.metrics);
    EXPECT_EQ(a.folds, c.folds);
}

}  // namespace
}  // namespace ecgemd
