#include <gtest/gtest.h>

#include <random>

#include "ecgemd/error.hpp"
#include "ecgemd/segment.hpp"
#include "synthetic.hpp"

namespace ecgemd {
namespace {

EcgRecord make(std::size_t n, ClassLabel label = ClassLabel::kHpt) {
    EcgRecord r;
    r.id = "rec";
    r.label = label;
    r.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.samples[i] = static_cast<double>(i);
    return r;
}

TEST(Segment, HptTrimmedRecordAt10000) {
    const auto segs = segment_record(make(980'000), {10000});
    EXPECT_EQ(segs.size(), 98u);
    EXPECT_EQ(segs.size() * 139, 13622u);
}

TEST(Segment, HptTrimmedRecordAt5000) {
    EXPECT_EQ(segment_offsets(980'000, {5000}).size() * 139, 27244u);
}

TEST(Segment, NormalRecord) {
    EXPECT_EQ(segment_offsets(1'000'000, {5000}).size() * 18, 3600u);
    EXPECT_EQ(segment_offsets(1'000'000, {10000}).size() * 18, 1800u);
}

TEST(Segment, ShortRecordGivesNoSegments) {
    EXPECT_TRUE(segment_record(make(9999), {10000}).empty());
}

TEST(Segment, EmptyRecordIsAnError) {
    EXPECT_THROW(segment_record(make(0), {5000}), DataError);
}

TEST(Segment, KeysAndLabels) {
    const auto segs = segment_record(make(25, ClassLabel::kNormal), {10});
    ASSERT_EQ(segs.size(), 2u);
    EXPECT_EQ(segs[1].offset, 10u);
    EXPECT_EQ(segs[1].record_id, "rec");
    EXPECT_EQ(segs[1].label, ClassLabel::kNormal);
    EXPECT_EQ(segs[1].samples.front(), 10.0);
}

TEST(Segment, ConcatenationReproducesPrefix) {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 3000;
        const std::size_t len = 1 + rng() % 400;
        EcgRecord r{"x", ClassLabel::kHpt, testing::uniform_noise(n, -1, 1, trial), {}};
        const auto segs = segment_record(r, {len});
        ASSERT_EQ(segs.size(), n / len);
        std::vector<double> joined;
        for (std::size_t k = 0; k < segs.size(); ++k) {
            ASSERT_EQ(segs[k].samples.size(), len);
            ASSERT_EQ(segs[k].offset, k * len);
            joined.insert(joined.end(), segs[k].samples.begin(), segs[k].samples.end());
        }
        ASSERT_TRUE(std::equal(joined.begin(), joined.end(), r.samples.begin()));
    }
}

}  // namespace
}  // namespace ecgemd
