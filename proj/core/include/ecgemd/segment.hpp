#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ecgemd/dataset.hpp"

namespace ecgemd {

struct SegmentationConfig {
    std::size_t segment_len = 5000;
};

/// Fixed-length window of a (trimmed, denoised) record.
struct Segment {
    std::string record_id;
    ClassLabel label = ClassLabel::kNormal;
    /// Index of the first sample, relative to the trimmed record start.
    std::size_t offset = 0;
    std::vector<double> samples;
};

/// Offsets of the floor(length / segment_len) non-overlapping windows.
std::vector<std::size_t> segment_offsets(std::size_t length, const SegmentationConfig& config);

/// Tiles `record` into consecutive non-overlapping segments; the trailing
/// remainder is discarded. Throws DataError on an empty record.
std::vector<Segment> segment_record(const EcgRecord& record, const SegmentationConfig& config);

}  // namespace ecgemd
