#include "ecgemd/segment.hpp"

#include "ecgemd/error.hpp"

namespace ecgemd {

std::vector<std::size_t> segment_offsets(std::size_t length, const SegmentationConfig& config) {
    if (config.segment_len < 1) throw ConfigError("segment length must be >= 1");
    std::vector<std::size_t> offsets;
    const std::size_t count = length / config.segment_len;
    offsets.reserve(count);
    for (std::size_t i = 0; i < count; ++i) offsets.push_back(i * config.segment_len);
    return offsets;
}

std::vector<Segment> segment_record(const EcgRecord& record, const SegmentationConfig& config) {
    if (record.samples.empty()) throw DataError("record '" + record.id + "' is empty; nothing to segment");
    std::vector<Segment> segments;
    for (const auto offset : segment_offsets(record.samples.size(), config)) {
        const auto first = record.samples.begin() + static_cast<std::ptrdiff_t>(offset);
        segments.push_back(Segment{record.id, record.label, offset,
                                   {first, first + static_cast<std::ptrdiff_t>(config.segment_len)}});
    }
    return segments;
}

}  // namespace ecgemd
