#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ecgemd {

/// Binary class label. HPT is the positive class and has the lower ordinal,
/// which matters wherever ties are broken by class order.
enum class ClassLabel : std::uint8_t {
    kHpt = 0,
    kNormal = 1,
};

inline constexpr std::size_t kNumClasses = 2;

constexpr std::size_t class_index(ClassLabel label) noexcept {
    return static_cast<std::size_t>(label);
}

/// "HPT" or "Normal".
std::string_view to_string(ClassLabel label) noexcept;

/// Case-insensitive parse of "hpt" / "normal". Throws DataError otherwise.
ClassLabel parse_label(std::string_view text);

struct RecordMetadata {
    int sample_rate_hz = 128;
    int resolution_bits = 8;
    std::string source;
};

/// One subject's single-channel ECG, samples kept exactly as stored.
struct EcgRecord {
    std::string id;
    ClassLabel label = ClassLabel::kNormal;
    std::vector<double> samples;
    RecordMetadata meta;
};

/// On-disk layout of a record file.
enum class SampleFormat : std::uint8_t {
    /// One ASCII decimal sample per line.
    kText,
    /// Headerless 16-bit two's-complement little-endian; value = (raw - baseline) / gain.
    kInt16Le,
};

SampleFormat parse_sample_format(std::string_view text);
std::string_view to_string(SampleFormat format) noexcept;

struct ManifestEntry {
    std::filesystem::path path;
    std::string id;
    ClassLabel label = ClassLabel::kNormal;
    SampleFormat format = SampleFormat::kText;
    double gain = 1.0;
    double baseline = 0.0;
};

inline constexpr std::size_t kDefaultHptTrim = 20000;

struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    std::size_t trim_prefix_hpt = kDefaultHptTrim;
};

/// Reads a record file. Text files keep values exactly as written; binary
/// files apply the entry's gain/baseline. Errors name the path and the
/// offending line (text) or byte offset (binary).
EcgRecord load_record(const std::filesystem::path& path, std::string id, ClassLabel label,
                      SampleFormat format = SampleFormat::kText, double gain = 1.0,
                      double baseline = 0.0);

EcgRecord load_record(const ManifestEntry& entry);

/// Removes the first `n` samples. The result may be empty; empty records are
/// rejected by segmentation rather than here.
EcgRecord trim_prefix(EcgRecord record, std::size_t n);

/// The trim the pipeline applies to a record of the given class: the
/// manifest's HPT prefix for HPT records, nothing for Normal ones.
std::size_t trim_for(ClassLabel label, const DatasetManifest& manifest) noexcept;

/// Parses a manifest file.
///
/// Format: comma-separated rows `path,id,label[,format[,gain[,baseline]]]`.
/// Blank lines and lines starting with `#` are ignored. A first row whose
/// first column is literally `path` is treated as a header. The directive
/// line `%trim_prefix_hpt=<n>` overrides the HPT prefix trim. Relative paths
/// resolve against the manifest's directory. `format` is `text` (default) or
/// `int16le`.
DatasetManifest load_manifest(const std::filesystem::path& path);

/// Same as load_manifest, for already-read text. Paths resolve against `base_dir`.
DatasetManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir,
                               bool check_files = true);

}  // namespace ecgemd
