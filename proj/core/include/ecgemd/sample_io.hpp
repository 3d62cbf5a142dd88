#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ecgemd {

inline constexpr std::string_view kSampleFileSchema = "ecgemd-samples v1";

/// Intermediate sample file: one text line `ecgemd-samples v1 <count>`
/// followed by `count` little-endian IEEE-754 doubles.
void write_sample_file(const std::filesystem::path& path, std::span<const double> samples);
std::vector<double> read_sample_file(const std::filesystem::path& path);

/// Writes one sample per line with 17 significant digits (the text record format).
void write_text_samples(const std::filesystem::path& path, std::span<const double> samples);

/// Lowercase hex SHA-256 of a file's bytes / of a string.
std::string sha256_file(const std::filesystem::path& path);
std::string sha256_hex(std::string_view bytes);

/// Writes `contents` to `path` via a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace ecgemd
