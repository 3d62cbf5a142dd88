#include "ecgemd/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_set>

#include "ecgemd/error.hpp"

namespace ecgemd {
namespace {

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

std::string_view trim_ws(std::string_view text) {
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t\r\n");
    return text.substr(first, last - first + 1);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path.string() + ": cannot open file");
    std::string bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    if (in.bad()) throw DataError(path.string() + ": read error");
    return bytes;
}

double parse_double(std::string_view token, bool* ok) {
    double value = 0.0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    if (!token.empty() && *begin == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    *ok = ec == std::errc() && ptr == end;
    return value;
}

std::vector<double> parse_text_samples(const std::string& bytes, const std::filesystem::path& path) {
    std::vector<double> samples;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < bytes.size()) {
        auto eol = bytes.find('\n', pos);
        if (eol == std::string::npos) eol = bytes.size();
        ++line_no;
        const auto line = trim_ws(std::string_view(bytes).substr(pos, eol - pos));
        pos = eol + 1;
        if (line.empty()) continue;
        bool ok = false;
        const double v = parse_double(line, &ok);
        if (!ok) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed sample '" +
                            std::string(line) + "'");
        }
        samples.push_back(v);
    }
    return samples;
}

std::vector<double> parse_int16_samples(const std::string& bytes, const std::filesystem::path& path,
                                        double gain, double baseline) {
    if (bytes.size() % 2 != 0) {
        throw DataError(path.string() + ": byte " + std::to_string(bytes.size() - 1) +
                        ": truncated 16-bit sample (odd file size)");
    }
    std::vector<double> samples(bytes.size() / 2);
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const auto lo = static_cast<std::uint16_t>(static_cast<unsigned char>(bytes[2 * i]));
        const auto hi = static_cast<std::uint16_t>(static_cast<unsigned char>(bytes[2 * i + 1]));
        const auto raw = static_cast<std::int16_t>(static_cast<std::uint16_t>(lo | (hi << 8)));
        samples[i] = (static_cast<double>(raw) - baseline) / gain;
    }
    return samples;
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> cols;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        cols.push_back(trim_ws(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return cols;
}

}  // namespace

std::string_view to_string(ClassLabel label) noexcept {
    return label == ClassLabel::kHpt ? "HPT" : "Normal";
}

ClassLabel parse_label(std::string_view text) {
    const auto key = lower(trim_ws(text));
    if (key == "hpt") return ClassLabel::kHpt;
    if (key == "normal") return ClassLabel::kNormal;
    throw DataError("unknown class label '" + std::string(text) + "' (expected HPT or Normal)");
}

SampleFormat parse_sample_format(std::string_view text) {
    const auto key = lower(trim_ws(text));
    if (key.empty() || key == "text") return SampleFormat::kText;
    if (key == "int16le") return SampleFormat::kInt16Le;
    throw DataError("unknown sample format '" + std::string(text) + "' (expected text or int16le)");
}

std::string_view to_string(SampleFormat format) noexcept {
    return format == SampleFormat::kText ? "text" : "int16le";
}

EcgRecord load_record(const std::filesystem::path& path, std::string id, ClassLabel label,
                      SampleFormat format, double gain, double baseline) {
    if (!(gain != 0.0) || !std::isfinite(gain)) {
        throw DataError(path.string() + ": gain must be finite and non-zero");
    }
    const auto bytes = read_file(path);
    EcgRecord record;
    record.id = std::move(id);
    record.label = label;
    record.meta.source = path.string();
    record.samples = format == SampleFormat::kText ? parse_text_samples(bytes, path)
                                                   : parse_int16_samples(bytes, path, gain, baseline);
    if (record.samples.empty()) throw DataError(path.string() + ": empty record");
    return record;
}

EcgRecord load_record(const ManifestEntry& entry) {
    return load_record(entry.path, entry.id, entry.label, entry.format, entry.gain, entry.baseline);
}

EcgRecord trim_prefix(EcgRecord record, std::size_t n) {
    if (n > record.samples.size()) {
        throw DataError("record '" + record.id + "': cannot trim " + std::to_string(n) +
                        " samples from a record of length " + std::to_string(record.samples.size()));
    }
    record.samples.erase(record.samples.begin(), record.samples.begin() + static_cast<std::ptrdiff_t>(n));
    return record;
}

std::size_t trim_for(ClassLabel label, const DatasetManifest& manifest) noexcept {
    return label == ClassLabel::kHpt ? manifest.trim_prefix_hpt : 0;
}

DatasetManifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir,
                               bool check_files) {
    DatasetManifest manifest;
    std::unordered_set<std::string> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool first_row = true;
    while (pos < text.size()) {
        auto eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        ++line_no;
        const auto line = trim_ws(text.substr(pos, eol - pos));
        pos = eol + 1;
        const auto where = "manifest line " + std::to_string(line_no) + ": ";
        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '%') {
            const auto eq = line.find('=');
            const auto key = trim_ws(line.substr(1, eq == std::string_view::npos ? line.npos : eq - 1));
            if (key != "trim_prefix_hpt" || eq == std::string_view::npos) {
                throw DataError(where + "unknown directive '" + std::string(line) + "'");
            }
            const auto value = trim_ws(line.substr(eq + 1));
            std::size_t n = 0;
            const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
            if (ec != std::errc() || ptr != value.data() + value.size()) {
                throw DataError(where + "trim_prefix_hpt must be a non-negative integer");
            }
            manifest.trim_prefix_hpt = n;
            continue;
        }
        const auto cols = split_csv(line);
        if (first_row && lower(cols.front()) == "path") {
            first_row = false;
            continue;
        }
        first_row = false;
        if (cols.size() < 3 || cols.size() > 6) {
            throw DataError(where + "expected path,id,label[,format[,gain[,baseline]]]");
        }
        ManifestEntry entry;
        entry.path = std::filesystem::path(std::string(cols[0]));
        if (entry.path.is_relative()) entry.path = base_dir / entry.path;
        entry.id = std::string(cols[1]);
        if (entry.id.empty()) throw DataError(where + "empty record id");
        try {
            entry.label = parse_label(cols[2]);
            if (cols.size() > 3) entry.format = parse_sample_format(cols[3]);
        } catch (const DataError& e) {
            throw DataError(where + e.what());
        }
        for (std::size_t c = 4; c < cols.size(); ++c) {
            bool ok = false;
            const double v = parse_double(cols[c], &ok);
            if (!ok) throw DataError(where + "malformed number '" + std::string(cols[c]) + "'");
            (c == 4 ? entry.gain : entry.baseline) = v;
        }
        if (!seen.insert(entry.id).second) throw DataError(where + "duplicate record id '" + entry.id + "'");
        if (check_files && !std::filesystem::is_regular_file(entry.path)) {
            throw DataError(where + "missing file " + entry.path.string());
        }
        manifest.entries.push_back(std::move(entry));
    }
    return manifest;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
    const auto text = read_file(path);
    return parse_manifest(text, path.parent_path());
}

}  // namespace ecgemd
