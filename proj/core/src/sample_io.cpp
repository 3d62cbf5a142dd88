#include "ecgemd/sample_io.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

#include "ecgemd/error.hpp"

namespace ecgemd {
namespace {

static_assert(std::endian::native == std::endian::little, "sample files assume a little-endian host");

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
            throw InvariantError("SHA-256 initialisation failed");
        }
    }
    void update(const void* data, std::size_t len) { EVP_DigestUpdate(ctx_.get(), data, len); }
    std::string hex() {
        unsigned char digest[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_.get(), digest, &len);
        std::string out;
        char buf[3];
        for (unsigned int i = 0; i < len; ++i) {
            std::snprintf(buf, sizeof buf, "%02x", digest[i]);
            out += buf;
        }
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

}  // namespace

void write_sample_file(const std::filesystem::path& path, std::span<const double> samples) {
    std::string bytes = std::string(kSampleFileSchema) + " " + std::to_string(samples.size()) + "\n";
    const auto header = bytes.size();
    bytes.resize(header + samples.size_bytes());
    std::memcpy(bytes.data() + header, samples.data(), samples.size_bytes());
    write_file_atomic(path, bytes);
}

std::vector<double> read_sample_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path.string() + ": cannot open sample file");
    std::string line;
    std::getline(in, line);
    std::istringstream header(line);
    std::string name;
    std::string version;
    std::size_t count = 0;
    if (!(header >> name >> version >> count) || name + " " + version != kSampleFileSchema) {
        throw DataError(path.string() + ": not an '" + std::string(kSampleFileSchema) + "' file");
    }
    std::vector<double> samples(count);
    in.read(reinterpret_cast<char*>(samples.data()), static_cast<std::streamsize>(count * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != count * sizeof(double)) {
        throw DataError(path.string() + ": truncated sample file (expected " + std::to_string(count) + " samples)");
    }
    return samples;
}

void write_text_samples(const std::filesystem::path& path, std::span<const double> samples) {
    std::string text;
    char buf[32];
    for (const double v : samples) {
        const int len = std::snprintf(buf, sizeof buf, "%.17g\n", v);
        text.append(buf, static_cast<std::size_t>(len));
    }
    write_file_atomic(path, text);
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path.string() + ": cannot open file for checksum");
    Sha256 sha;
    std::vector<char> buf(1 << 20);
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        sha.update(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    return sha.hex();
}

std::string sha256_hex(std::string_view bytes) {
    Sha256 sha;
    sha.update(bytes.data(), bytes.size());
    return sha.hex();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError(tmp.string() + ": cannot open for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw DataError(tmp.string() + ": write failed");
    }
    std::filesystem::rename(tmp, path);
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path.string() + ": cannot open file");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace ecgemd
