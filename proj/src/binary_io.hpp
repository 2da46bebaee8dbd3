#pragma once

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

// Shared little-endian binary file plumbing for the on-disk index formats.
// Every file is a payload followed by a u64 FNV-1a checksum trailer.

namespace lexrag::detail {

inline std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

class BinaryWriter {
public:
    void u32(std::uint32_t v) { raw(&v, sizeof v); }
    void u64(std::uint64_t v) { raw(&v, sizeof v); }
    void f32(float v) { raw(&v, sizeof v); }
    void f64(double v) { raw(&v, sizeof v); }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        raw(s.data(), s.size());
    }
    const std::string& bytes() const { return buf_; }
    std::string take() { return std::move(buf_); }

private:
    void raw(const void* p, std::size_t n) { buf_.append(static_cast<const char*>(p), n); }
    std::string buf_;
};

template <typename Error>
class BinaryReader {
public:
    BinaryReader(std::string bytes, std::string name)
        : buf_(std::move(bytes)), name_(std::move(name)) {}

    std::uint32_t u32() {
        std::uint32_t v;
        raw(&v, sizeof v);
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v;
        raw(&v, sizeof v);
        return v;
    }
    float f32() {
        float v;
        raw(&v, sizeof v);
        return v;
    }
    double f64() {
        double v;
        raw(&v, sizeof v);
        return v;
    }
    std::string str() {
        const std::uint32_t n = u32();
        if (n > remaining())
            fail("string length overruns file");
        std::string s = buf_.substr(pos_, n);
        pos_ += n;
        return s;
    }
    std::size_t remaining() const { return buf_.size() - pos_; }
    std::size_t offset() const { return pos_; }

    [[noreturn]] void fail(const std::string& what) const {
        std::ostringstream os;
        os << name_ << ": " << what << " at offset " << pos_;
        throw Error(os.str());
    }

private:
    void raw(void* p, std::size_t n) {
        if (n > remaining())
            fail("unexpected end of file");
        std::memcpy(p, buf_.data() + pos_, n);
        pos_ += n;
    }
    std::string buf_;
    std::string name_;
    std::size_t pos_ = 0;
};

template <typename Error>
std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return std::move(os).str();
}

template <typename Error>
void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw Error("write failed for " + path.string());
}

template <typename Error>
void write_checksummed_file(const std::filesystem::path& path, std::string payload) {
    BinaryWriter trailer;
    trailer.u64(fnv1a(payload));
    payload += trailer.bytes();
    write_file<Error>(path, payload);
}

template <typename Error>
std::string read_checksummed_file(const std::filesystem::path& path, const std::string& name) {
    std::string bytes = read_file<Error>(path);
    if (bytes.size() < sizeof(std::uint64_t))
        throw Error(name + ": file too short to hold a checksum");
    const std::string payload = bytes.substr(0, bytes.size() - sizeof(std::uint64_t));
    std::uint64_t stored;
    std::memcpy(&stored, bytes.data() + payload.size(), sizeof stored);
    if (fnv1a(payload) != stored)
        throw Error(name + ": checksum mismatch, file is corrupted");
    return payload;
}

} // namespace lexrag::detail
