#pragma once

// Little-endian framing shared by the recurrent and baseline model files:
// magic "CO3D", one format-version byte, one model-kind byte, then a
// kind-specific config block and payload.

#include <bit>
#include <cstdint>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coherelint/error.hpp"

namespace coherelint {

inline constexpr std::string_view kModelMagic = "CO3D";
inline constexpr std::uint8_t kModelFormatVersion = 1;

enum class ModelKind : std::uint8_t { SimpleRNN = 0, LSTM = 1, LinearSvm = 2 };

class ByteWriter {
public:
    void u8(std::uint8_t v) { bytes_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void f64s(std::span<const double> values) {
        for (double v : values) f64(v);
    }
    void str(std::string_view s) {
        u32(static_cast<std::uint32_t>(s.size()));
        bytes_.insert(bytes_.end(), s.begin(), s.end());
    }
    void header(ModelKind kind) {
        bytes_.insert(bytes_.end(), kModelMagic.begin(), kModelMagic.end());
        u8(kModelFormatVersion);
        u8(static_cast<std::uint8_t>(kind));
    }

    const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }

    void save(const std::string& path) const {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw Error(ErrorKind::Io, "cannot write '" + path + "'");
        out.write(reinterpret_cast<const char*>(bytes_.data()), static_cast<std::streamsize>(bytes_.size()));
        if (!out) throw Error(ErrorKind::Io, "write to '" + path + "' failed");
    }

private:
    std::vector<std::uint8_t> bytes_;
};

class ByteReader {
public:
    explicit ByteReader(std::string data, std::string origin = "<memory>")
        : data_(std::move(data)), origin_(std::move(origin)) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
    std::uint32_t u32() {
        auto p = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(p[i])) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        auto p = take(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(p[i])) << (8 * i);
        return v;
    }
    double f64() { return std::bit_cast<double>(u64()); }
    void f64s(std::span<double> out) {
        for (double& v : out) v = f64();
    }
    std::string str() {
        const auto n = u32();
        return std::string(take(n), n);
    }

    /// Validates magic and version; returns the model kind.
    ModelKind header() {
        if (data_.size() < kModelMagic.size() || std::string_view(data_).substr(0, 4) != kModelMagic)
            throw Error(ErrorKind::CorruptFile, origin_ + ": not a model file (bad magic)");
        pos_ = kModelMagic.size();
        const auto version = u8();
        if (version != kModelFormatVersion) {
            throw Error(ErrorKind::VersionMismatch, origin_ + ": format version " + std::to_string(version) +
                                                        ", expected " + std::to_string(kModelFormatVersion));
        }
        const auto kind = u8();
        if (kind > static_cast<std::uint8_t>(ModelKind::LinearSvm))
            throw Error(ErrorKind::CorruptFile, origin_ + ": unknown model kind " + std::to_string(kind));
        return static_cast<ModelKind>(kind);
    }

    void expect_end() const {
        if (pos_ != data_.size()) throw Error(ErrorKind::CorruptFile, origin_ + ": trailing bytes after model");
    }

    const std::string& origin() const noexcept { return origin_; }

private:
    const char* take(std::size_t n) {
        if (n > data_.size() - pos_) throw Error(ErrorKind::CorruptFile, origin_ + ": unexpected end of file");
        const char* p = data_.data() + pos_;
        pos_ += n;
        return p;
    }

    std::string data_;
    std::string origin_;
    std::size_t pos_ = 0;
};

}  // namespace coherelint
