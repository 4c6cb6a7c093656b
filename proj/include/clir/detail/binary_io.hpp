#pragma once

#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "clir/types.hpp"

namespace clir::detail {

/// Little-endian writer for index snapshots.
class BinaryWriter {
  public:
    explicit BinaryWriter(std::ostream& out) : out_(out) {}

    void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }

    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.put(static_cast<char>((v >> (8 * i)) & 0xFF));
    }

    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out_.put(static_cast<char>((v >> (8 * i)) & 0xFF));
    }

    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

    void str(std::string_view s) {
        u64(s.size());
        out_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }

    bool good() const { return out_.good(); }

  private:
    std::ostream& out_;
};

/// Little-endian reader; throws on truncated input.
class BinaryReader {
  public:
    explicit BinaryReader(std::istream& in) : in_(in) {}

    std::uint8_t u8() {
        const int c = in_.get();
        if (c == std::istream::traits_type::eof()) throw Error("truncated snapshot");
        return static_cast<std::uint8_t>(c);
    }

    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= std::uint32_t(u8()) << (8 * i);
        return v;
    }

    std::uint64_t u64() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= std::uint64_t(u8()) << (8 * i);
        return v;
    }

    float f32() { return std::bit_cast<float>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }

    std::string str() {
        const auto len = u64();
        // strings in snapshots are ids, terms and stopwords; a huge length
        // means the file is not a snapshot
        if (len > (std::uint64_t{1} << 30)) throw Error("corrupt snapshot string");
        std::string s(len, '\0');
        in_.read(s.data(), static_cast<std::streamsize>(len));
        if (static_cast<std::uint64_t>(in_.gcount()) != len) throw Error("truncated snapshot");
        return s;
    }

  private:
    std::istream& in_;
};

}  // namespace clir::detail
