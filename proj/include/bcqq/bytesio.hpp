#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace bcqq::bytesio {

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

inline void put_u64(std::string& out, std::uint64_t v) {
    for (int k = 0; k < 8; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

inline void put_f64(std::string& out, double v) {
    put_u64(out, std::bit_cast<std::uint64_t>(v));
}

// Cursor over a byte buffer; every read is bounds-checked and parse errors
// name the offset and the field being read.
struct Reader {
    const std::string& buf;
    std::size_t pos = 0;

    void need(std::size_t n, const char* field) {
        if (pos + n > buf.size())
            throw std::runtime_error("parse error at offset " + std::to_string(pos) +
                                     ": truncated " + field);
    }

    std::uint32_t read_u32(const char* field) {
        need(4, field);
        std::uint32_t v = 0;
        for (int k = 0; k < 4; ++k)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + k])) << (8 * k);
        pos += 4;
        return v;
    }

    std::uint64_t read_u64(const char* field) {
        need(8, field);
        std::uint64_t v = 0;
        for (int k = 0; k < 8; ++k)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + k])) << (8 * k);
        pos += 8;
        return v;
    }

    double read_f64(const char* field) { return std::bit_cast<double>(read_u64(field)); }

    std::uint8_t read_u8(const char* field) {
        need(1, field);
        return static_cast<std::uint8_t>(buf[pos++]);
    }

    std::string read_bytes(std::size_t n, const char* field) {
        need(n, field);
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }
};

void write_file(const std::string& path, const std::string& bytes);
std::string read_file(const std::string& path);

} // namespace bcqq::bytesio
