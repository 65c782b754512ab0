#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "faith/errors.hpp"

namespace faith {

using Bytes = std::vector<uint8_t>;
using ByteView = std::span<const uint8_t>;

inline std::string to_hex(ByteView data) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (uint8_t b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0f]);
    }
    return out;
}

inline Bytes from_hex(const std::string& hex) {
    if (hex.size() % 2 != 0) throw InvalidEncoding("hex string has odd length");
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw InvalidEncoding("invalid hex digit");
    };
    Bytes out(hex.size() / 2);
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<uint8_t>(nibble(hex[2 * i]) << 4 | nibble(hex[2 * i + 1]));
    return out;
}

inline void append(Bytes& out, ByteView data) { out.insert(out.end(), data.begin(), data.end()); }

inline void append_u8(Bytes& out, uint8_t v) { out.push_back(v); }

inline void append_u16le(Bytes& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v));
    out.push_back(static_cast<uint8_t>(v >> 8));
}

inline void append_u32le(Bytes& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

inline void append_u64le(Bytes& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

inline uint32_t read_u32le(ByteView data, size_t off) {
    uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = v << 8 | data[off + static_cast<size_t>(i)];
    return v;
}

inline uint64_t read_u64le(ByteView data, size_t off) {
    uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = v << 8 | data[off + static_cast<size_t>(i)];
    return v;
}

// Tagged binary layout shared by every serialized domain object: a 1-byte
// type tag followed by length-prefixed fields (u32 little-endian lengths).
class TaggedWriter {
public:
    explicit TaggedWriter(uint8_t tag) { buf_.push_back(tag); }

    void field(ByteView data) {
        append_u32le(buf_, static_cast<uint32_t>(data.size()));
        append(buf_, data);
    }
    void field_u64(uint64_t v) {
        Bytes tmp;
        append_u64le(tmp, v);
        field(tmp);
    }
    Bytes take() { return std::move(buf_); }

private:
    Bytes buf_;
};

class TaggedReader {
public:
    TaggedReader(ByteView data, uint8_t expected_tag) : data_(data) {
        if (data_.empty() || data_[0] != expected_tag)
            throw InvalidEncoding("tagged blob: wrong or missing type tag");
        off_ = 1;
    }

    Bytes field() {
        if (off_ + 4 > data_.size()) throw InvalidEncoding("tagged blob: truncated length");
        uint32_t len = read_u32le(data_, off_);
        off_ += 4;
        if (off_ + len > data_.size()) throw InvalidEncoding("tagged blob: truncated field");
        Bytes out(data_.begin() + static_cast<long>(off_), data_.begin() + static_cast<long>(off_ + len));
        off_ += len;
        return out;
    }
    uint64_t field_u64() {
        Bytes f = field();
        if (f.size() != 8) throw InvalidEncoding("tagged blob: bad u64 field");
        return read_u64le(f, 0);
    }
    bool done() const { return off_ == data_.size(); }
    void expect_done() const {
        if (!done()) throw InvalidEncoding("tagged blob: trailing bytes");
    }

private:
    ByteView data_;
    size_t off_ = 0;
};

}  // namespace faith
