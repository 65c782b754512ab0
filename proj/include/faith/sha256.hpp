#pragma once

#include <array>

#include "faith/bytes.hpp"

namespace faith {

using Digest32 = std::array<uint8_t, 32>;

Digest32 sha256(ByteView data);

// Streaming SHA-256 (OpenSSL EVP under the hood).
class Sha256Stream {
public:
    Sha256Stream();
    ~Sha256Stream();
    Sha256Stream(const Sha256Stream&) = delete;
    Sha256Stream& operator=(const Sha256Stream&) = delete;

    void update(ByteView data);
    Digest32 finish();

private:
    void* ctx_;
};

// Domain-separated digest: sha256(tag_string || parts...), used for every
// Fiat-Shamir challenge and transcript binding in the project.
class TaggedHash {
public:
    explicit TaggedHash(const char* tag);
    TaggedHash& add(ByteView data);
    TaggedHash& add_u64(uint64_t v);
    Digest32 finish();

private:
    Sha256Stream stream_;
};

inline Bytes digest_bytes(const Digest32& d) { return Bytes(d.begin(), d.end()); }

}  // namespace faith
