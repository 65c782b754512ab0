#include "faith/sha256.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <stdexcept>

namespace faith {

Sha256Stream::Sha256Stream() {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("EVP sha256 init failed");
    ctx_ = ctx;
}

Sha256Stream::~Sha256Stream() { EVP_MD_CTX_free(static_cast<EVP_MD_CTX*>(ctx_)); }

void Sha256Stream::update(ByteView data) {
    if (EVP_DigestUpdate(static_cast<EVP_MD_CTX*>(ctx_), data.data(), data.size()) != 1)
        throw std::runtime_error("EVP sha256 update failed");
}

Digest32 Sha256Stream::finish() {
    Digest32 out{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(static_cast<EVP_MD_CTX*>(ctx_), out.data(), &len) != 1 || len != 32)
        throw std::runtime_error("EVP sha256 final failed");
    return out;
}

Digest32 sha256(ByteView data) {
    Sha256Stream s;
    s.update(data);
    return s.finish();
}

TaggedHash::TaggedHash(const char* tag) {
    stream_.update(ByteView(reinterpret_cast<const uint8_t*>(tag), std::strlen(tag)));
}

TaggedHash& TaggedHash::add(ByteView data) {
    // length-prefixed so adjacent fields cannot slide into each other
    Bytes len;
    append_u64le(len, data.size());
    stream_.update(len);
    stream_.update(data);
    return *this;
}

TaggedHash& TaggedHash::add_u64(uint64_t v) {
    Bytes tmp;
    append_u64le(tmp, v);
    return add(tmp);
}

Digest32 TaggedHash::finish() { return stream_.finish(); }

}  // namespace faith
