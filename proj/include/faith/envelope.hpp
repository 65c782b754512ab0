#pragma once

#include <array>
#include <functional>

#include "faith/bytes.hpp"
#include "faith/errors.hpp"
#include "faith/rng.hpp"
#include "faith/sha256.hpp"

namespace faith::envelope {

inline constexpr size_t HEADER_BYTES = 40;
inline constexpr size_t TAG_BYTES = 16;
inline constexpr uint32_t MIN_CHUNK_SIZE = 4 * 1024;
inline constexpr uint32_t MAX_CHUNK_SIZE = 4 * 1024 * 1024;
inline constexpr uint32_t DEFAULT_CHUNK_SIZE = 64 * 1024;
inline constexpr uint16_t CIPHER_AES256_GCM = 1;

struct FileKey {
    std::array<uint8_t, 32> key{};
    bool operator==(const FileKey&) const = default;
};

// KDF from the PRE payload's canonical encoding to the cipher key.
FileKey kem_derive_raw(ByteView gt_encoding);

template <class B>
FileKey kem_derive(const typename B::Ctx& ctx, const typename B::Gt& m) {
    return kem_derive_raw(B::gt_serialize(ctx, m));
}

struct Header {
    uint16_t version = 1;
    uint16_t cipher_id = CIPHER_AES256_GCM;
    uint32_t chunk_size = DEFAULT_CHUNK_SIZE;
    uint64_t plaintext_len = 0;
    std::array<uint8_t, 16> nonce{};

    uint64_t chunk_count() const {
        return plaintext_len == 0 ? 0 : (plaintext_len + chunk_size - 1) / chunk_size;
    }
};

Bytes header_serialize(const Header& h);
Header header_deserialize(ByteView b);

// Pull up to out.size() bytes; short reads allowed, 0 means end of stream.
using ByteSource = std::function<size_t(std::span<uint8_t>)>;
using ByteSink = std::function<void(ByteView)>;
// Observes each body frame (ciphertext || tag) as it is produced/consumed.
using FrameObserver = std::function<void(uint64_t index, ByteView frame)>;

struct EnvelopeStats {
    uint64_t bytes_in = 0;
    uint64_t bytes_out = 0;
    size_t buffer_high_water = 0;  // peak working-buffer footprint
};

// Single forward pass, O(chunk_size) memory. The observer sees exactly the
// frames that land in the output, enabling encrypt-and-commit in one pass.
Header se_encrypt(const FileKey& key, uint32_t chunk_size, uint64_t plaintext_len,
                  const ByteSource& src, const ByteSink& sink, RngSource& rng,
                  EnvelopeStats* stats = nullptr, const FrameObserver& observer = {});

Header se_decrypt(const FileKey& key, const ByteSource& src, const ByteSink& sink,
                  EnvelopeStats* stats = nullptr, const FrameObserver& observer = {});

// Whole-buffer conveniences over the streaming core.
Bytes se_encrypt_bytes(const FileKey& key, uint32_t chunk_size, ByteView plaintext,
                       RngSource& rng, EnvelopeStats* stats = nullptr);
Bytes se_decrypt_bytes(const FileKey& key, ByteView envelope, EnvelopeStats* stats = nullptr);

}  // namespace faith::envelope
