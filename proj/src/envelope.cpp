#include "faith/envelope.hpp"

#include <openssl/evp.h>

#include <bit>
#include <cstring>
#include <memory>

namespace faith::envelope {

namespace {

constexpr std::array<uint8_t, 8> MAGIC = {'F', 'A', 'I', 'T', 'H', '1', 0, 0};
constexpr size_t IV_BYTES = 12;

struct EvpCtxDeleter {
    void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};
using EvpCtx = std::unique_ptr<EVP_CIPHER_CTX, EvpCtxDeleter>;

EvpCtx make_cipher_ctx() {
    EvpCtx ctx(EVP_CIPHER_CTX_new());
    if (!ctx) throw Error("EVP_CIPHER_CTX_new failed");
    return ctx;
}

void validate_chunk_size(uint32_t chunk_size) {
    if (chunk_size < MIN_CHUNK_SIZE || chunk_size > MAX_CHUNK_SIZE ||
        !std::has_single_bit(chunk_size)) {
        throw ConfigError("chunk_size must be a power of two in [4KiB, 4MiB]");
    }
}

std::array<uint8_t, IV_BYTES> chunk_iv(const Header& h, uint64_t index) {
    std::array<uint8_t, IV_BYTES> iv{};
    std::memcpy(iv.data(), h.nonce.data(), 4);
    for (int i = 0; i < 8; ++i) iv[4 + i] = uint8_t(index >> (8 * i));
    return iv;
}

Bytes chunk_aad(const Bytes& header_bytes, uint64_t index) {
    Bytes aad = header_bytes;
    append_u64le(aad, index);
    return aad;
}

// Fill out completely; returns false only on clean end-of-stream at offset 0.
size_t read_exact(const ByteSource& src, std::span<uint8_t> out, uint64_t stream_offset) {
    size_t got = 0;
    while (got < out.size()) {
        size_t n = src(out.subspan(got));
        if (n == 0) return got;
        if (n > out.size() - got) throw IoError("source overran request", stream_offset + got);
        got += n;
    }
    (void)stream_offset;
    return got;
}

}  // namespace

FileKey kem_derive_raw(ByteView gt_encoding) {
    TaggedHash h("FAITH-KEM-v1");
    h.add(gt_encoding);
    FileKey out;
    out.key = h.finish();
    return out;
}

Bytes header_serialize(const Header& h) {
    Bytes out;
    out.reserve(HEADER_BYTES);
    out.insert(out.end(), MAGIC.begin(), MAGIC.end());
    append_u16le(out, h.version);
    append_u16le(out, h.cipher_id);
    append_u32le(out, h.chunk_size);
    append_u64le(out, h.plaintext_len);
    out.insert(out.end(), h.nonce.begin(), h.nonce.end());
    return out;
}

Header header_deserialize(ByteView b) {
    if (b.size() != HEADER_BYTES) throw InvalidEncoding("envelope header must be 40 bytes");
    if (std::memcmp(b.data(), MAGIC.data(), MAGIC.size()) != 0) {
        throw InvalidEncoding("bad envelope magic");
    }
    Header h;
    size_t off = MAGIC.size();
    h.version = uint16_t(b[off] | (uint16_t(b[off + 1]) << 8));
    off += 2;
    h.cipher_id = uint16_t(b[off] | (uint16_t(b[off + 1]) << 8));
    off += 2;
    h.chunk_size = read_u32le(b, off);
    off += 4;
    h.plaintext_len = read_u64le(b, off);
    off += 8;
    std::memcpy(h.nonce.data(), b.data() + off, h.nonce.size());
    if (h.version != 1) throw InvalidEncoding("unsupported envelope version");
    if (h.cipher_id != CIPHER_AES256_GCM) throw InvalidEncoding("unsupported cipher id");
    try {
        validate_chunk_size(h.chunk_size);
    } catch (const ConfigError& e) {
        throw InvalidEncoding(e.what());
    }
    return h;
}

Header se_encrypt(const FileKey& key, uint32_t chunk_size, uint64_t plaintext_len,
                  const ByteSource& src, const ByteSink& sink, RngSource& rng,
                  EnvelopeStats* stats, const FrameObserver& observer) {
    validate_chunk_size(chunk_size);

    Header h;
    h.chunk_size = chunk_size;
    h.plaintext_len = plaintext_len;
    rng.fill(h.nonce);
    Bytes header_bytes = header_serialize(h);
    sink(header_bytes);

    EnvelopeStats st;
    st.bytes_out = header_bytes.size();

    Bytes pt(chunk_size);
    Bytes frame(size_t(chunk_size) + TAG_BYTES);
    st.buffer_high_water = pt.size() + frame.size() + header_bytes.size();

    EvpCtx ctx = make_cipher_ctx();
    uint64_t chunks = h.chunk_count();
    uint64_t remaining = plaintext_len;
    for (uint64_t index = 0; index < chunks; ++index) {
        size_t want = size_t(std::min<uint64_t>(remaining, chunk_size));
        size_t got = read_exact(src, std::span<uint8_t>(pt.data(), want), st.bytes_in);
        if (got != want) throw IoError("plaintext ended before declared length", st.bytes_in + got);
        st.bytes_in += want;

        auto iv = chunk_iv(h, index);
        Bytes aad = chunk_aad(header_bytes, index);
        if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) != 1 ||
            EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, IV_BYTES, nullptr) != 1 ||
            EVP_EncryptInit_ex(ctx.get(), nullptr, nullptr, key.key.data(), iv.data()) != 1) {
            throw Error("AES-GCM init failed");
        }
        int outl = 0;
        if (EVP_EncryptUpdate(ctx.get(), nullptr, &outl, aad.data(), int(aad.size())) != 1) {
            throw Error("AES-GCM aad failed");
        }
        if (EVP_EncryptUpdate(ctx.get(), frame.data(), &outl, pt.data(), int(want)) != 1 ||
            size_t(outl) != want) {
            throw Error("AES-GCM encrypt failed");
        }
        int finl = 0;
        if (EVP_EncryptFinal_ex(ctx.get(), frame.data() + outl, &finl) != 1 || finl != 0) {
            throw Error("AES-GCM finalize failed");
        }
        if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, TAG_BYTES,
                                frame.data() + want) != 1) {
            throw Error("AES-GCM tag extraction failed");
        }
        ByteView view(frame.data(), want + TAG_BYTES);
        sink(view);
        if (observer) observer(index, view);
        st.bytes_out += view.size();
        remaining -= want;
    }
    // A stream longer than declared is an inconsistency worth surfacing.
    uint8_t probe = 0;
    if (src(std::span<uint8_t>(&probe, 1)) != 0) {
        throw IoError("plaintext continues past declared length", st.bytes_in);
    }
    if (stats) *stats = st;
    return h;
}

Header se_decrypt(const FileKey& key, const ByteSource& src, const ByteSink& sink,
                  EnvelopeStats* stats, const FrameObserver& observer) {
    EnvelopeStats st;
    Bytes header_bytes(HEADER_BYTES);
    if (read_exact(src, header_bytes, 0) != HEADER_BYTES) {
        throw TruncationError("envelope shorter than header");
    }
    Header h = header_deserialize(header_bytes);
    st.bytes_in = HEADER_BYTES;

    Bytes frame(size_t(h.chunk_size) + TAG_BYTES);
    Bytes pt(h.chunk_size);
    st.buffer_high_water = pt.size() + frame.size() + header_bytes.size();

    EvpCtx ctx = make_cipher_ctx();
    uint64_t chunks = h.chunk_count();
    uint64_t remaining = h.plaintext_len;
    for (uint64_t index = 0; index < chunks; ++index) {
        size_t ptlen = size_t(std::min<uint64_t>(remaining, h.chunk_size));
        size_t framelen = ptlen + TAG_BYTES;
        size_t got = read_exact(src, std::span<uint8_t>(frame.data(), framelen), st.bytes_in);
        if (got != framelen) throw TruncationError("envelope body ends mid-frame");
        st.bytes_in += framelen;
        if (observer) observer(index, ByteView(frame.data(), framelen));

        auto iv = chunk_iv(h, index);
        Bytes aad = chunk_aad(header_bytes, index);
        if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_256_gcm(), nullptr, nullptr, nullptr) != 1 ||
            EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_IVLEN, IV_BYTES, nullptr) != 1 ||
            EVP_DecryptInit_ex(ctx.get(), nullptr, nullptr, key.key.data(), iv.data()) != 1) {
            throw Error("AES-GCM init failed");
        }
        int outl = 0;
        if (EVP_DecryptUpdate(ctx.get(), nullptr, &outl, aad.data(), int(aad.size())) != 1) {
            throw Error("AES-GCM aad failed");
        }
        if (EVP_DecryptUpdate(ctx.get(), pt.data(), &outl, frame.data(), int(ptlen)) != 1 ||
            size_t(outl) != ptlen) {
            throw AuthFailure(index);
        }
        if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, TAG_BYTES,
                                frame.data() + ptlen) != 1) {
            throw Error("AES-GCM tag load failed");
        }
        int finl = 0;
        if (EVP_DecryptFinal_ex(ctx.get(), pt.data() + outl, &finl) != 1) {
            throw AuthFailure(index);
        }
        sink(ByteView(pt.data(), ptlen));
        st.bytes_out += ptlen;
        remaining -= ptlen;
    }
    uint8_t probe = 0;
    if (src(std::span<uint8_t>(&probe, 1)) != 0) {
        throw InvalidEncoding("trailing bytes after envelope body");
    }
    if (stats) *stats = st;
    return h;
}

namespace {

ByteSource memory_source(ByteView data, size_t& cursor) {
    return [data, &cursor](std::span<uint8_t> out) {
        size_t n = std::min(out.size(), data.size() - cursor);
        std::memcpy(out.data(), data.data() + cursor, n);
        cursor += n;
        return n;
    };
}

}  // namespace

Bytes se_encrypt_bytes(const FileKey& key, uint32_t chunk_size, ByteView plaintext,
                       RngSource& rng, EnvelopeStats* stats) {
    Bytes out;
    size_t cursor = 0;
    se_encrypt(
        key, chunk_size, plaintext.size(), memory_source(plaintext, cursor),
        [&out](ByteView b) { out.insert(out.end(), b.begin(), b.end()); }, rng, stats);
    return out;
}

Bytes se_decrypt_bytes(const FileKey& key, ByteView envelope, EnvelopeStats* stats) {
    Bytes out;
    size_t cursor = 0;
    se_decrypt(
        key, memory_source(envelope, cursor),
        [&out](ByteView b) { out.insert(out.end(), b.begin(), b.end()); }, stats);
    return out;
}

}  // namespace faith::envelope
