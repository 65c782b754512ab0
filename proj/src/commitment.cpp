#include "faith/commitment.hpp"

#include <bit>

#include "faith/errors.hpp"
#include "faith/goldilocks.hpp"
#include "faith/poseidon2.hpp"
#include "json.hpp"

namespace faith::commitment {

namespace {

constexpr size_t BYTES_PER_ELEMENT = 7;  // floor((64 - 1) / 8)

uint64_t element_from_le(ByteView data) {
    uint64_t v = 0;
    for (size_t i = data.size(); i-- > 0;) v = v << 8 | data[i];
    return v;
}

std::array<uint64_t, 4> digest_elements(const Digest& d) {
    std::array<uint64_t, 4> e{};
    for (size_t i = 0; i < 4; ++i) e[i] = read_u64le(d.bytes, 8 * i);
    return e;
}

Digest digest_from_elements(HashAlg alg, const std::array<uint64_t, 4>& e) {
    Digest d;
    d.alg = alg;
    Bytes tmp;
    for (uint64_t v : e) append_u64le(tmp, v);
    std::copy(tmp.begin(), tmp.end(), d.bytes.begin());
    return d;
}

Bytes padded_frame(ByteView chunk, size_t frame_size) {
    Bytes padded(chunk.begin(), chunk.end());
    if (padded.size() < frame_size) {
        padded.push_back(0x01);
        padded.resize(frame_size, 0x00);
    }
    return padded;
}

}  // namespace

Bytes digest_serialize(const Digest& d) {
    Bytes out;
    out.reserve(33);
    out.push_back(static_cast<uint8_t>(d.alg));
    out.insert(out.end(), d.bytes.begin(), d.bytes.end());
    return out;
}

Digest digest_deserialize(ByteView b) {
    if (b.size() != 33) throw InvalidEncoding("digest must be 33 bytes");
    if (b[0] != static_cast<uint8_t>(HashAlg::poseidon2) &&
        b[0] != static_cast<uint8_t>(HashAlg::sha256))
        throw InvalidEncoding("unknown hash algorithm id");
    Digest d;
    d.alg = static_cast<HashAlg>(b[0]);
    std::copy(b.begin() + 1, b.end(), d.bytes.begin());
    return d;
}

size_t frame_size_for(uint32_t chunk_size) { return size_t(chunk_size) + 16; }

std::vector<uint64_t> pack_chunk(ByteView chunk, size_t frame_size) {
    if (chunk.size() > frame_size) throw ConfigError("chunk exceeds frame size");
    Bytes padded = padded_frame(chunk, frame_size);
    std::vector<uint64_t> elems;
    elems.reserve(frame_size / BYTES_PER_ELEMENT + 2);
    for (size_t off = 0; off < padded.size(); off += BYTES_PER_ELEMENT) {
        size_t len = std::min(BYTES_PER_ELEMENT, padded.size() - off);
        elems.push_back(element_from_le(ByteView(padded).subspan(off, len)));
    }
    elems.push_back(chunk.size());
    return elems;
}

size_t packed_element_count(size_t frame_size) {
    return (frame_size + BYTES_PER_ELEMENT - 1) / BYTES_PER_ELEMENT + 1;
}

Digest hash_chunk(ByteView chunk, size_t frame_size, HashAlg alg) {
    if (alg == HashAlg::sha256) {
        Bytes padded = padded_frame(chunk, frame_size);
        Sha256Stream h;
        uint8_t tag = 0x00;
        h.update(ByteView(&tag, 1));
        h.update(padded);
        Bytes len;
        append_u64le(len, chunk.size());
        h.update(len);
        return Digest{alg, h.finish()};
    }
    poseidon2::Sponge sponge(poseidon2::DOMAIN_LEAF);
    sponge.absorb(pack_chunk(chunk, frame_size));
    return digest_from_elements(alg, sponge.finish());
}

Digest node_hash(const Digest& left, const Digest& right) {
    if (left.alg != right.alg) throw ConfigError("node hash over mixed algorithms");
    if (left.alg == HashAlg::sha256) {
        Sha256Stream h;
        uint8_t tag = 0x01;
        h.update(ByteView(&tag, 1));
        h.update(left.bytes);
        h.update(right.bytes);
        return Digest{left.alg, h.finish()};
    }
    poseidon2::Sponge sponge(poseidon2::DOMAIN_NODE);
    sponge.absorb(digest_elements(left));
    sponge.absorb(digest_elements(right));
    return digest_from_elements(left.alg, sponge.finish());
}

std::vector<std::vector<Digest>> merkle_levels(const std::vector<Digest>& leaves) {
    if (leaves.empty()) throw ConfigError("merkle tree needs at least one leaf");
    std::vector<std::vector<Digest>> levels{leaves};
    while (levels.back().size() > 1) {
        const auto& cur = levels.back();
        std::vector<Digest> next;
        next.reserve((cur.size() + 1) / 2);
        for (size_t i = 0; i < cur.size(); i += 2) {
            const Digest& l = cur[i];
            const Digest& r = i + 1 < cur.size() ? cur[i + 1] : cur[i];
            next.push_back(node_hash(l, r));
        }
        levels.push_back(std::move(next));
    }
    return levels;
}

Digest merkle_root(const std::vector<Digest>& leaves) { return merkle_levels(leaves).back()[0]; }

uint32_t FileCommitment::depth() const {
    if (n_chunks <= 1) return 0;
    return static_cast<uint32_t>(std::bit_width(n_chunks - 1));
}

std::string sidecar_json(const FileCommitment& fc) {
    nlohmann::json j;
    j["alg"] = static_cast<int>(fc.root.alg);
    j["chunk_size"] = fc.chunk_size;
    j["n_chunks"] = fc.n_chunks;
    j["root"] = to_hex(fc.root.bytes);
    return j.dump();
}

FileCommitment parse_sidecar(const std::string& text) {
    try {
        nlohmann::json j = nlohmann::json::parse(text);
        FileCommitment fc;
        int alg = j.at("alg").get<int>();
        if (alg != 1 && alg != 2) throw InvalidEncoding("unknown hash algorithm id");
        fc.root.alg = static_cast<HashAlg>(alg);
        fc.chunk_size = j.at("chunk_size").get<uint32_t>();
        fc.n_chunks = j.at("n_chunks").get<uint64_t>();
        Bytes root = from_hex(j.at("root").get<std::string>());
        if (root.size() != 32) throw InvalidEncoding("root must be 32 bytes");
        std::copy(root.begin(), root.end(), fc.root.bytes.begin());
        return fc;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidEncoding(std::string("bad sidecar: ") + e.what());
    }
}

CommitmentBuilder::CommitmentBuilder(uint32_t chunk_size, HashAlg alg)
    : chunk_size_(chunk_size), frame_size_(frame_size_for(chunk_size)), alg_(alg) {}

void CommitmentBuilder::add_frame(ByteView frame) {
    leaves_.push_back(hash_chunk(frame, frame_size_, alg_));
}

FileCommitment CommitmentBuilder::finish() {
    if (leaves_.empty()) add_frame({});
    FileCommitment fc;
    fc.root = merkle_root(leaves_);
    fc.n_chunks = leaves_.size();
    fc.chunk_size = chunk_size_;
    return fc;
}

Digest32 flat_hash_baseline(ByteView data) { return sha256(data); }

}  // namespace faith::commitment
