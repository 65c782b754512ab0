#pragma once

#include <string>
#include <vector>

#include "faith/bytes.hpp"
#include "faith/sha256.hpp"

namespace faith::commitment {

enum class HashAlg : uint8_t {
    poseidon2 = 1,  // sponge over packed field elements
    sha256 = 2,     // conventional baseline
};

struct Digest {
    HashAlg alg = HashAlg::poseidon2;
    Digest32 bytes{};

    bool operator==(const Digest&) const = default;
};

// 33-byte wire form: algorithm id followed by the digest.
Bytes digest_serialize(const Digest& d);
Digest digest_deserialize(ByteView b);

// Frames are envelope body chunks: ciphertext plus tag, at most
// chunk_size + 16 bytes. Short frames are padded with 0x01-then-zeros; the
// true byte length rides along, so packing stays injective.
size_t frame_size_for(uint32_t chunk_size);

// Little-endian 7-byte groups of the padded frame, then the length element.
std::vector<uint64_t> pack_chunk(ByteView chunk, size_t frame_size);
// Number of elements pack_chunk yields; fixed by the frame alone.
size_t packed_element_count(size_t frame_size);

Digest hash_chunk(ByteView chunk, size_t frame_size, HashAlg alg);
Digest node_hash(const Digest& left, const Digest& right);

// levels[0] = leaves, each next level halves (duplicating a trailing odd
// node); back() is the root level with one entry
std::vector<std::vector<Digest>> merkle_levels(const std::vector<Digest>& leaves);
Digest merkle_root(const std::vector<Digest>& leaves);

struct FileCommitment {
    Digest root;
    uint64_t n_chunks = 0;
    uint32_t chunk_size = 0;

    uint32_t depth() const;  // ceil(log2(n_chunks))
    bool operator==(const FileCommitment&) const = default;
};

std::string sidecar_json(const FileCommitment& fc);
FileCommitment parse_sidecar(const std::string& text);

// Accumulates leaf digests frame-by-frame in one pass; an input with no
// frames commits to a single padded empty frame.
class CommitmentBuilder {
public:
    CommitmentBuilder(uint32_t chunk_size, HashAlg alg);

    void add_frame(ByteView frame);
    FileCommitment finish();

    const std::vector<Digest>& leaves() const { return leaves_; }

private:
    uint32_t chunk_size_;
    size_t frame_size_;
    HashAlg alg_;
    std::vector<Digest> leaves_;
};

Digest32 flat_hash_baseline(ByteView data);

}  // namespace faith::commitment
