#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "faith/commitment.hpp"
#include "faith/pairing_core.hpp"
#include "faith/pre.hpp"
#include "faith/sha256.hpp"

namespace faith::proofs {

// Wire tags for proof serialization.
inline constexpr uint8_t TAG_VRK = 0x20;
inline constexpr uint8_t TAG_PRK = 0x21;
inline constexpr uint8_t TAG_LEAF_PROOF = 0x10;
inline constexpr uint8_t TAG_NODE_PROOF = 0x11;
inline constexpr uint8_t TAG_ROOT_PROOF = 0x12;
inline constexpr uint8_t TAG_REENC_PROOF = 0x13;
inline constexpr uint8_t TAG_AGG_PROOF = 0x14;

inline constexpr size_t SAMPLE_COUNT = 96;

enum class CircuitId : uint8_t { integrity = 1, reenc = 2, aggregate = 3 };
const char* circuit_name(CircuitId id);  // "int" / "pre" / "agg"

struct SetupParams {
    uint32_t chunk_size = 64 * 1024;
    commitment::HashAlg alg = commitment::HashAlg::poseidon2;
};

Digest32 setup_params_digest(const SetupParams& params);

struct CircuitKeys {
    CircuitId id = CircuitId::integrity;
    SetupParams params;
    Digest32 params_digest{};
    Bytes prk;
    Bytes vrk;
};

// Transparent deterministic setup: keys derive from the circuit description
// and params alone, so equal params give byte-identical keys.
CircuitKeys setup(CircuitId id, const SetupParams& params);
CircuitKeys keys_from_vrk(ByteView vrk);  // verifier-side reconstruction

// ---- integrity proofs ----

struct SampleEntry {
    uint32_t elem_index = 0;
    uint64_t value = 0;
    bool operator==(const SampleEntry&) const = default;
};

struct LeafProof {
    Digest32 params_digest{};
    uint64_t index = 0;
    commitment::Digest digest;
    std::vector<SampleEntry> samples;
    Digest32 transcript{};
};

struct NodeProof {
    Digest32 params_digest{};
    uint32_t depth = 1;      // levels above the leaves
    uint64_t n_leaves = 2;   // leaf slots under this node (padded count)
    commitment::Digest parent, left, right;
    Digest32 left_transcript{}, right_transcript{};
    Digest32 transcript{};
};

LeafProof prove_chunk(const CircuitKeys& prk_int, ByteView chunk, uint64_t index);
bool verify_leaf(const CircuitKeys& vrk_int, const LeafProof& proof,
                 const commitment::Digest& expected);

NodeProof aggregate_pair(const CircuitKeys& prk_agg, const LeafProof& left,
                         const LeafProof& right);
NodeProof aggregate_pair(const CircuitKeys& prk_agg, const NodeProof& left,
                         const NodeProof& right);
bool verify_node(const CircuitKeys& vrk_agg, const NodeProof& proof,
                 const commitment::Digest& expected_parent);

struct AggregationStats {
    uint64_t pair_aggregations = 0;  // merges of distinct subtrees; always n-1
    uint64_t duplicate_merges = 0;   // odd-level self-merges
    uint32_t depth = 0;
};

// Single-leaf files aggregate to the leaf itself; larger files to a tree root.
struct RootProof {
    std::variant<LeafProof, NodeProof> p;

    const Digest32& params_digest() const;
    const commitment::Digest& digest() const;
    const Digest32& transcript() const;
    uint32_t depth() const;
};

RootProof aggregate_root(const CircuitKeys& prk_agg, const std::vector<LeafProof>& leaves,
                         AggregationStats* stats = nullptr);
bool verify_root(const CircuitKeys& vrk_agg, const RootProof& proof,
                 const commitment::Digest& expected_root);

Bytes leaf_proof_serialize(const LeafProof& p);
LeafProof leaf_proof_deserialize(ByteView b);
Bytes node_proof_serialize(const NodeProof& p);
NodeProof node_proof_deserialize(ByteView b);
Bytes root_proof_serialize(const RootProof& p);
RootProof root_proof_deserialize(ByteView b);

// ---- re-encryption correctness (sigma protocol, Fiat-Shamir) ----
//
// Statement: level-2 ciphertext c and its re-encryption c'. Witness: the
// re-encryption key rk with pairing(c.c1, rk) = c'.c1p and c'.c2p = c.c2.
//   commit   A = pairing(c1, h2^s), s random
//   challenge ch = H("FAITH-PRE-v1" || ser(c') || ser(c) || ser(A)) mod order
//   response z = h2^s * rk^ch
// Verifier accepts iff pairing(c1, z) == A * c1p^ch and c2p == c2.

template <class B>
struct ReEncProof {
    typename B::Gt A;
    typename B::G2src z;
};

template <class B>
Bytes reenc_statement_bytes(const typename B::Ctx& ctx, const pre::Level2Ciphertext<B>& c,
                            const pre::Level1Ciphertext<B>& cp) {
    Bytes x = pre::serialize_level1(ctx, cp);
    Bytes c_ser = pre::serialize_level2(ctx, c);
    x.insert(x.end(), c_ser.begin(), c_ser.end());
    return x;
}

template <class B>
typename B::Scalar reenc_challenge(const typename B::Ctx& ctx,
                                   const pre::Level2Ciphertext<B>& c,
                                   const pre::Level1Ciphertext<B>& cp,
                                   const typename B::Gt& A) {
    TaggedHash h("FAITH-PRE-v1");
    h.add(reenc_statement_bytes<B>(ctx, c, cp));
    h.add(B::gt_serialize(ctx, A));
    return B::scalar_from_digest(ctx, h.finish());
}

// Shared verifier equation, also used by the zero-knowledge simulator test.
template <class B>
bool check_transcript(const typename B::Ctx& ctx, const pre::Level2Ciphertext<B>& c,
                      const pre::Level1Ciphertext<B>& cp, const typename B::Gt& A,
                      const typename B::G2src& z, const typename B::Scalar& ch) {
    typename B::Gt lhs = B::pairing(ctx, c.c1, z);
    typename B::Gt rhs = B::gt_mul(ctx, A, B::gt_pow(ctx, cp.c1p, ch));
    return B::gt_serialize(ctx, lhs) == B::gt_serialize(ctx, rhs);
}

namespace detail {
// Deterministic-commitment variant backing the frozen toy transcript tests.
template <class B>
ReEncProof<B> prove_reenc_with_scalar(const typename B::Ctx& ctx,
                                      const pre::Level2Ciphertext<B>& c,
                                      const pre::Level1Ciphertext<B>& cp,
                                      const pre::ReKey<B>& rk, const typename B::Scalar& s) {
    if (B::gt_serialize(ctx, cp.c2p) != B::gt_serialize(ctx, c.c2)) {
        throw ProvingError("statement has c2' != c2");
    }
    typename B::Gt expect = B::pairing(ctx, c.c1, rk.rk);
    if (B::gt_serialize(ctx, expect) != B::gt_serialize(ctx, cp.c1p)) {
        throw ProvingError("witness does not satisfy the statement");
    }
    ReEncProof<B> proof{B::pairing(ctx, c.c1, B::g2_pow(ctx, ctx.h2, s)),
                        B::g2_pow(ctx, ctx.h2, s)};
    typename B::Scalar ch = reenc_challenge<B>(ctx, c, cp, proof.A);
    proof.z = B::g2_mul(ctx, proof.z, B::g2_pow(ctx, rk.rk, ch));
    return proof;
}
}  // namespace detail

template <class B>
ReEncProof<B> prove_reenc(const typename B::Ctx& ctx, const pre::Level2Ciphertext<B>& c,
                          const pre::Level1Ciphertext<B>& cp, const pre::ReKey<B>& rk,
                          RngSource& rng) {
    return detail::prove_reenc_with_scalar<B>(ctx, c, cp, rk,
                                              B::scalar_random_nonzero(ctx, rng));
}

template <class B>
bool verify_reenc(const typename B::Ctx& ctx, const pre::Level2Ciphertext<B>& c,
                  const pre::Level1Ciphertext<B>& cp, const ReEncProof<B>& proof) {
    if (B::gt_serialize(ctx, cp.c2p) != B::gt_serialize(ctx, c.c2)) return false;
    typename B::Scalar ch = reenc_challenge<B>(ctx, c, cp, proof.A);
    return check_transcript<B>(ctx, c, cp, proof.A, proof.z, ch);
}

using Backend = pairing_core::BlsBackend;
using BlsReEncProof = ReEncProof<Backend>;

Bytes reenc_proof_serialize(const Backend::Ctx& ctx, const BlsReEncProof& p);
BlsReEncProof reenc_proof_deserialize(const Backend::Ctx& ctx, ByteView b);

// ---- composite aggregated proof ----

// One file's slice of the public statement x_agg = h || ser(c') || ser(c).
struct FileStatement {
    commitment::Digest h;
    pre::Level1Ciphertext<Backend> c_prime;
    pre::Level2Ciphertext<Backend> c;
};

Bytes x_agg_bytes(const Backend::Ctx& ctx, const std::vector<FileStatement>& statements);
Digest32 binding_digest(const Backend::Ctx& ctx, const std::vector<FileStatement>& statements);

struct AggregatedProof {
    Digest32 params_digest{};
    std::vector<RootProof> roots;        // one per file
    std::vector<BlsReEncProof> reencs;   // one per file
    Digest32 binding{};
};

// Honest assembly: throws StatementMismatch unless every root digest equals
// its statement's h and every sigma proof verifies against its statement.
AggregatedProof aggregate_final(const Backend::Ctx& ctx, const CircuitKeys& prk_agg,
                                const std::vector<RootProof>& roots,
                                const std::vector<BlsReEncProof>& reencs,
                                const std::vector<FileStatement>& statements);

enum class VerifyFailure : uint8_t { none = 0, encoding, binding, integrity, reenc };
const char* failure_name(VerifyFailure f);

struct VerifyOutcome {
    bool ok = false;
    VerifyFailure reason = VerifyFailure::none;
    std::string detail;
};

// Checks, in order: binding digest over x_agg, each root integrity proof
// against h, each sigma proof against (c, c'). O(1) pairings per file.
VerifyOutcome verify_aggregated(const Backend::Ctx& ctx, const CircuitKeys& vrk_agg,
                                const std::vector<FileStatement>& statements,
                                const AggregatedProof& proof);

Bytes aggregated_proof_serialize(const Backend::Ctx& ctx, const AggregatedProof& p);
AggregatedProof aggregated_proof_deserialize(const Backend::Ctx& ctx, ByteView b);

}  // namespace faith::proofs
