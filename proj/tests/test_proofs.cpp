#include "doctest.h"

#include "faith/proofs.hpp"
#include "faith/rng.hpp"

using namespace faith;
using namespace faith::proofs;
using Bls = pairing_core::BlsBackend;
using Toy = pairing_core::ToyBackend;

namespace {

struct Fixture {
    SetupParams params;
    CircuitKeys prk_int;
    CircuitKeys prk_agg;

    Fixture() {
        params.chunk_size = 4096;
        prk_int = setup(CircuitId::integrity, params);
        prk_agg = setup(CircuitId::aggregate, params);
    }
};

Fixture& fx() {
    static Fixture f;
    return f;
}

}  // namespace

TEST_CASE("setup is deterministic and parameter-sensitive") {
    auto& f = fx();
    auto again = setup(CircuitId::integrity, f.params);
    CHECK(f.prk_int.vrk == again.vrk);
    CHECK(f.prk_int.vrk.size() <= 10 * 1024);

    SetupParams other = f.params;
    other.chunk_size = 8192;
    CHECK(setup(CircuitId::integrity, other).vrk != f.prk_int.vrk);
    CHECK(setup(CircuitId::aggregate, f.params).vrk != f.prk_int.vrk);

    auto verifier = keys_from_vrk(f.prk_int.vrk);
    CHECK(verifier.prk.empty());
    CHECK(verifier.params_digest == f.prk_int.params_digest);
}

TEST_CASE("leaf proofs verify, bind to their digest, and round trip") {
    auto& f = fx();
    auto verifier = keys_from_vrk(f.prk_int.vrk);

    Bytes chunk(1000, 0x5A);
    auto leaf = prove_chunk(f.prk_int, chunk, 3);
    CHECK(verify_leaf(verifier, leaf, leaf.digest));

    Bytes chunk2(1000, 0x5B);
    auto leaf2 = prove_chunk(f.prk_int, chunk2, 4);
    CHECK_FALSE(verify_leaf(verifier, leaf, leaf2.digest));

    auto ser = leaf_proof_serialize(leaf);
    CHECK(ser.size() >= 1024);
    CHECK(ser.size() <= 512 * 1024);
    auto back = leaf_proof_deserialize(ser);
    CHECK(verify_leaf(verifier, back, leaf.digest));

    Bytes cut(ser.begin(), ser.end() - 1);
    CHECK_THROWS_AS(leaf_proof_deserialize(cut), InvalidEncoding);
}

TEST_CASE("aggregation merges pairwise to the merkle root") {
    auto& f = fx();
    std::vector<LeafProof> leaves;
    std::vector<commitment::Digest> digests;
    for (uint64_t i = 0; i < 8; ++i) {
        Bytes c(100 + i, uint8_t(i));
        leaves.push_back(prove_chunk(f.prk_int, c, i));
        digests.push_back(leaves.back().digest);
    }

    AggregationStats st;
    auto root = aggregate_root(f.prk_agg, leaves, &st);
    CHECK(st.pair_aggregations == 7);
    CHECK(st.duplicate_merges == 0);
    CHECK(st.depth == 3);
    CHECK(verify_root(f.prk_agg, root, commitment::merkle_root(digests)));

    // odd levels duplicate the trailing node
    std::vector<LeafProof> five(leaves.begin(), leaves.begin() + 5);
    std::vector<commitment::Digest> five_d(digests.begin(), digests.begin() + 5);
    auto root5 = aggregate_root(f.prk_agg, five, &st);
    CHECK(st.pair_aggregations == 4);
    CHECK(st.duplicate_merges == 2);
    CHECK(st.depth == 3);
    CHECK(verify_root(f.prk_agg, root5, commitment::merkle_root(five_d)));

    // one leaf is already the root
    std::vector<LeafProof> one = {leaves[0]};
    auto root1 = aggregate_root(f.prk_agg, one, &st);
    CHECK(st.pair_aggregations == 0);
    CHECK(st.depth == 0);
    CHECK(verify_root(f.prk_agg, root1, digests[0]));
    CHECK_FALSE(verify_root(f.prk_agg, root1, digests[1]));

    // a tampered child aborts aggregation instead of producing a bad parent
    auto bad = leaves[1];
    bad.digest.bytes[0] ^= 1;
    CHECK_THROWS_AS(aggregate_pair(f.prk_agg, leaves[0], bad), ProvingError);

    auto rser = root_proof_serialize(root);
    auto rback = root_proof_deserialize(rser);
    CHECK(verify_root(f.prk_agg, rback, commitment::merkle_root(digests)));
}

TEST_CASE("toy transform proof with fixed exponents") {
    auto ctx = pairing_core::toy_oracle_ctx(101);
    Toy::Scalar o1{3, 101}, u2{11, 101}, r{13, 101};
    pre::Level2Ciphertext<Toy> c;
    c.c1 = Toy::g1_pow(ctx, ctx.g1, r);  // g1^13
    c.c2 = Toy::gt_pow(ctx, ctx.gT, Toy::scalar_from_u64(ctx, 55));
    pre::ReKey<Toy> rk{Toy::g2_pow(ctx, ctx.h2, Toy::scalar_mul(ctx, o1, u2))};  // h2^33
    pre::Level1Ciphertext<Toy> cp;
    cp.c1p = Toy::pairing(ctx, c.c1, rk.rk);
    cp.c2p = c.c2;
    CHECK(cp.c1p.v == 25);  // 13 * 33 mod 101

    Toy::Scalar s{7, 101};
    auto proof = detail::prove_reenc_with_scalar<Toy>(ctx, c, cp, rk, s);
    CHECK(proof.A.v == 91);  // e(g1^13, h2^7) = gT^91
    auto ch = reenc_challenge<Toy>(ctx, c, cp, proof.A);
    CHECK(proof.z.v == (7 + 33 * uint64_t(ch.v)) % 101);
    CHECK(verify_reenc<Toy>(ctx, c, cp, proof));

    // shifted transform output
    auto cp_bad = cp;
    cp_bad.c1p = Toy::gt_mul(ctx, cp.c1p, ctx.gT);
    CHECK_FALSE(verify_reenc<Toy>(ctx, c, cp_bad, proof));
    // payload half must carry over untouched
    auto cp_bad2 = cp;
    cp_bad2.c2p = Toy::gt_mul(ctx, cp.c2p, ctx.gT);
    CHECK_FALSE(verify_reenc<Toy>(ctx, c, cp_bad2, proof));
}

TEST_CASE("toy simulator transcripts satisfy the verifier equation") {
    // zero knowledge gesture: transcripts sampled without the witness verify
    auto ctx = pairing_core::toy_oracle_ctx(101);
    Toy::Scalar r{13, 101};
    pre::Level2Ciphertext<Toy> c;
    c.c1 = Toy::g1_pow(ctx, ctx.g1, r);
    c.c2 = Toy::gt_pow(ctx, ctx.gT, Toy::scalar_from_u64(ctx, 55));
    pre::Level1Ciphertext<Toy> cp;
    cp.c1p = Toy::gt_pow(ctx, ctx.gT, Toy::scalar_from_u64(ctx, 25));
    cp.c2p = c.c2;

    TestRng rng(42);
    for (int i = 0; i < 20; ++i) {
        auto z = Toy::g2_pow(ctx, ctx.h2, Toy::scalar_random(ctx, rng));
        auto sim_ch = Toy::scalar_random(ctx, rng);
        auto A = Toy::gt_mul(ctx, Toy::pairing(ctx, c.c1, z),
                             Toy::gt_inverse(ctx, Toy::gt_pow(ctx, cp.c1p, sim_ch)));
        CHECK(check_transcript<Toy>(ctx, c, cp, A, z, sim_ch));
    }
}

TEST_CASE("aggregated proof composes, verifies, and pins each failure") {
    auto& f = fx();
    const auto& ctx = Bls::ctx();
    TestRng rng(7);

    std::vector<LeafProof> leaves;
    for (uint64_t i = 0; i < 8; ++i) {
        Bytes c(100 + i, uint8_t(i));
        leaves.push_back(prove_chunk(f.prk_int, c, i));
    }
    auto root = aggregate_root(f.prk_agg, leaves, nullptr);

    auto owner = pre::keygen<Bls>(ctx, rng);
    auto user = pre::keygen<Bls>(ctx, rng);
    auto m = Bls::gt_pow(ctx, ctx.gT, Bls::scalar_random_nonzero(ctx, rng));
    auto c = pre::enc<Bls>(ctx, owner.pk, m, rng);
    auto rk = pre::rekeygen<Bls>(ctx, owner, user.pk);
    auto cp = pre::reenc<Bls>(ctx, rk, c);

    auto sigma = prove_reenc<Bls>(ctx, c, cp, rk, rng);
    CHECK(verify_reenc<Bls>(ctx, c, cp, sigma));

    FileStatement stt{root.digest(), cp, c};
    auto agg = aggregate_final(ctx, f.prk_agg, {root}, {sigma}, {stt});
    CHECK(verify_aggregated(ctx, f.prk_agg, {stt}, agg).ok);

    SUBCASE("assembly refuses a statement that contradicts the root") {
        FileStatement bad_st = stt;
        bad_st.h.bytes[5] ^= 1;
        CHECK_THROWS_AS(aggregate_final(ctx, f.prk_agg, {root}, {sigma}, {bad_st}),
                        StatementMismatch);
    }

    SUBCASE("binding over a different statement is flagged first") {
        FileStatement bad_st = stt;
        bad_st.h.bytes[5] ^= 1;
        AggregatedProof forged = agg;
        forged.binding = binding_digest(ctx, {bad_st});
        auto out = verify_aggregated(ctx, f.prk_agg, {stt}, forged);
        CHECK_FALSE(out.ok);
        CHECK(out.reason == VerifyFailure::binding);
    }

    SUBCASE("a corrupted transform with honest binding fails the sigma check") {
        FileStatement served = stt;
        served.c_prime.c1p = Bls::gt_mul(ctx, served.c_prime.c1p, ctx.gT);
        AggregatedProof reassembled = agg;
        reassembled.binding = binding_digest(ctx, {served});
        auto out = verify_aggregated(ctx, f.prk_agg, {served}, reassembled);
        CHECK_FALSE(out.ok);
        CHECK(out.reason == VerifyFailure::reenc);
    }

    SUBCASE("a proof for a different file fails the integrity check") {
        Bytes other_chunk(50, 0xEE);
        auto other_leaf = prove_chunk(f.prk_int, other_chunk, 0);
        auto other_root = aggregate_root(f.prk_agg, {other_leaf}, nullptr);
        AggregatedProof swapped = agg;
        swapped.roots[0] = other_root;
        swapped.binding = binding_digest(ctx, {stt});
        auto out = verify_aggregated(ctx, f.prk_agg, {stt}, swapped);
        CHECK_FALSE(out.ok);
        CHECK(out.reason == VerifyFailure::integrity);
    }

    SUBCASE("serialization round trips and damage is an encoding error") {
        auto aser = aggregated_proof_serialize(ctx, agg);
        auto aback = aggregated_proof_deserialize(ctx, aser);
        CHECK(verify_aggregated(ctx, f.prk_agg, {stt}, aback).ok);
        Bytes cut(aser.begin(), aser.end() - 1);
        CHECK_THROWS_AS(aggregated_proof_deserialize(ctx, cut), InvalidEncoding);
    }

    SUBCASE("verification cost is one pairing per file, whatever the file holds") {
        std::vector<LeafProof> one = {leaves[0]};
        std::vector<LeafProof> five(leaves.begin(), leaves.begin() + 5);
        std::vector<RootProof> roots3 = {root, aggregate_root(f.prk_agg, five, nullptr),
                                         aggregate_root(f.prk_agg, one, nullptr)};
        std::vector<FileStatement> st3;
        std::vector<BlsReEncProof> sig3;
        for (const auto& rp : roots3) {
            auto mm = Bls::gt_pow(ctx, ctx.gT, Bls::scalar_random_nonzero(ctx, rng));
            auto cc = pre::enc<Bls>(ctx, owner.pk, mm, rng);
            auto ccp = pre::reenc<Bls>(ctx, rk, cc);
            sig3.push_back(prove_reenc<Bls>(ctx, cc, ccp, rk, rng));
            st3.push_back({rp.digest(), ccp, cc});
        }
        auto agg3 = aggregate_final(ctx, f.prk_agg, roots3, sig3, st3);
        CHECK(verify_aggregated(ctx, f.prk_agg, st3, agg3).ok);

        auto& counters = Bls::counters();
        counters.reset();
        CHECK(verify_aggregated(ctx, f.prk_agg, {stt}, agg).ok);
        CHECK(counters.pairings.load() == 1);
        counters.reset();
        CHECK(verify_aggregated(ctx, f.prk_agg, st3, agg3).ok);
        CHECK(counters.pairings.load() == 3);
    }
}

TEST_CASE("forged sigma proofs are rejected") {
    const auto& ctx = Bls::ctx();
    TestRng rng(99);
    auto owner = pre::keygen<Bls>(ctx, rng);
    auto user = pre::keygen<Bls>(ctx, rng);
    auto m = Bls::gt_pow(ctx, ctx.gT, Bls::scalar_random_nonzero(ctx, rng));
    auto c = pre::enc<Bls>(ctx, owner.pk, m, rng);
    auto rk = pre::rekeygen<Bls>(ctx, owner, user.pk);
    auto cp = pre::reenc<Bls>(ctx, rk, c);

    for (int i = 0; i < 50; ++i) {
        BlsReEncProof forged;
        forged.A = Bls::gt_pow(ctx, ctx.gT, Bls::scalar_random_nonzero(ctx, rng));
        forged.z = Bls::g2_pow(ctx, ctx.h2, Bls::scalar_random_nonzero(ctx, rng));
        CHECK_FALSE(verify_reenc<Bls>(ctx, c, cp, forged));
    }
    // honest proofs with fresh randomness all pass
    for (int i = 0; i < 50; ++i) {
        auto sigma = prove_reenc<Bls>(ctx, c, cp, rk, rng);
        CHECK(verify_reenc<Bls>(ctx, c, cp, sigma));
    }
}
