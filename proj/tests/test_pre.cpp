#include "doctest.h"

#include "faith/pre.hpp"
#include "faith/rng.hpp"

using namespace faith;
using Bls = pairing_core::BlsBackend;
using Toy = pairing_core::ToyBackend;

namespace {

template <class B>
pre::KeyPair<B> toy_keypair(const typename B::Ctx& ctx, uint32_t s1, uint32_t s2) {
    pre::KeyPair<B> kp;
    kp.s1 = B::scalar_from_u64(ctx, s1);
    kp.s2 = B::scalar_from_u64(ctx, s2);
    kp.pk.pkT = B::gt_pow(ctx, ctx.gT, kp.s1);
    kp.pk.pk2 = B::g2_pow(ctx, ctx.h2, kp.s2);
    return kp;
}

}  // namespace

TEST_CASE("toy delegation trace with fixed exponents") {
    // owner s1 = 3, user s2 = 11, encryption scalar r = 13, modulus 101
    auto ctx = pairing_core::toy_oracle_ctx(101);
    auto owner = toy_keypair<Toy>(ctx, 3, 5);
    auto user = toy_keypair<Toy>(ctx, 7, 11);

    Toy::Gt m = Toy::gt_pow(ctx, ctx.gT, Toy::scalar_from_u64(ctx, 20));
    auto c = pre::detail::enc_with_scalar<Toy>(ctx, owner.pk, m,
                                               Toy::scalar_from_u64(ctx, 13));
    CHECK(c.c1.v == 13);
    CHECK(c.c2.v == (20 + 3 * 13) % 101);  // m shifted by s1*r = 39

    auto rk = pre::rekeygen<Toy>(ctx, owner, user.pk);
    CHECK(rk.rk.v == 33);  // h2^{s1*s2} = h2^{3*11}

    auto cp = pre::reenc<Toy>(ctx, rk, c);
    CHECK(cp.c1p.v == 25);  // 13 * 33 = 429 = 25 mod 101
    CHECK(cp.c2p.v == c.c2.v);

    // unmasking exponent: -(s1*r) = -39 appears as 25 * 11^{-1} negated
    auto inv = Toy::scalar_inverse(ctx, user.s2);
    CHECK(inv.v == 46);
    auto unmask = Toy::gt_pow(ctx, Toy::gt_inverse(ctx, cp.c1p), inv);
    CHECK(unmask.v == 62);
    CHECK((39 + unmask.v) % 101 == 0);  // mask + unmask cancel

    auto got = pre::dec_user<Toy>(ctx, user, cp);
    CHECK(got.v == m.v);

    auto owner_got = pre::dec_owner<Toy>(ctx, owner, c);
    CHECK(owner_got.v == m.v);
}

TEST_CASE("toy second-level and first-level decryption agree for random keys") {
    auto ctx = pairing_core::toy_oracle_ctx(101);
    TestRng rng(11);
    for (int i = 0; i < 200; ++i) {
        auto owner = pre::keygen<Toy>(ctx, rng);
        auto user = pre::keygen<Toy>(ctx, rng);
        Toy::Gt m = Toy::gt_pow(ctx, ctx.gT, Toy::scalar_random(ctx, rng));
        auto c = pre::enc<Toy>(ctx, owner.pk, m, rng);
        CHECK(pre::dec_owner<Toy>(ctx, owner, c).v == m.v);
        auto rk = pre::rekeygen<Toy>(ctx, owner, user.pk);
        auto cp = pre::reenc<Toy>(ctx, rk, c);
        CHECK(pre::dec_user<Toy>(ctx, user, cp).v == m.v);
    }
}

TEST_CASE("bls round trips: enc, reenc, both decryption paths") {
    const auto& ctx = Bls::ctx();
    TestRng rng(21);
    for (int i = 0; i < 100; ++i) {
        auto owner = pre::keygen<Bls>(ctx, rng);
        auto user = pre::keygen<Bls>(ctx, rng);
        Bls::Gt m = Bls::gt_pow(ctx, ctx.gT, Bls::scalar_random_nonzero(ctx, rng));

        auto c = pre::enc<Bls>(ctx, owner.pk, m, rng);
        CHECK(pre::dec_owner<Bls>(ctx, owner, c) == m);

        auto rk = pre::rekeygen<Bls>(ctx, owner, user.pk);
        auto cp = pre::reenc<Bls>(ctx, rk, c);
        CHECK(pre::dec_user<Bls>(ctx, user, cp) == m);
    }
}

TEST_CASE("delegation is directional and keyed to one user") {
    const auto& ctx = Bls::ctx();
    TestRng rng(22);
    auto owner = pre::keygen<Bls>(ctx, rng);
    auto alice = pre::keygen<Bls>(ctx, rng);
    auto mallory = pre::keygen<Bls>(ctx, rng);
    Bls::Gt m = Bls::gt_pow(ctx, ctx.gT, Bls::scalar_random_nonzero(ctx, rng));

    auto c = pre::enc<Bls>(ctx, owner.pk, m, rng);
    auto rk_alice = pre::rekeygen<Bls>(ctx, owner, alice.pk);
    auto cp = pre::reenc<Bls>(ctx, rk_alice, c);

    CHECK(pre::dec_user<Bls>(ctx, alice, cp) == m);
    CHECK_FALSE(pre::dec_user<Bls>(ctx, mallory, cp) == m);

    // a rekey for mallory does not open alice's transformed ciphertext
    auto rk_mallory = pre::rekeygen<Bls>(ctx, owner, mallory.pk);
    auto cp2 = pre::reenc<Bls>(ctx, rk_mallory, c);
    CHECK_FALSE(pre::dec_user<Bls>(ctx, alice, cp2) == m);
    CHECK(pre::dec_user<Bls>(ctx, mallory, cp2) == m);
}

TEST_CASE("rekey reveals neither secret") {
    // rk = h2^{s1_o * s2_u}; check it differs from both parties' public material
    const auto& ctx = Bls::ctx();
    TestRng rng(23);
    auto owner = pre::keygen<Bls>(ctx, rng);
    auto user = pre::keygen<Bls>(ctx, rng);
    auto rk = pre::rekeygen<Bls>(ctx, owner, user.pk);
    CHECK_FALSE(Bls::g2_serialize(ctx, rk.rk) == Bls::g2_serialize(ctx, owner.pk.pk2));
    CHECK_FALSE(Bls::g2_serialize(ctx, rk.rk) == Bls::g2_serialize(ctx, user.pk.pk2));
    CHECK_FALSE(Bls::g2_serialize(ctx, rk.rk) == Bls::g2_serialize(ctx, ctx.h2));
}

TEST_CASE("serialized forms round trip and reject foreign tags") {
    const auto& ctx = Bls::ctx();
    TestRng rng(24);
    auto owner = pre::keygen<Bls>(ctx, rng);
    auto user = pre::keygen<Bls>(ctx, rng);
    Bls::Gt m = Bls::gt_pow(ctx, ctx.gT, Bls::scalar_random_nonzero(ctx, rng));
    auto c = pre::enc<Bls>(ctx, owner.pk, m, rng);
    auto rk = pre::rekeygen<Bls>(ctx, owner, user.pk);
    auto cp = pre::reenc<Bls>(ctx, rk, c);

    Bytes bpk = pre::serialize_public_key<Bls>(ctx, owner.pk);
    auto pk2 = pre::deserialize_public_key<Bls>(ctx, bpk);
    CHECK(pk2.pkT == owner.pk.pkT);
    CHECK(Bls::g2_serialize(ctx, pk2.pk2) == Bls::g2_serialize(ctx, owner.pk.pk2));

    Bytes bc = pre::serialize_level2<Bls>(ctx, c);
    auto c2 = pre::deserialize_level2<Bls>(ctx, bc);
    CHECK(Bls::g1_serialize(ctx, c2.c1) == Bls::g1_serialize(ctx, c.c1));
    CHECK(c2.c2 == c.c2);
    CHECK(pre::dec_owner<Bls>(ctx, owner, c2) == m);

    Bytes brk = pre::serialize_rekey<Bls>(ctx, rk);
    auto rk2 = pre::deserialize_rekey<Bls>(ctx, brk);
    CHECK(Bls::g2_serialize(ctx, rk2.rk) == Bls::g2_serialize(ctx, rk.rk));

    Bytes bcp = pre::serialize_level1<Bls>(ctx, cp);
    auto cp2 = pre::deserialize_level1<Bls>(ctx, bcp);
    CHECK(cp2.c1p == cp.c1p);
    CHECK(cp2.c2p == cp.c2p);
    CHECK(pre::dec_user<Bls>(ctx, user, cp2) == m);

    // level2 bytes are not a rekey
    CHECK_THROWS_AS(pre::deserialize_rekey<Bls>(ctx, bc), InvalidEncoding);
    // truncation is rejected
    Bytes cut(bcp.begin(), bcp.end() - 1);
    CHECK_THROWS_AS(pre::deserialize_level1<Bls>(ctx, cut), InvalidEncoding);
}

TEST_CASE("distinct rngs give distinct keys and ciphertexts") {
    const auto& ctx = Bls::ctx();
    TestRng a(1), b(2);
    auto ka = pre::keygen<Bls>(ctx, a);
    auto kb = pre::keygen<Bls>(ctx, b);
    CHECK_FALSE(Bls::gt_serialize(ctx, ka.pk.pkT) == Bls::gt_serialize(ctx, kb.pk.pkT));

    // same key, fresh randomness: ciphertexts differ, plaintext is stable
    TestRng c(3);
    Bls::Gt m = Bls::gt_pow(ctx, ctx.gT, Bls::scalar_random_nonzero(ctx, c));
    auto c1 = pre::enc<Bls>(ctx, ka.pk, m, c);
    auto c2 = pre::enc<Bls>(ctx, ka.pk, m, c);
    CHECK_FALSE(Bls::g1_serialize(ctx, c1.c1) == Bls::g1_serialize(ctx, c2.c1));
    CHECK(pre::dec_owner<Bls>(ctx, ka, c1) == pre::dec_owner<Bls>(ctx, ka, c2));
}
