#pragma once

#include "faith/pairing_core.hpp"

namespace faith::pre {

// Serialized object type tags.
inline constexpr uint8_t TAG_PUBLIC_KEY = 0x01;
inline constexpr uint8_t TAG_LEVEL2 = 0x02;
inline constexpr uint8_t TAG_REKEY = 0x03;
inline constexpr uint8_t TAG_LEVEL1 = 0x04;

template <class B>
struct PublicKey {
    typename B::Gt pkT;     // gT^{s1}
    typename B::G2src pk2;  // h2^{s2}
};

template <class B>
struct KeyPair {
    typename B::Scalar s1, s2;
    PublicKey<B> pk;
};

// Owner-level ciphertext (g1^r, m * pkT^r).
template <class B>
struct Level2Ciphertext {
    typename B::G1 c1;
    typename B::Gt c2;
};

// Delegation token h2^{s1_owner * s2_user}; lets a proxy transform without
// learning anything else.
template <class B>
struct ReKey {
    typename B::G2src rk;
};

// Re-encrypted ciphertext (pairing(c1, rk), c2).
template <class B>
struct Level1Ciphertext {
    typename B::Gt c1p;
    typename B::Gt c2p;
};

namespace detail {

// Deterministic encryption body shared by enc() and the worked-example tests.
template <class B>
Level2Ciphertext<B> enc_with_scalar(const typename B::Ctx& ctx, const PublicKey<B>& pk,
                                    const typename B::Gt& m, const typename B::Scalar& r) {
    Level2Ciphertext<B> c;
    c.c1 = B::g1_pow(ctx, ctx.g1, r);
    c.c2 = B::gt_mul(ctx, m, B::gt_pow(ctx, pk.pkT, r));
    return c;
}

}  // namespace detail

template <class B>
KeyPair<B> keygen(const typename B::Ctx& ctx, RngSource& rng) {
    KeyPair<B> kp;
    kp.s1 = B::scalar_random_nonzero(ctx, rng);
    kp.s2 = B::scalar_random_nonzero(ctx, rng);
    kp.pk.pkT = B::gt_pow(ctx, ctx.gT, kp.s1);
    kp.pk.pk2 = B::g2_pow(ctx, ctx.h2, kp.s2);
    return kp;
}

template <class B>
Level2Ciphertext<B> enc(const typename B::Ctx& ctx, const PublicKey<B>& pk,
                        const typename B::Gt& m, RngSource& rng) {
    return detail::enc_with_scalar<B>(ctx, pk, m, B::scalar_random_nonzero(ctx, rng));
}

template <class B>
typename B::Gt dec_owner(const typename B::Ctx& ctx, const KeyPair<B>& kp,
                         const Level2Ciphertext<B>& c) {
    // pairing(g1^r, h2)^{s1} = pkT^r
    typename B::Gt mask = B::gt_pow(ctx, B::pairing(ctx, c.c1, ctx.h2), kp.s1);
    return B::gt_mul(ctx, c.c2, B::gt_inverse(ctx, mask));
}

template <class B>
ReKey<B> rekeygen(const typename B::Ctx& ctx, const KeyPair<B>& owner,
                  const PublicKey<B>& user) {
    return {B::g2_pow(ctx, user.pk2, owner.s1)};
}

template <class B>
Level1Ciphertext<B> reenc(const typename B::Ctx& ctx, const ReKey<B>& rk,
                          const Level2Ciphertext<B>& c) {
    return {B::pairing(ctx, c.c1, rk.rk), c.c2};
}

template <class B>
typename B::Gt dec_user(const typename B::Ctx& ctx, const KeyPair<B>& user,
                        const Level1Ciphertext<B>& c) {
    typename B::Scalar inv = B::scalar_inverse(ctx, user.s2);
    return B::gt_mul(ctx, c.c2p, B::gt_pow(ctx, B::gt_inverse(ctx, c.c1p), inv));
}

template <class B>
Bytes serialize_public_key(const typename B::Ctx& ctx, const PublicKey<B>& pk) {
    TaggedWriter w(TAG_PUBLIC_KEY);
    w.field(B::gt_serialize(ctx, pk.pkT));
    w.field(B::g2_serialize(ctx, pk.pk2));
    return w.take();
}

template <class B>
PublicKey<B> deserialize_public_key(const typename B::Ctx& ctx, ByteView b) {
    TaggedReader r(b, TAG_PUBLIC_KEY);
    PublicKey<B> pk;
    pk.pkT = B::gt_deserialize(ctx, r.field());
    pk.pk2 = B::g2_deserialize(ctx, r.field());
    r.expect_done();
    return pk;
}

template <class B>
Bytes serialize_level2(const typename B::Ctx& ctx, const Level2Ciphertext<B>& c) {
    TaggedWriter w(TAG_LEVEL2);
    w.field(B::g1_serialize(ctx, c.c1));
    w.field(B::gt_serialize(ctx, c.c2));
    return w.take();
}

template <class B>
Level2Ciphertext<B> deserialize_level2(const typename B::Ctx& ctx, ByteView b) {
    TaggedReader r(b, TAG_LEVEL2);
    Level2Ciphertext<B> c;
    c.c1 = B::g1_deserialize(ctx, r.field());
    c.c2 = B::gt_deserialize(ctx, r.field());
    r.expect_done();
    return c;
}

template <class B>
Bytes serialize_rekey(const typename B::Ctx& ctx, const ReKey<B>& rk) {
    TaggedWriter w(TAG_REKEY);
    w.field(B::g2_serialize(ctx, rk.rk));
    return w.take();
}

template <class B>
ReKey<B> deserialize_rekey(const typename B::Ctx& ctx, ByteView b) {
    TaggedReader r(b, TAG_REKEY);
    ReKey<B> rk{B::g2_deserialize(ctx, r.field())};
    r.expect_done();
    return rk;
}

template <class B>
Bytes serialize_level1(const typename B::Ctx& ctx, const Level1Ciphertext<B>& c) {
    TaggedWriter w(TAG_LEVEL1);
    w.field(B::gt_serialize(ctx, c.c1p));
    w.field(B::gt_serialize(ctx, c.c2p));
    return w.take();
}

template <class B>
Level1Ciphertext<B> deserialize_level1(const typename B::Ctx& ctx, ByteView b) {
    TaggedReader r(b, TAG_LEVEL1);
    Level1Ciphertext<B> c;
    c.c1p = B::gt_deserialize(ctx, r.field());
    c.c2p = B::gt_deserialize(ctx, r.field());
    r.expect_done();
    return c;
}

}  // namespace faith::pre
