#include "faith/curve.hpp"

namespace faith::bls {

namespace {

constexpr uint64_t BLS_X_ABS = 0xd201000000010000ULL;  // loop parameter is -BLS_X_ABS

const Fp& b_g1() {
    static const Fp b = Fp::from_u64(4);
    return b;
}
const Fp2& b_g2() {
    static const Fp2 b{Fp::from_u64(4), Fp::from_u64(4)};
    return b;
}

Fp fp_from_hex(const char* s) { return Fp::from_bytes(from_hex(s)); }

struct Generators {
    G1 g1;
    G2 g2;
    Generators() {
        g1 = G1::from_affine(
            fp_from_hex("17f1d3a73197d7942695638c4fa9ac0fc3688c4f9774b905a14e3a3f171bac58"
                        "6c55e83ff97a1aeffb3af00adb22c6bb"),
            fp_from_hex("08b3f481e3aaa0f1a09e30ed741d8ae4fcf5e095d5d00af600db18cb2c04b3ed"
                        "d03cc744a2888ae40caa232946c5e7e1"));
        g2 = G2::from_affine(
            Fp2{fp_from_hex("024aa2b2f08f0a91260805272dc51051c6e47ad4fa403b02b4510b647ae3d177"
                            "0bac0326a805bbefd48056c8c121bdb8"),
                fp_from_hex("13e02b6052719f607dacd3a088274f65596bd0d09920b61ab5da61bbdc7f5049"
                            "334cf11213945d57e5ac7d055d042b7e")},
            Fp2{fp_from_hex("0ce5d527727d6e118cc9cdc6da2e351aadfd9baa8cbdd3a76d429a695160d12c"
                            "923ac9cc3baca289e193548608b82801"),
                fp_from_hex("0606c4a02ea734cc32acd2b02bc28b99cb3e287e85a763af267492ab572e99ab"
                            "3f370d275cec1da1aaa9075ff05f79be")});
    }
};

const Generators& generators() {
    static const Generators g;
    return g;
}

// Sparse line value a + b*w^3 + c*w^5 folded into the accumulator.
Fp12 mul_line(const Fp12& f, const Fp2& a, const Fp2& b, const Fp2& c) {
    Fp12 l;
    l.c0.c0 = a;
    l.c1.c1 = b;
    l.c1.c2 = c;
    return f * l;
}

struct AffG2 {
    Fp2 x, y;
};

// Affine Miller loop. T stays on the twist; line values are evaluated at the
// untwisted points, scaled by xi (subfield factors vanish in the final
// exponentiation).
Fp12 miller_loop(const Fp& px, const Fp& py, const AffG2& q) {
    AffG2 t = q;
    Fp12 f = Fp12::one();
    const Fp2 xi_yp{py, py};
    for (int i = 62; i >= 0; --i) {
        f = f.square();
        {
            Fp2 x2 = t.x.square();
            Fp2 lambda = (x2 + x2 + x2) * (t.y + t.y).inverse();
            f = mul_line(f, xi_yp, lambda * t.x - t.y, lambda.mul_fp(px).neg());
            Fp2 x3 = lambda.square() - t.x - t.x;
            t.y = lambda * (t.x - x3) - t.y;
            t.x = x3;
        }
        if (BLS_X_ABS >> i & 1) {
            Fp2 lambda = (q.y - t.y) * (q.x - t.x).inverse();
            f = mul_line(f, xi_yp, lambda * t.x - t.y, lambda.mul_fp(px).neg());
            Fp2 x3 = lambda.square() - t.x - q.x;
            t.y = lambda * (t.x - x3) - t.y;
            t.x = x3;
        }
    }
    return f.conjugate();
}

Fp12 pow_abs_x(const Fp12& a) {
    Fp12 r = a;
    for (int i = 62; i >= 0; --i) {
        r = r.square();
        if (BLS_X_ABS >> i & 1) r = r * a;
    }
    return r;
}

// a^x on the cyclotomic subgroup, where conjugation inverts
Fp12 pow_x(const Fp12& a) { return pow_abs_x(a).conjugate(); }

Fp12 final_exponentiation(const Fp12& f) {
    Fp12 g = f.conjugate() * f.inverse();
    g = frobenius(frobenius(g)) * g;
    Fp12 t0 = pow_x(g) * g.conjugate();
    t0 = pow_x(t0) * t0.conjugate();
    Fp12 t1 = pow_x(t0) * frobenius(t0);
    Fp12 t2 = pow_x(pow_x(t1));
    Fp12 t3 = t2 * frobenius(frobenius(t1)) * t1.conjugate();
    return t3 * g * g.square();
}

mont::Limbs<4> limbs_from_be32(ByteView data) {
    mont::Limbs<4> c{};
    for (size_t i = 0; i < 4; ++i)
        for (size_t b = 0; b < 8; ++b)
            c[i] |= static_cast<uint64_t>(data[31 - (8 * i + b)]) << (8 * b);
    return c;
}

}  // namespace

const G1& g1_generator() { return generators().g1; }
const G2& g2_generator() { return generators().g2; }

bool g1_on_curve(const G1& p) {
    if (p.is_infinity()) return true;
    Fp z6 = p.z.square() * p.z;
    z6 = z6.square();
    return p.y.square() == p.x.square() * p.x + b_g1() * z6;
}

bool g2_on_curve(const G2& p) {
    if (p.is_infinity()) return true;
    Fp2 z6 = p.z.square() * p.z;
    z6 = z6.square();
    return p.y.square() == p.x.square() * p.x + b_g2() * z6;
}

bool in_g1(const G1& p) {
    return g1_on_curve(p) && scalar_mul(p, FrTag::constants().modulus).is_infinity();
}

bool in_g2(const G2& p) {
    return g2_on_curve(p) && scalar_mul(p, FrTag::constants().modulus).is_infinity();
}

// Fast order-r test: membership in the cyclotomic subgroup (z^(p^4-p^2+1)=1,
// via Frobenius) plus z^p == z^x. gcd(p^4-p^2+1, p-x) equals r exactly, so
// together these pin the order to a divisor of r. Zero must be excluded up
// front since it satisfies both identities.
bool in_gt(const Fp12& z) {
    if (z.is_zero()) return false;
    Fp12 f2 = frobenius(frobenius(z));
    Fp12 f4 = frobenius(frobenius(f2));
    if (f4 * z != f2) return false;
    return frobenius(z) == pow_abs_x(z).conjugate();
}

bool in_gt_slow(const Fp12& z) { return pow_ext(z, FrTag::constants().modulus).is_one(); }

Bytes g1_serialize(const G1& p) {
    Bytes out(G1_SER_BYTES, 0);
    if (p.is_infinity()) {
        out[0] = 0xc0;
        return out;
    }
    auto [ax, ay] = p.to_affine();
    Bytes xb = ax.to_bytes();
    std::copy(xb.begin(), xb.end(), out.begin());
    out[0] |= 0x80;
    if (ay.is_lexicographically_largest()) out[0] |= 0x20;
    return out;
}

G1 g1_deserialize(ByteView b) {
    if (b.size() != G1_SER_BYTES) throw InvalidEncoding("G1 encoding must be 48 bytes");
    uint8_t flags = b[0];
    if (!(flags & 0x80)) throw InvalidEncoding("G1 encoding must be compressed");
    Bytes xb(b.begin(), b.end());
    xb[0] &= 0x1f;
    if (flags & 0x40) {
        if (flags & 0x20) throw InvalidEncoding("G1 infinity with sign bit");
        for (uint8_t v : xb)
            if (v != 0) throw InvalidEncoding("G1 infinity with nonzero payload");
        return G1::infinity();
    }
    Fp x = Fp::from_bytes(xb);
    auto y = sqrt_fp(x.square() * x + b_g1());
    if (!y) throw InvalidEncoding("G1 x not on curve");
    if (y->is_lexicographically_largest() != bool(flags & 0x20)) *y = y->neg();
    G1 p = G1::from_affine(x, *y);
    if (!in_g1(p)) throw InvalidEncoding("G1 point outside prime-order subgroup");
    return p;
}

Bytes g2_serialize(const G2& p) {
    Bytes out(G2_SER_BYTES, 0);
    if (p.is_infinity()) {
        out[0] = 0xc0;
        return out;
    }
    auto [ax, ay] = p.to_affine();
    Bytes hi = ax.c1.to_bytes();
    Bytes lo = ax.c0.to_bytes();
    std::copy(hi.begin(), hi.end(), out.begin());
    std::copy(lo.begin(), lo.end(), out.begin() + 48);
    out[0] |= 0x80;
    if (ay.is_lexicographically_largest()) out[0] |= 0x20;
    return out;
}

G2 g2_deserialize(ByteView b) {
    if (b.size() != G2_SER_BYTES) throw InvalidEncoding("G2 encoding must be 96 bytes");
    uint8_t flags = b[0];
    if (!(flags & 0x80)) throw InvalidEncoding("G2 encoding must be compressed");
    Bytes raw(b.begin(), b.end());
    raw[0] &= 0x1f;
    if (flags & 0x40) {
        if (flags & 0x20) throw InvalidEncoding("G2 infinity with sign bit");
        for (uint8_t v : raw)
            if (v != 0) throw InvalidEncoding("G2 infinity with nonzero payload");
        return G2::infinity();
    }
    Fp2 x{Fp::from_bytes(ByteView(raw).subspan(48, 48)),
          Fp::from_bytes(ByteView(raw).subspan(0, 48))};
    auto y = sqrt_fp2(x.square() * x + b_g2());
    if (!y) throw InvalidEncoding("G2 x not on curve");
    if (y->is_lexicographically_largest() != bool(flags & 0x20)) *y = y->neg();
    G2 p = G2::from_affine(x, *y);
    if (!in_g2(p)) throw InvalidEncoding("G2 point outside prime-order subgroup");
    return p;
}

Bytes gt_serialize(const Fp12& z) {
    Bytes out;
    out.reserve(GT_SER_BYTES);
    for (const Fp& c : fp12_coeffs(z)) {
        Bytes cb = c.to_bytes();
        out.insert(out.end(), cb.begin(), cb.end());
    }
    return out;
}

Fp12 gt_deserialize(ByteView b) {
    if (b.size() != GT_SER_BYTES) throw InvalidEncoding("GT encoding must be 576 bytes");
    std::array<Fp, 12> c;
    for (size_t i = 0; i < 12; ++i) c[i] = Fp::from_bytes(b.subspan(48 * i, 48));
    Fp12 z = fp12_from_coeffs(c);
    if (!in_gt(z)) throw InvalidEncoding("GT element outside prime-order subgroup");
    return z;
}

Bytes fr_serialize(const Fr& s) { return s.to_bytes(); }

Fr fr_deserialize(ByteView b) {
    if (b.size() != FR_SER_BYTES) throw InvalidEncoding("scalar encoding must be 32 bytes");
    return Fr::from_bytes(b);
}

Fp12 pairing(const G1& p, const G2& q) {
    if (p.is_infinity() || q.is_infinity()) return Fp12::one();
    auto [px, py] = p.to_affine();
    auto [qx, qy] = q.to_affine();
    return final_exponentiation(miller_loop(px, py, AffG2{qx, qy}));
}

Fp12 gt_pow(const Fp12& z, const Fr& e) { return pow_ext(z, e.to_limbs()); }

Fr random_fr(RngSource& rng) {
    const auto& r_mod = FrTag::constants().modulus;
    uint8_t buf[32];
    for (;;) {
        rng.fill(buf);
        buf[0] &= 0x7f;
        mont::Limbs<4> c = limbs_from_be32(ByteView(buf, 32));
        if (mont::cmp(c, r_mod) < 0) return Fr::from_limbs(c);
    }
}

Fr random_fr_nonzero(RngSource& rng) {
    for (;;) {
        Fr s = random_fr(rng);
        if (!s.is_zero()) return s;
    }
}

Fr fr_from_digest(ByteView d) {
    if (d.size() != 32) throw InvalidEncoding("digest must be 32 bytes");
    const auto& r_mod = FrTag::constants().modulus;
    mont::Limbs<4> c = limbs_from_be32(d);
    // 2^256 / r < 3, so two conditional subtractions reach canonical range
    for (int i = 0; i < 2 && mont::cmp(c, r_mod) >= 0; ++i) {
        mont::Limbs<4> t;
        mont::sub(t, c, r_mod);
        c = t;
    }
    return Fr::from_limbs(c);
}

}  // namespace faith::bls
