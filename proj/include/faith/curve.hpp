#pragma once

#include "faith/bytes.hpp"
#include "faith/fp.hpp"
#include "faith/rng.hpp"

namespace faith::bls {

// Jacobian point on y^2 = x^3 + b with a = 0; z == 0 marks infinity.
template <class F>
struct JacPoint {
    F x = F::zero();
    F y = F::one();
    F z = F::zero();

    static JacPoint infinity() { return {}; }
    static JacPoint from_affine(const F& ax, const F& ay) { return {ax, ay, F::one()}; }

    bool is_infinity() const { return z.is_zero(); }

    JacPoint neg() const { return {x, y.neg(), z}; }

    JacPoint dbl() const {
        F a = x.square();
        F b = y.square();
        F c = b.square();
        F d = ((x + b).square() - a - c).dbl();
        F e = a + a + a;
        F f = e.square();
        F x3 = f - d.dbl();
        F c8 = c.dbl().dbl().dbl();
        F y3 = e * (d - x3) - c8;
        F z3 = (y * z).dbl();
        return {x3, y3, z3};
    }

    JacPoint add(const JacPoint& o) const {
        if (is_infinity()) return o;
        if (o.is_infinity()) return *this;
        F z1z1 = z.square();
        F z2z2 = o.z.square();
        F u1 = x * z2z2;
        F u2 = o.x * z1z1;
        F s1 = y * o.z * z2z2;
        F s2 = o.y * z * z1z1;
        F h = u2 - u1;
        F rr = (s2 - s1).dbl();
        if (h.is_zero()) {
            if (rr.is_zero()) return dbl();
            return infinity();
        }
        F i = h.dbl().square();
        F j = h * i;
        F v = u1 * i;
        F x3 = rr.square() - j - v.dbl();
        F y3 = rr * (v - x3) - (s1 * j).dbl();
        F z3 = ((z + o.z).square() - z1z1 - z2z2) * h;
        return {x3, y3, z3};
    }

    bool operator==(const JacPoint& o) const {
        if (is_infinity() || o.is_infinity()) return is_infinity() == o.is_infinity();
        F z1z1 = z.square();
        F z2z2 = o.z.square();
        if (x * z2z2 != o.x * z1z1) return false;
        return y * o.z * z2z2 == o.y * z * z1z1;
    }
    bool operator!=(const JacPoint& o) const { return !(*this == o); }

    // affine (x, y); only valid off infinity
    std::pair<F, F> to_affine() const {
        F zi = z.inverse();
        F zi2 = zi.square();
        return {x * zi2, y * zi2 * zi};
    }
};

using G1 = JacPoint<Fp>;
using G2 = JacPoint<Fp2>;

template <class F, size_t N>
JacPoint<F> scalar_mul(const JacPoint<F>& p, const mont::Limbs<N>& e) {
    JacPoint<F> r = JacPoint<F>::infinity();
    bool started = false;
    for (size_t i = N; i-- > 0;) {
        for (int b = 63; b >= 0; --b) {
            if (started) r = r.dbl();
            if (e[i] >> b & 1) {
                r = r.add(p);
                started = true;
            }
        }
    }
    return r;
}

template <class F>
JacPoint<F> scalar_mul(const JacPoint<F>& p, const Fr& e) {
    return scalar_mul(p, e.to_limbs());
}

const G1& g1_generator();
const G2& g2_generator();

bool g1_on_curve(const G1& p);
bool g2_on_curve(const G2& p);
bool in_g1(const G1& p);    // on curve and killed by the group order
bool in_g2(const G2& p);
bool in_gt(const Fp12& z);       // z^r == 1, Frobenius-based fast path
bool in_gt_slow(const Fp12& z);  // direct exponentiation, kept as an oracle

inline constexpr size_t G1_SER_BYTES = 48;
inline constexpr size_t G2_SER_BYTES = 96;
inline constexpr size_t GT_SER_BYTES = 576;
inline constexpr size_t FR_SER_BYTES = 32;

// Compressed encodings with flag bits in the top of the first byte:
// bit7 compressed (always set), bit6 infinity, bit5 sign (y lexicographically
// largest). G2 x is written x.c1 || x.c0, both big-endian.
Bytes g1_serialize(const G1& p);
Bytes g2_serialize(const G2& p);
G1 g1_deserialize(ByteView b);  // throws InvalidEncoding; enforces subgroup
G2 g2_deserialize(ByteView b);

// 576-byte GT encoding: 12 coefficients, big-endian, flatten order.
Bytes gt_serialize(const Fp12& z);
Fp12 gt_deserialize(ByteView b);  // throws InvalidEncoding; enforces z^r == 1

Bytes fr_serialize(const Fr& s);
Fr fr_deserialize(ByteView b);

// optimal ate pairing; returns the GT identity if either input is infinity
Fp12 pairing(const G1& p, const G2& q);

Fp12 gt_pow(const Fp12& z, const Fr& e);

Fr random_fr(RngSource& rng);
Fr random_fr_nonzero(RngSource& rng);

// 32-byte big-endian value reduced mod the group order (Fiat-Shamir challenges)
Fr fr_from_digest(ByteView d);

}  // namespace faith::bls
