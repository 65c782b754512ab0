#pragma once

#include <atomic>
#include <cstdint>

#include "faith/curve.hpp"
#include "faith/sha256.hpp"

namespace faith::pairing_core {

// Counts of expensive group operations, for O(1)-work assertions in tests.
struct OpCounters {
    std::atomic<uint64_t> pairings{0};
    std::atomic<uint64_t> g1_exps{0};
    std::atomic<uint64_t> g2_exps{0};
    std::atomic<uint64_t> gt_exps{0};

    void reset() {
        pairings = 0;
        g1_exps = 0;
        g2_exps = 0;
        gt_exps = 0;
    }
};

// Production backend over BLS12-381. Group elements are value types; every
// operation is a pure function.
struct BlsBackend {
    using Scalar = bls::Fr;
    using G1 = bls::G1;
    using G2src = bls::G2;
    using Gt = bls::Fp12;

    struct Ctx {
        G1 g1;
        G2src h2;
        Gt gT;
        Bytes p_be;  // group order, big-endian
    };

    static const Ctx& ctx() {
        static const Ctx c = [] {
            Ctx c;
            c.g1 = bls::g1_generator();
            c.h2 = bls::g2_generator();
            c.gT = bls::pairing(c.g1, c.h2);
            c.p_be = order_bytes();
            return c;
        }();
        return c;
    }

    static OpCounters& counters() {
        static OpCounters c;
        return c;
    }

    static Scalar scalar_random(const Ctx&, RngSource& rng) { return bls::random_fr(rng); }
    static Scalar scalar_random_nonzero(const Ctx&, RngSource& rng) {
        return bls::random_fr_nonzero(rng);
    }
    static Scalar scalar_from_u64(const Ctx&, uint64_t v) { return Scalar::from_u64(v); }
    static Scalar scalar_from_digest(const Ctx&, const Digest32& d) {
        return bls::fr_from_digest(d);
    }
    static Scalar scalar_add(const Ctx&, const Scalar& a, const Scalar& b) { return a + b; }
    static Scalar scalar_mul(const Ctx&, const Scalar& a, const Scalar& b) { return a * b; }
    static Scalar scalar_inverse(const Ctx&, const Scalar& s) { return s.inverse(); }
    static Bytes scalar_serialize(const Ctx&, const Scalar& s) { return bls::fr_serialize(s); }
    static Scalar scalar_deserialize(const Ctx&, ByteView b) { return bls::fr_deserialize(b); }

    static G1 g1_pow(const Ctx&, const G1& base, const Scalar& e) {
        counters().g1_exps++;
        return bls::scalar_mul(base, e);
    }
    static G1 g1_mul(const Ctx&, const G1& a, const G1& b) { return a.add(b); }
    static Bytes g1_serialize(const Ctx&, const G1& p) { return bls::g1_serialize(p); }
    static G1 g1_deserialize(const Ctx&, ByteView b) { return bls::g1_deserialize(b); }

    static G2src g2_pow(const Ctx&, const G2src& base, const Scalar& e) {
        counters().g2_exps++;
        return bls::scalar_mul(base, e);
    }
    static G2src g2_mul(const Ctx&, const G2src& a, const G2src& b) { return a.add(b); }
    static Bytes g2_serialize(const Ctx&, const G2src& p) { return bls::g2_serialize(p); }
    static G2src g2_deserialize(const Ctx&, ByteView b) { return bls::g2_deserialize(b); }

    static Gt gt_identity(const Ctx&) { return Gt::one(); }
    static Gt gt_pow(const Ctx&, const Gt& base, const Scalar& e) {
        counters().gt_exps++;
        return bls::gt_pow(base, e);
    }
    static Gt gt_mul(const Ctx&, const Gt& a, const Gt& b) { return a * b; }
    static Gt gt_inverse(const Ctx&, const Gt& a) { return a.conjugate(); }
    static Bytes gt_serialize(const Ctx&, const Gt& z) { return bls::gt_serialize(z); }
    static Gt gt_deserialize(const Ctx&, ByteView b) { return bls::gt_deserialize(b); }

    static Gt pairing(const Ctx&, const G1& a, const G2src& b) {
        counters().pairings++;
        return bls::pairing(a, b);
    }

private:
    static Bytes order_bytes() {
        const auto& m = bls::FrTag::constants().modulus;
        Bytes out(32);
        for (size_t i = 0; i < 4; ++i)
            for (size_t b = 0; b < 8; ++b)
                out[31 - (8 * i + b)] = static_cast<uint8_t>(m[i] >> (8 * b));
        return out;
    }
};

// Exponent-arithmetic oracle over a small prime: a "group element" g^a is
// represented by the exponent a itself, and the pairing multiplies exponents.
// Bilinearity is then checkable exhaustively, giving an independent reference
// for every equation the production backend must satisfy.
struct ToyBackend {
    struct Elem {
        uint32_t v = 0;
        uint32_t p = 0;
        bool operator==(const Elem&) const = default;
    };
    using Scalar = Elem;
    using G1 = Elem;
    using G2src = Elem;
    using Gt = Elem;

    struct Ctx {
        G1 g1;
        G2src h2;
        Gt gT;
        Bytes p_be;
        uint32_t p_small = 0;
    };

    static Ctx make_ctx(uint32_t p_small) {
        if (p_small >= (1u << 16)) throw ConfigError("toy modulus must be below 2^16");
        if (p_small < 2) throw ConfigError("toy modulus must be prime");
        for (uint32_t d = 2; d * d <= p_small; ++d)
            if (p_small % d == 0) throw ConfigError("toy modulus must be prime");
        Ctx c;
        c.g1 = {1, p_small};
        c.h2 = {1, p_small};
        c.gT = {1, p_small};
        c.p_small = p_small;
        append_u32le(c.p_be, p_small);
        std::reverse(c.p_be.begin(), c.p_be.end());
        return c;
    }

    static Scalar scalar_random(const Ctx& c, RngSource& rng) {
        return {static_cast<uint32_t>(rng.below(c.p_small)), c.p_small};
    }
    static Scalar scalar_random_nonzero(const Ctx& c, RngSource& rng) {
        return {static_cast<uint32_t>(1 + rng.below(c.p_small - 1)), c.p_small};
    }
    static Scalar scalar_from_u64(const Ctx& c, uint64_t v) {
        return {static_cast<uint32_t>(v % c.p_small), c.p_small};
    }
    static Scalar scalar_from_digest(const Ctx& c, const Digest32& d) {
        uint64_t v = 0;
        for (uint8_t b : d) v = (v * 256 + b) % c.p_small;
        return {static_cast<uint32_t>(v), c.p_small};
    }
    static Scalar scalar_add(const Ctx& c, const Scalar& a, const Scalar& b) {
        return {(a.v + b.v) % c.p_small, c.p_small};
    }
    static Scalar scalar_mul(const Ctx& c, const Scalar& a, const Scalar& b) {
        return {static_cast<uint32_t>(uint64_t(a.v) * b.v % c.p_small), c.p_small};
    }
    static Scalar scalar_inverse(const Ctx& c, const Scalar& s) {
        if (s.v == 0) throw ZeroInverse();
        // Fermat: s^(p-2) mod p
        uint64_t result = 1, base = s.v, e = c.p_small - 2;
        while (e) {
            if (e & 1) result = result * base % c.p_small;
            base = base * base % c.p_small;
            e >>= 1;
        }
        return {static_cast<uint32_t>(result), c.p_small};
    }
    static Bytes scalar_serialize(const Ctx&, const Scalar& s) {
        Bytes b;
        append_u32le(b, s.v);
        return b;
    }
    static Scalar scalar_deserialize(const Ctx& c, ByteView b) {
        if (b.size() != 4) throw InvalidEncoding("toy scalar must be 4 bytes");
        uint32_t v = read_u32le(b, 0);
        if (v >= c.p_small) throw InvalidEncoding("toy scalar exceeds modulus");
        return {v, c.p_small};
    }

    static Elem pow_elem(const Ctx& c, const Elem& base, const Scalar& e) {
        return {static_cast<uint32_t>(uint64_t(base.v) * e.v % c.p_small), c.p_small};
    }
    static Elem mul_elem(const Ctx& c, const Elem& a, const Elem& b) {
        return {(a.v + b.v) % c.p_small, c.p_small};
    }

    static G1 g1_pow(const Ctx& c, const G1& b, const Scalar& e) { return pow_elem(c, b, e); }
    static G1 g1_mul(const Ctx& c, const G1& a, const G1& b) { return mul_elem(c, a, b); }
    static Bytes g1_serialize(const Ctx& c, const G1& p) { return scalar_serialize(c, p); }
    static G1 g1_deserialize(const Ctx& c, ByteView b) { return scalar_deserialize(c, b); }

    static G2src g2_pow(const Ctx& c, const G2src& b, const Scalar& e) { return pow_elem(c, b, e); }
    static G2src g2_mul(const Ctx& c, const G2src& a, const G2src& b) { return mul_elem(c, a, b); }
    static Bytes g2_serialize(const Ctx& c, const G2src& p) { return scalar_serialize(c, p); }
    static G2src g2_deserialize(const Ctx& c, ByteView b) { return scalar_deserialize(c, b); }

    static Gt gt_identity(const Ctx& c) { return {0, c.p_small}; }
    static Gt gt_pow(const Ctx& c, const Gt& b, const Scalar& e) { return pow_elem(c, b, e); }
    static Gt gt_mul(const Ctx& c, const Gt& a, const Gt& b) { return mul_elem(c, a, b); }
    static Gt gt_inverse(const Ctx& c, const Gt& a) {
        return {(c.p_small - a.v) % c.p_small, c.p_small};
    }
    static Bytes gt_serialize(const Ctx& c, const Gt& z) { return scalar_serialize(c, z); }
    static Gt gt_deserialize(const Ctx& c, ByteView b) { return scalar_deserialize(c, b); }

    static Gt pairing(const Ctx& c, const G1& a, const G2src& b) {
        return {static_cast<uint32_t>(uint64_t(a.v) * b.v % c.p_small), c.p_small};
    }
};

inline ToyBackend::Ctx toy_oracle_ctx(uint32_t p_small) { return ToyBackend::make_ctx(p_small); }

}  // namespace faith::pairing_core
