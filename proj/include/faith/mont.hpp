#pragma once

#include <array>
#include <cstdint>

#include "faith/bytes.hpp"
#include "faith/errors.hpp"

namespace faith::mont {

using u64 = uint64_t;
using u128 = unsigned __int128;

// Fixed-width little-endian limb vector.
template <size_t N>
using Limbs = std::array<u64, N>;

template <size_t N>
constexpr bool is_zero(const Limbs<N>& a) {
    for (u64 w : a)
        if (w != 0) return false;
    return true;
}

// -1 / 0 / +1 comparison
template <size_t N>
constexpr int cmp(const Limbs<N>& a, const Limbs<N>& b) {
    for (size_t i = N; i-- > 0;) {
        if (a[i] < b[i]) return -1;
        if (a[i] > b[i]) return 1;
    }
    return 0;
}

// out = a + b, returns carry
template <size_t N>
constexpr u64 add(Limbs<N>& out, const Limbs<N>& a, const Limbs<N>& b) {
    u64 carry = 0;
    for (size_t i = 0; i < N; ++i) {
        u128 t = static_cast<u128>(a[i]) + b[i] + carry;
        out[i] = static_cast<u64>(t);
        carry = static_cast<u64>(t >> 64);
    }
    return carry;
}

// out = a - b, returns borrow
template <size_t N>
constexpr u64 sub(Limbs<N>& out, const Limbs<N>& a, const Limbs<N>& b) {
    u64 borrow = 0;
    for (size_t i = 0; i < N; ++i) {
        u128 t = static_cast<u128>(a[i]) - b[i] - borrow;
        out[i] = static_cast<u64>(t);
        borrow = static_cast<u64>(t >> 64) & 1;
    }
    return borrow;
}

template <size_t N>
constexpr void shr1(Limbs<N>& x, u64 top) {
    for (size_t i = 0; i + 1 < N; ++i) x[i] = (x[i] >> 1) | (x[i + 1] << 63);
    x[N - 1] = (x[N - 1] >> 1) | (top << 63);
}

// exact division by a small divisor; throws if a remainder is left
template <size_t N>
constexpr Limbs<N> div_exact_u64(const Limbs<N>& a, u64 d) {
    Limbs<N> q{};
    u64 rem = 0;
    for (size_t i = N; i-- > 0;) {
        u128 cur = (static_cast<u128>(rem) << 64) | a[i];
        q[i] = static_cast<u64>(cur / d);
        rem = static_cast<u64>(cur % d);
    }
    if (rem != 0) throw Error("div_exact_u64: inexact division");
    return q;
}

// Field constants for a Montgomery domain modulo an odd prime that fits N limbs.
template <size_t N>
struct FieldConstants {
    Limbs<N> modulus{};
    Limbs<N> r1{};        // 2^(64N) mod p      (Montgomery one)
    Limbs<N> r2{};        // 2^(128N) mod p     (to-Montgomery factor)
    u64 inv = 0;          // -p^(-1) mod 2^64
    unsigned bits = 0;    // bit length of p

    static FieldConstants make(const Limbs<N>& p) {
        FieldConstants k;
        k.modulus = p;
        // inv = -p^{-1} mod 2^64 by Newton iteration
        u64 x = p[0];  // p odd => p[0] odd, x == p^{-1} mod 2
        for (int i = 0; i < 6; ++i) x *= 2 - p[0] * x;
        k.inv = ~x + 1;
        // r1 by doubling 1 (mod p) 64N times
        Limbs<N> acc{};
        acc[0] = 1;
        auto double_mod = [&p](Limbs<N>& v) {
            Limbs<N> d;
            u64 carry = add(d, v, v);
            if (carry || cmp(d, p) >= 0) sub(d, d, p);
            v = d;
        };
        for (size_t i = 0; i < 64 * N; ++i) double_mod(acc);
        k.r1 = acc;
        for (size_t i = 0; i < 64 * N; ++i) double_mod(acc);
        k.r2 = acc;
        Limbs<N> top = p;
        unsigned bits = 64 * N;
        while (bits > 0) {
            size_t limb = (bits - 1) / 64;
            if (top[limb] >> ((bits - 1) % 64) & 1) break;
            --bits;
        }
        k.bits = bits;
        return k;
    }
};

// Montgomery product: out = a * b * 2^(-64N) mod p, via schoolbook multiply
// followed by word-wise reduction.
template <size_t N>
inline void mont_mul(Limbs<N>& out, const Limbs<N>& a, const Limbs<N>& b, const FieldConstants<N>& k) {
    u64 t[2 * N + 1] = {0};
    for (size_t i = 0; i < N; ++i) {
        u64 carry = 0;
        for (size_t j = 0; j < N; ++j) {
            u128 cur = static_cast<u128>(a[i]) * b[j] + t[i + j] + carry;
            t[i + j] = static_cast<u64>(cur);
            carry = static_cast<u64>(cur >> 64);
        }
        t[i + N] = carry;
    }
    for (size_t i = 0; i < N; ++i) {
        u64 m = t[i] * k.inv;
        u64 carry = 0;
        for (size_t j = 0; j < N; ++j) {
            u128 cur = static_cast<u128>(m) * k.modulus[j] + t[i + j] + carry;
            t[i + j] = static_cast<u64>(cur);
            carry = static_cast<u64>(cur >> 64);
        }
        for (size_t j = i + N; carry != 0; ++j) {
            u128 cur = static_cast<u128>(t[j]) + carry;
            t[j] = static_cast<u64>(cur);
            carry = static_cast<u64>(cur >> 64);
        }
    }
    Limbs<N> hi;
    for (size_t i = 0; i < N; ++i) hi[i] = t[N + i];
    if (t[2 * N] != 0 || cmp(hi, k.modulus) >= 0) sub(hi, hi, k.modulus);
    out = hi;
}

template <size_t N>
inline void add_mod(Limbs<N>& out, const Limbs<N>& a, const Limbs<N>& b, const FieldConstants<N>& k) {
    u64 carry = add(out, a, b);
    if (carry || cmp(out, k.modulus) >= 0) sub(out, out, k.modulus);
}

template <size_t N>
inline void sub_mod(Limbs<N>& out, const Limbs<N>& a, const Limbs<N>& b, const FieldConstants<N>& k) {
    if (sub(out, a, b)) add(out, out, k.modulus);
}

template <size_t N>
inline void neg_mod(Limbs<N>& out, const Limbs<N>& a, const FieldConstants<N>& k) {
    if (is_zero(a)) {
        out = a;
    } else {
        sub(out, k.modulus, a);
    }
}

// Binary extended GCD inverse of a nonzero residue, variable time.
// Returns a^(-1) mod p for canonical a in [1, p).
template <size_t N>
inline Limbs<N> inv_binary(const Limbs<N>& a, const FieldConstants<N>& k) {
    const Limbs<N>& p = k.modulus;
    Limbs<N> u = a, v = p;
    Limbs<N> x1{}, x2{};
    x1[0] = 1;
    auto halve_mod = [&p](Limbs<N>& x) {
        if (x[0] & 1) {
            u64 carry = add(x, x, p);
            shr1(x, carry);
        } else {
            shr1(x, 0);
        }
    };
    Limbs<N> one{};
    one[0] = 1;
    while (u != one && v != one) {
        while (!(u[0] & 1)) {
            shr1(u, 0);
            halve_mod(x1);
        }
        while (!(v[0] & 1)) {
            shr1(v, 0);
            halve_mod(x2);
        }
        if (cmp(u, v) >= 0) {
            sub(u, u, v);
            sub_mod(x1, x1, x2, k);
        } else {
            sub(v, v, u);
            sub_mod(x2, x2, x1, k);
        }
    }
    return u == one ? x1 : x2;
}

// Montgomery-domain field element bound to a statically provided constants
// tag. Tag must expose `static const FieldConstants<N>& constants()`.
template <size_t N, class Tag>
struct Fe {
    Limbs<N> v{};

    static const FieldConstants<N>& k() { return Tag::constants(); }

    static Fe zero() { return Fe{}; }
    static Fe one() { return Fe{k().r1}; }

    static Fe from_u64(u64 x) {
        Fe r;
        r.v[0] = x;
        mont_mul(r.v, r.v, k().r2, k());
        return r;
    }

    // canonical little-endian limbs -> Montgomery domain; rejects >= p
    static Fe from_limbs(const Limbs<N>& canonical) {
        if (cmp(canonical, k().modulus) >= 0) throw InvalidEncoding("field element exceeds modulus");
        Fe r{canonical};
        mont_mul(r.v, r.v, k().r2, k());
        return r;
    }

    Limbs<N> to_limbs() const {  // leave Montgomery domain
        Limbs<N> unit{};
        unit[0] = 1;
        Limbs<N> out;
        mont_mul(out, v, unit, k());
        return out;
    }

    // big-endian canonical bytes, fixed width 8N
    Bytes to_bytes() const {
        Limbs<N> c = to_limbs();
        Bytes out(8 * N);
        for (size_t i = 0; i < N; ++i)
            for (size_t b = 0; b < 8; ++b)
                out[8 * N - 1 - (8 * i + b)] = static_cast<uint8_t>(c[i] >> (8 * b));
        return out;
    }

    static Fe from_bytes(ByteView data) {
        if (data.size() != 8 * N) throw InvalidEncoding("field element byte length");
        Limbs<N> c{};
        for (size_t i = 0; i < N; ++i)
            for (size_t b = 0; b < 8; ++b)
                c[i] |= static_cast<u64>(data[8 * N - 1 - (8 * i + b)]) << (8 * b);
        return from_limbs(c);
    }

    bool is_zero() const { return mont::is_zero(v); }
    bool operator==(const Fe& o) const { return v == o.v; }
    bool operator!=(const Fe& o) const { return v != o.v; }

    Fe operator+(const Fe& o) const {
        Fe r;
        add_mod(r.v, v, o.v, k());
        return r;
    }
    Fe operator-(const Fe& o) const {
        Fe r;
        sub_mod(r.v, v, o.v, k());
        return r;
    }
    Fe operator*(const Fe& o) const {
        Fe r;
        mont_mul(r.v, v, o.v, k());
        return r;
    }
    Fe neg() const {
        Fe r;
        neg_mod(r.v, v, k());
        return r;
    }
    Fe square() const { return *this * *this; }
    Fe dbl() const { return *this + *this; }

    Fe pow_limbs(const Limbs<N>& e) const {
        Fe result = one();
        bool started = false;
        for (size_t i = N; i-- > 0;) {
            for (int b = 63; b >= 0; --b) {
                if (started) result = result.square();
                if (e[i] >> b & 1) {
                    result = result * *this;
                    started = true;
                }
            }
        }
        return started ? result : one();
    }

    Fe inverse() const {
        if (is_zero()) throw ZeroInverse();
        // v is a*R mod p; inv_binary gives a^(-1)*R^(-1), two extra
        // Montgomery factors restore a^(-1)*R
        Limbs<N> x = inv_binary(v, k());
        Fe r;
        mont_mul(r.v, x, k().r2, k());
        mont_mul(r.v, r.v, k().r2, k());
        return r;
    }

    Fe inverse_fermat() const {
        if (is_zero()) throw ZeroInverse();
        Limbs<N> e = k().modulus;
        Limbs<N> two{};
        two[0] = 2;
        sub(e, e, two);
        return pow_limbs(e);
    }

    // canonical value > (p-1)/2, used for compressed-point sign bits
    bool is_lexicographically_largest() const {
        Limbs<N> c = to_limbs();
        Limbs<N> half;  // (p-1)/2 = p >> 1 for odd p
        const auto& p = k().modulus;
        for (size_t i = 0; i < N; ++i)
            half[i] = (p[i] >> 1) | (i + 1 < N ? p[i + 1] << 63 : 0);
        return cmp(c, half) > 0;
    }
};

}  // namespace faith::mont
