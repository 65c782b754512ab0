#pragma once

#include <cstdint>

namespace faith::goldilocks {

// p = 2^64 - 2^32 + 1; 2^64 = 2^32 - 1 (mod p) drives the reduction below.
inline constexpr uint64_t P = 0xffffffff00000001ULL;

inline uint64_t reduce128(unsigned __int128 x) {
    uint64_t lo = static_cast<uint64_t>(x);
    uint64_t hi = static_cast<uint64_t>(x >> 64);
    uint64_t hi_hi = hi >> 32;
    uint64_t hi_lo = hi & 0xffffffffULL;
    uint64_t t0 = lo - hi_hi;
    if (lo < hi_hi) t0 -= 0xffffffffULL;
    uint64_t t1 = hi_lo * 0xffffffffULL;
    uint64_t t2 = t0 + t1;
    if (t2 < t1) t2 += 0xffffffffULL;
    if (t2 >= P) t2 -= P;
    return t2;
}

// operands must be canonical (< P)
inline uint64_t add(uint64_t a, uint64_t b) {
    uint64_t s = a + b;
    if (s < a) s += 0xffffffffULL;
    if (s >= P) s -= P;
    return s;
}

inline uint64_t sub(uint64_t a, uint64_t b) {
    uint64_t d = a - b;
    if (a < b) d -= 0xffffffffULL;
    return d;
}

inline uint64_t mul(uint64_t a, uint64_t b) {
    return reduce128(static_cast<unsigned __int128>(a) * b);
}

inline uint64_t pow7(uint64_t x) {
    uint64_t x2 = mul(x, x);
    uint64_t x4 = mul(x2, x2);
    return mul(mul(x4, x2), x);
}

inline uint64_t pow(uint64_t base, uint64_t e) {
    uint64_t r = 1;
    while (e) {
        if (e & 1) r = mul(r, base);
        base = mul(base, base);
        e >>= 1;
    }
    return r;
}

inline uint64_t inverse(uint64_t a) { return pow(a, P - 2); }

}  // namespace faith::goldilocks
