#pragma once

#include <optional>

#include "faith/mont.hpp"

namespace faith::bls {

// BLS12-381 base field (381-bit p) and scalar field (255-bit r).
struct FpTag {
    static const mont::FieldConstants<6>& constants();
};
struct FrTag {
    static const mont::FieldConstants<4>& constants();
};

using Fp = mont::Fe<6, FpTag>;
using Fr = mont::Fe<4, FrTag>;

template <class F, size_t N>
F pow_ext(const F& base, const mont::Limbs<N>& e) {
    F r = F::one();
    bool started = false;
    for (size_t i = N; i-- > 0;) {
        for (int b = 63; b >= 0; --b) {
            if (started) r = r.square();
            if (e[i] >> b & 1) {
                r = r * base;
                started = true;
            }
        }
    }
    return r;
}

// Fp2 = Fp[u] / (u^2 + 1)
struct Fp2 {
    Fp c0, c1;

    static Fp2 zero() { return {Fp::zero(), Fp::zero()}; }
    static Fp2 one() { return {Fp::one(), Fp::zero()}; }

    bool is_zero() const { return c0.is_zero() && c1.is_zero(); }
    bool operator==(const Fp2& o) const { return c0 == o.c0 && c1 == o.c1; }
    bool operator!=(const Fp2& o) const { return !(*this == o); }

    Fp2 operator+(const Fp2& o) const { return {c0 + o.c0, c1 + o.c1}; }
    Fp2 operator-(const Fp2& o) const { return {c0 - o.c0, c1 - o.c1}; }
    Fp2 neg() const { return {c0.neg(), c1.neg()}; }
    Fp2 dbl() const { return {c0.dbl(), c1.dbl()}; }

    Fp2 operator*(const Fp2& o) const {
        Fp t0 = c0 * o.c0;
        Fp t1 = c1 * o.c1;
        return {t0 - t1, (c0 + c1) * (o.c0 + o.c1) - t0 - t1};
    }
    Fp2 square() const {
        Fp a = (c0 + c1) * (c0 - c1);
        Fp b = c0 * c1;
        return {a, b + b};
    }
    Fp2 mul_fp(const Fp& s) const { return {c0 * s, c1 * s}; }
    Fp2 conjugate() const { return {c0, c1.neg()}; }

    // multiply by xi = 1 + u, the cubic nonresidue used to build Fp6
    Fp2 mul_by_xi() const { return {c0 - c1, c0 + c1}; }

    Fp2 inverse() const {
        Fp norm = c0.square() + c1.square();
        Fp t = norm.inverse();
        return {c0 * t, (c1 * t).neg()};
    }

    bool is_lexicographically_largest() const {
        return c1.is_lexicographically_largest() ||
               (c1.is_zero() && c0.is_lexicographically_largest());
    }
};

// Fp6 = Fp2[v] / (v^3 - xi)
struct Fp6 {
    Fp2 c0, c1, c2;

    static Fp6 zero() { return {Fp2::zero(), Fp2::zero(), Fp2::zero()}; }
    static Fp6 one() { return {Fp2::one(), Fp2::zero(), Fp2::zero()}; }

    bool is_zero() const { return c0.is_zero() && c1.is_zero() && c2.is_zero(); }
    bool operator==(const Fp6& o) const { return c0 == o.c0 && c1 == o.c1 && c2 == o.c2; }
    bool operator!=(const Fp6& o) const { return !(*this == o); }

    Fp6 operator+(const Fp6& o) const { return {c0 + o.c0, c1 + o.c1, c2 + o.c2}; }
    Fp6 operator-(const Fp6& o) const { return {c0 - o.c0, c1 - o.c1, c2 - o.c2}; }
    Fp6 neg() const { return {c0.neg(), c1.neg(), c2.neg()}; }

    Fp6 operator*(const Fp6& o) const {
        Fp2 t0 = c0 * o.c0;
        Fp2 t1 = c1 * o.c1;
        Fp2 t2 = c2 * o.c2;
        Fp2 r0 = t0 + ((c1 + c2) * (o.c1 + o.c2) - t1 - t2).mul_by_xi();
        Fp2 r1 = (c0 + c1) * (o.c0 + o.c1) - t0 - t1 + t2.mul_by_xi();
        Fp2 r2 = (c0 + c2) * (o.c0 + o.c2) - t0 - t2 + t1;
        return {r0, r1, r2};
    }
    Fp6 square() const {
        Fp2 s0 = c0.square();
        Fp2 s1 = (c0 * c1).dbl();
        Fp2 s2 = (c0 - c1 + c2).square();
        Fp2 s3 = (c1 * c2).dbl();
        Fp2 s4 = c2.square();
        return {s0 + s3.mul_by_xi(), s1 + s4.mul_by_xi(), s1 + s2 + s3 - s0 - s4};
    }
    Fp6 mul_fp2(const Fp2& s) const { return {c0 * s, c1 * s, c2 * s}; }

    // multiply by v: (c0, c1, c2) -> (xi*c2, c0, c1)
    Fp6 mul_by_v() const { return {c2.mul_by_xi(), c0, c1}; }

    Fp6 inverse() const {
        Fp2 t0 = c0.square() - (c1 * c2).mul_by_xi();
        Fp2 t1 = c2.square().mul_by_xi() - c0 * c1;
        Fp2 t2 = c1.square() - c0 * c2;
        Fp2 f = (c0 * t0 + ((c2 * t1 + c1 * t2).mul_by_xi())).inverse();
        return {t0 * f, t1 * f, t2 * f};
    }
};

// Fp12 = Fp6[w] / (w^2 - v)
struct Fp12 {
    Fp6 c0, c1;

    static Fp12 zero() { return {Fp6::zero(), Fp6::zero()}; }
    static Fp12 one() { return {Fp6::one(), Fp6::zero()}; }

    bool operator==(const Fp12& o) const { return c0 == o.c0 && c1 == o.c1; }
    bool operator!=(const Fp12& o) const { return !(*this == o); }
    bool is_one() const { return *this == one(); }
    bool is_zero() const { return c0.is_zero() && c1.is_zero(); }

    Fp12 operator*(const Fp12& o) const {
        Fp6 t0 = c0 * o.c0;
        Fp6 t1 = c1 * o.c1;
        return {t0 + t1.mul_by_v(), (c0 + c1) * (o.c0 + o.c1) - t0 - t1};
    }
    Fp12 square() const {
        Fp6 ab = c0 * c1;
        Fp6 t = (c0 + c1) * (c0 + c1.mul_by_v());
        return {t - ab - ab.mul_by_v(), ab + ab};
    }

    // f^(p^6): negates the odd w-coefficients; inverse on the cyclotomic subgroup
    Fp12 conjugate() const { return {c0, c1.neg()}; }

    Fp12 inverse() const {
        Fp6 t = (c0.square() - c1.square().mul_by_v()).inverse();
        return {c0 * t, (c1 * t).neg()};
    }
};

// p-power Frobenius endomorphism on Fp12
Fp12 frobenius(const Fp12& f);

// Square roots; empty when the element is a non-residue. p = 3 mod 4.
std::optional<Fp> sqrt_fp(const Fp& a);
std::optional<Fp2> sqrt_fp2(const Fp2& a);

// 12 base-field coefficients in flatten order:
// c0.c0.c0, c0.c0.c1, c0.c1.c0, c0.c1.c1, c0.c2.c0, c0.c2.c1,
// c1.c0.c0, c1.c0.c1, c1.c1.c0, c1.c1.c1, c1.c2.c0, c1.c2.c1
std::array<Fp, 12> fp12_coeffs(const Fp12& f);
Fp12 fp12_from_coeffs(const std::array<Fp, 12>& c);

}  // namespace faith::bls
