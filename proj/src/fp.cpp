#include "faith/fp.hpp"

namespace faith::bls {

using mont::FieldConstants;
using mont::Limbs;

namespace {

constexpr Limbs<6> P_LIMBS = {0xb9feffffffffaaabULL, 0x1eabfffeb153ffffULL,
                              0x6730d2a0f6b0f624ULL, 0x64774b84f38512bfULL,
                              0x4b1ba7b6434bacd7ULL, 0x1a0111ea397fe69aULL};

constexpr Limbs<4> R_LIMBS = {0xffffffff00000001ULL, 0x53bda402fffe5bfeULL,
                              0x3339d80809a1d805ULL, 0x73eda753299d7d48ULL};

struct FpExponents {
    Limbs<6> p_plus_1_div_4;
    Limbs<6> p_minus_3_div_4;
    Limbs<6> p_minus_1_div_2;

    FpExponents() {
        Limbs<6> tmp;
        Limbs<6> small{};
        small[0] = 1;
        mont::add(tmp, P_LIMBS, small);
        mont::shr1(tmp, 0);
        mont::shr1(tmp, 0);
        p_plus_1_div_4 = tmp;
        small[0] = 3;
        mont::sub(tmp, P_LIMBS, small);
        mont::shr1(tmp, 0);
        mont::shr1(tmp, 0);
        p_minus_3_div_4 = tmp;
        small[0] = 1;
        mont::sub(tmp, P_LIMBS, small);
        mont::shr1(tmp, 0);
        p_minus_1_div_2 = tmp;
    }
};

const FpExponents& fp_exponents() {
    static const FpExponents e;
    return e;
}

// gamma1[i] = xi^(i*(p-1)/6), the w^i coefficient correction for the
// p-power Frobenius
struct FrobeniusTable {
    std::array<Fp2, 6> gamma1;

    FrobeniusTable() {
        Limbs<6> small{};
        small[0] = 1;
        Limbs<6> e;
        mont::sub(e, P_LIMBS, small);
        e = mont::div_exact_u64(e, 6);
        Fp2 xi{Fp::one(), Fp::one()};
        gamma1[0] = Fp2::one();
        gamma1[1] = pow_ext(xi, e);
        for (size_t i = 2; i < 6; ++i) gamma1[i] = gamma1[i - 1] * gamma1[1];
    }
};

const FrobeniusTable& frobenius_table() {
    static const FrobeniusTable t;
    return t;
}

}  // namespace

const FieldConstants<6>& FpTag::constants() {
    static const FieldConstants<6> k = FieldConstants<6>::make(P_LIMBS);
    return k;
}

const FieldConstants<4>& FrTag::constants() {
    static const FieldConstants<4> k = FieldConstants<4>::make(R_LIMBS);
    return k;
}

Fp12 frobenius(const Fp12& f) {
    const auto& g = frobenius_table().gamma1;
    Fp12 r;
    r.c0.c0 = f.c0.c0.conjugate();
    r.c1.c0 = f.c1.c0.conjugate() * g[1];
    r.c0.c1 = f.c0.c1.conjugate() * g[2];
    r.c1.c1 = f.c1.c1.conjugate() * g[3];
    r.c0.c2 = f.c0.c2.conjugate() * g[4];
    r.c1.c2 = f.c1.c2.conjugate() * g[5];
    return r;
}

std::optional<Fp> sqrt_fp(const Fp& a) {
    if (a.is_zero()) return Fp::zero();
    Fp x = a.pow_limbs(fp_exponents().p_plus_1_div_4);
    if (x.square() != a) return std::nullopt;
    return x;
}

std::optional<Fp2> sqrt_fp2(const Fp2& a) {
    if (a.is_zero()) return Fp2::zero();
    const auto& e = fp_exponents();
    Fp2 a1 = pow_ext(a, e.p_minus_3_div_4);
    Fp2 x0 = a1 * a;
    Fp2 alpha = a1 * x0;
    Fp2 x;
    if (alpha == Fp2::one().neg()) {
        x = Fp2{x0.c1.neg(), x0.c0};  // multiply by u
    } else {
        x = pow_ext(alpha + Fp2::one(), e.p_minus_1_div_2) * x0;
    }
    if (x.square() != a) return std::nullopt;
    return x;
}

std::array<Fp, 12> fp12_coeffs(const Fp12& f) {
    return {f.c0.c0.c0, f.c0.c0.c1, f.c0.c1.c0, f.c0.c1.c1, f.c0.c2.c0, f.c0.c2.c1,
            f.c1.c0.c0, f.c1.c0.c1, f.c1.c1.c0, f.c1.c1.c1, f.c1.c2.c0, f.c1.c2.c1};
}

Fp12 fp12_from_coeffs(const std::array<Fp, 12>& c) {
    Fp12 f;
    f.c0.c0 = {c[0], c[1]};
    f.c0.c1 = {c[2], c[3]};
    f.c0.c2 = {c[4], c[5]};
    f.c1.c0 = {c[6], c[7]};
    f.c1.c1 = {c[8], c[9]};
    f.c1.c2 = {c[10], c[11]};
    return f;
}

}  // namespace faith::bls
