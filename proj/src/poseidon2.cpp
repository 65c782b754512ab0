#include "faith/poseidon2.hpp"

#include "faith/goldilocks.hpp"
#include "faith/sha256.hpp"

namespace faith::poseidon2 {

namespace gl = faith::goldilocks;

namespace {

// Deterministic parameter stream: sha256(seed || counter) blocks, each
// yielding four big-endian u64 candidates, rejection-sampled below p.
struct ParamStream {
    const char* seed;
    uint64_t counter = 0;
    Digest32 block{};
    size_t off = 32;

    explicit ParamStream(const char* s) : seed(s) {}

    uint64_t next() {
        for (;;) {
            if (off + 8 > 32) {
                block = TaggedHash(seed).add_u64(counter++).finish();
                off = 0;
            }
            uint64_t v = 0;
            for (int i = 0; i < 8; ++i) v = v << 8 | block[off + static_cast<size_t>(i)];
            off += 8;
            if (v < gl::P) return v;
        }
    }
};

struct Params {
    std::array<uint64_t, FULL_ROUNDS * WIDTH> external_rc;
    std::array<uint64_t, PARTIAL_ROUNDS> internal_rc;
    std::array<uint64_t, WIDTH> diag;

    Params() {
        ParamStream s("FAITH-POSEIDON2-GOLDILOCKS-t12-v1");
        for (auto& c : external_rc) c = s.next();
        for (auto& c : internal_rc) c = s.next();
        for (auto& d : diag) d = s.next();
    }
};

const Params& params() {
    static const Params p;
    return p;
}

// M4 = [[5,7,1,3],[4,6,1,1],[1,3,5,7],[1,1,4,6]] applied to each 4-block via
// the mul-free addition chain, then each lane accumulates the cross-block
// column sums, realizing circ(2*M4, M4, M4).
inline void apply_external(State& st) {
    for (size_t b = 0; b < WIDTH; b += 4) {
        uint64_t a0 = st[b], a1 = st[b + 1], a2 = st[b + 2], a3 = st[b + 3];
        uint64_t t0 = gl::add(a0, a1);
        uint64_t t1 = gl::add(a2, a3);
        uint64_t t2 = gl::add(gl::add(a1, a1), t1);
        uint64_t t3 = gl::add(gl::add(a3, a3), t0);
        uint64_t q1 = gl::add(t1, t1);
        uint64_t t4 = gl::add(gl::add(q1, q1), t3);
        uint64_t q0 = gl::add(t0, t0);
        uint64_t t5 = gl::add(gl::add(q0, q0), t2);
        st[b] = gl::add(t3, t5);
        st[b + 1] = t5;
        st[b + 2] = gl::add(t2, t4);
        st[b + 3] = t4;
    }
    uint64_t sums[4];
    for (size_t j = 0; j < 4; ++j)
        sums[j] = gl::add(st[j], gl::add(st[4 + j], st[8 + j]));
    for (size_t i = 0; i < WIDTH; ++i) st[i] = gl::add(st[i], sums[i % 4]);
}

// all-ones matrix plus diag(mu): out_i = sum(state) + mu_i * state_i
inline void apply_internal(State& st, const std::array<uint64_t, WIDTH>& mu) {
    using u128 = unsigned __int128;
    u128 acc = 0;
    for (uint64_t v : st) acc += v;
    uint64_t total = gl::reduce128(acc);
    for (size_t i = 0; i < WIDTH; ++i)
        st[i] = gl::reduce128(u128(mu[i]) * st[i] + total);
}

}  // namespace

const std::array<uint64_t, WIDTH>& internal_diagonal() { return params().diag; }

const uint64_t* round_constant_block(size_t full_round) {
    return &params().external_rc[full_round * WIDTH];
}

uint64_t partial_round_constant(size_t partial_round) {
    return params().internal_rc[partial_round];
}

void permute(State& st) {
    const Params& p = params();
    apply_external(st);
    for (size_t r = 0; r < FULL_ROUNDS / 2; ++r) {
        const uint64_t* rc = &p.external_rc[r * WIDTH];
        for (size_t i = 0; i < WIDTH; ++i) st[i] = gl::pow7(gl::add(st[i], rc[i]));
        apply_external(st);
    }
    for (size_t r = 0; r < PARTIAL_ROUNDS; ++r) {
        st[0] = gl::pow7(gl::add(st[0], p.internal_rc[r]));
        apply_internal(st, p.diag);
    }
    for (size_t r = FULL_ROUNDS / 2; r < FULL_ROUNDS; ++r) {
        const uint64_t* rc = &p.external_rc[r * WIDTH];
        for (size_t i = 0; i < WIDTH; ++i) st[i] = gl::pow7(gl::add(st[i], rc[i]));
        apply_external(st);
    }
}

void Sponge::absorb(uint64_t elem) {
    state_[pos_] = gl::add(state_[pos_], elem);
    if (++pos_ == RATE) {
        permute(state_);
        pos_ = 0;
    }
}

std::array<uint64_t, 4> Sponge::finish() {
    if (pos_ != 0) {
        permute(state_);
        pos_ = 0;
    }
    return {state_[0], state_[1], state_[2], state_[3]};
}

}  // namespace faith::poseidon2
