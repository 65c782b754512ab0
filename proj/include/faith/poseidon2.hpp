#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace faith::poseidon2 {

// Sponge over the 64-bit Goldilocks field: width 12, rate 8, capacity 4,
// x^7 S-box, 8 full + 22 partial rounds. Round constants and the internal
// diagonal are fixed parameters derived once from a seeded SHA-256 stream.
inline constexpr size_t WIDTH = 12;
inline constexpr size_t RATE = 8;
inline constexpr size_t CAPACITY = 4;
inline constexpr size_t FULL_ROUNDS = 8;
inline constexpr size_t PARTIAL_ROUNDS = 22;

using State = std::array<uint64_t, WIDTH>;

void permute(State& s);

// Parameter access, exposed so tests can pin the derived constants.
const std::array<uint64_t, WIDTH>& internal_diagonal();
const uint64_t* round_constant_block(size_t full_round);  // WIDTH constants
uint64_t partial_round_constant(size_t partial_round);

inline constexpr uint64_t DOMAIN_LEAF = 0;
inline constexpr uint64_t DOMAIN_NODE = 1;

class Sponge {
public:
    explicit Sponge(uint64_t domain_tag) {
        state_.fill(0);
        state_[RATE] = domain_tag;
    }

    void absorb(uint64_t elem);
    void absorb(std::span<const uint64_t> elems) {
        for (uint64_t e : elems) absorb(e);
    }
    std::array<uint64_t, 4> finish();

private:
    State state_{};
    size_t pos_ = 0;
};

}  // namespace faith::poseidon2
