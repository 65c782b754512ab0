#pragma once

#include <memory>

#include "faith/bytes.hpp"
#include "faith/sha256.hpp"

namespace faith {

// Caller-supplied randomness source. Crypto operations never reach for global
// entropy themselves; this keeps every algorithm reproducible under test.
class RngSource {
public:
    virtual ~RngSource() = default;
    virtual void fill(std::span<uint8_t> out) = 0;

    uint64_t next_u64() {
        uint8_t buf[8];
        fill(buf);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = v << 8 | buf[i];
        return v;
    }
    // uniform in [0, bound) via rejection
    uint64_t below(uint64_t bound);
};

// getrandom(2)-backed OS entropy.
class SystemRng final : public RngSource {
public:
    void fill(std::span<uint8_t> out) override;
};

// SHA-256 counter DRBG. Deterministic given the seed; test use only.
class TestRng final : public RngSource {
public:
    explicit TestRng(uint64_t seed);
    void fill(std::span<uint8_t> out) override;

private:
    Digest32 key_;
    uint64_t counter_ = 0;
    Bytes pool_;
    size_t pool_off_ = 0;
};

}  // namespace faith
