#include "faith/rng.hpp"

#include <sys/random.h>

#include <stdexcept>

namespace faith {

uint64_t RngSource::below(uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("below(0)");
    uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    for (;;) {
        uint64_t v = next_u64();
        if (v < limit) return v % bound;
    }
}

void SystemRng::fill(std::span<uint8_t> out) {
    size_t done = 0;
    while (done < out.size()) {
        ssize_t n = getrandom(out.data() + done, out.size() - done, 0);
        if (n < 0) throw std::runtime_error("getrandom failed");
        done += static_cast<size_t>(n);
    }
}

TestRng::TestRng(uint64_t seed) {
    Bytes s;
    append_u64le(s, seed);
    key_ = TaggedHash("FAITH-TEST-RNG-v1").add(s).finish();
}

void TestRng::fill(std::span<uint8_t> out) {
    size_t done = 0;
    while (done < out.size()) {
        if (pool_off_ == pool_.size()) {
            Digest32 block = TaggedHash("FAITH-TEST-RNG-BLOCK").add(key_).add_u64(counter_++).finish();
            pool_.assign(block.begin(), block.end());
            pool_off_ = 0;
        }
        size_t take = std::min(out.size() - done, pool_.size() - pool_off_);
        std::memcpy(out.data() + done, pool_.data() + pool_off_, take);
        done += take;
        pool_off_ += take;
    }
}

}  // namespace faith
