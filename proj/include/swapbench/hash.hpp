#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace swapbench {

// 64-bit FNV-1a. Used for content ids, alert dedup keys and file digests.
// Not cryptographic; collisions at corpus scale (~10^4 items) are negligible.
constexpr std::uint64_t fnv1a64(std::string_view data,
                                std::uint64_t seed = 0xcbf29ce484222325ULL) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string to_hex(std::uint64_t value);

// splitmix64: tiny deterministic generator with a fully specified algorithm,
// so seeded runs reproduce bit-identically across platforms. std's engines
// are portable but its distributions are not, hence the hand-rolled bits.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Unbiased draw in [0, bound) by rejection.
    std::uint64_t next_below(std::uint64_t bound);

private:
    std::uint64_t state_;
};

// Per-iteration seed derivation: mixes the master seed with the iteration
// index so iterations can be scheduled out of order.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

}  // namespace swapbench
