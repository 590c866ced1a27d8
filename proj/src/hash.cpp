#include "swapbench/hash.hpp"

namespace swapbench {

std::string to_hex(std::uint64_t value) {
    static const char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[value & 0xf];
        value >>= 4;
    }
    return out;
}

std::uint64_t SplitMix64::next_below(std::uint64_t bound) {
    if (bound == 0)
        return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t v = next();
    while (v >= limit)
        v = next();
    return v % bound;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
    SplitMix64 mix(master_seed ^ (0xa0761d6478bd642fULL + index * 0xe7037ed1a0b428dbULL));
    return mix.next();
}

}  // namespace swapbench
