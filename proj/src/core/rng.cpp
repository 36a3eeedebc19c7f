#include "illusion/core/rng.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "illusion/core/errors.hpp"

namespace illusion {

namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

uint64_t fnv1a(std::string_view s) {
    uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001B3ull;
    }
    return h;
}

}  // namespace

double RngStream::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    // Box-Muller on (0,1] x [0,1)
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
}

int64_t RngStream::uniform_int(int64_t lo, int64_t hi) {
    if (lo > hi) throw ConfigError("uniform_int: empty range");
    uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<int64_t>(next_u64());  // full 64-bit range
    uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return lo + static_cast<int64_t>(v % span);
}

void RngStream::serialize(std::ostream& os) const {
    os << engine_ << ' ' << (has_cached_ ? 1 : 0) << ' ';
    // exact double round-trip via bit pattern
    uint64_t bits;
    static_assert(sizeof(bits) == sizeof(cached_));
    std::memcpy(&bits, &cached_, sizeof(bits));
    os << bits;
}

void RngStream::deserialize(std::istream& is) {
    int flag = 0;
    uint64_t bits = 0;
    is >> engine_ >> flag >> bits;
    if (!is) throw IoError("corrupt RNG stream state");
    has_cached_ = flag != 0;
    std::memcpy(&cached_, &bits, sizeof(cached_));
}

uint64_t RngStream::derive_seed(uint64_t master, std::string_view name) {
    return splitmix64(master ^ fnv1a(name));
}

}  // namespace illusion
