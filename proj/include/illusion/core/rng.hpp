#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <string_view>

namespace illusion {

// Seeded random stream with self-contained distributions so that the state
// serializes exactly and draws are identical across platforms.
// std::mt19937_64 has a portable state; the std distributions do not,
// so uniform/normal are implemented here.
class RngStream {
public:
    RngStream() : RngStream(0) {}
    explicit RngStream(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller; the second value of each pair is cached.
    double normal();

    // Uniform integer in [lo, hi], inclusive, via rejection sampling.
    int64_t uniform_int(int64_t lo, int64_t hi);

    void serialize(std::ostream& os) const;
    void deserialize(std::istream& is);

    bool operator==(const RngStream& o) const {
        return engine_ == o.engine_ && has_cached_ == o.has_cached_ && cached_ == o.cached_;
    }

    // Stable child seed for a named stream.
    static uint64_t derive_seed(uint64_t master, std::string_view name);

private:
    std::mt19937_64 engine_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace illusion
