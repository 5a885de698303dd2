#pragma once

#include <cstdint>

namespace hqsim {

// SplitMix64 (Steele/Lea/Burton). Picked as the workload/duration generator
// because the algorithm is tiny and fully specified, so a trace can be
// reproduced from its seed by any other implementation.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform in [0, 1), 53 bits
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // uniform integer in [0, n); modulo bias is irrelevant at workload scales
    std::uint64_t next_below(std::uint64_t n) { return n ? next() % n : 0; }

private:
    std::uint64_t state_;
};

} // namespace hqsim
