#pragma once

#include <cstdint>
#include <string_view>

namespace gluco {

// Deterministic splitmix64 stream. Copyable; copies advance independently.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();

    // Derives an independent stream keyed by a purpose label and an index,
    // without advancing this stream. Same (seed, purpose, idx) -> same stream.
    Rng split(std::string_view purpose, std::uint64_t idx = 0) const;

    double uniform();                       // [0, 1)
    double uniform(double lo, double hi);   // [lo, hi)
    double normal(double mean, double sd);  // Box-Muller, one fresh pair per call
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);  // inclusive ends

private:
    std::uint64_t state_;
};

}  // namespace gluco
