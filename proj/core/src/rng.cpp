#include "gluco/rng.hpp"

#include <cmath>
#include <numbers>

namespace gluco {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

std::uint64_t Rng::next_u64() { return splitmix64(state_); }

Rng Rng::split(std::string_view purpose, std::uint64_t idx) const {
    std::uint64_t h = state_;
    h ^= fnv1a(purpose) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= (idx + 0x9e3779b97f4a7c15ULL) + (h << 6) + (h >> 2);
    // one scramble so nearby (purpose, idx) pairs land far apart
    std::uint64_t s = h;
    splitmix64(s);
    return Rng(s);
}

double Rng::uniform() {
    // top 53 bits give a double in [0, 1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal(double mean, double sd) {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sd * r * std::cos(2.0 * std::numbers::pi * u2);
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    // Lemire-style rejection keeps the draw unbiased.
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * span;
    auto l = static_cast<std::uint64_t>(m);
    if (l < span) {
        const std::uint64_t floor = (0 - span) % span;
        while (l < floor) {
            x = next_u64();
            m = static_cast<__uint128_t>(x) * span;
            l = static_cast<std::uint64_t>(m);
        }
    }
    return lo + static_cast<std::int64_t>(m >> 64);
}

}  // namespace gluco
