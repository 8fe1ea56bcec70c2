#pragma once

#include <cmath>
#include <cstdint>
#include <string>

// Counter-based deterministic noise: every draw is a pure function of
// (seed, stream, step, index), so reruns and seed resets need no state.
namespace c2m::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t combine(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Uniform in [0,1), 53-bit mantissa.
inline double unit_uniform(std::uint64_t key) {
    return static_cast<double>(splitmix64(key) >> 11) * 0x1.0p-53;
}

// Standard normal via Box-Muller on two hashed uniforms.
inline double unit_normal(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t step, std::uint64_t index) {
    std::uint64_t k = combine(combine(seed, stream), combine(step, index));
    double u1 = unit_uniform(combine(k, 1));
    double u2 = unit_uniform(combine(k, 2));
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace c2m::rng
