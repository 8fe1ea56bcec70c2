#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>

#include "c2m/rng.hpp"

// Per-pixel recipe for the procedural target, shared by the parallel
// generator and the serial reference so both produce identical bits.
namespace c2m::detail {

struct TargetSpec {
    double f1x[3], f1y[3], ph1[3];
    double f2x[3], f2y[3], ph2[3];
    bool has_blob = false;
    double cx = 0.0, cy = 0.0, r = 0.0, edge = 1.0;
    double color[3] = {0.0, 0.0, 0.0};
};

inline TargetSpec make_target_spec(const std::string& prompt, int width,
                                   int height, std::uint64_t seed) {
    TargetSpec s;
    // Background is keyed by seed alone; the blob alone carries the prompt.
    std::uint64_t bg_key = rng::splitmix64(seed ^ 0xbac09d15ULL);
    for (int c = 0; c < 3; ++c) {
        std::uint64_t k = rng::combine(bg_key, static_cast<std::uint64_t>(c));
        s.f1x[c] = 1.0 + static_cast<double>(rng::splitmix64(rng::combine(k, 1)) % 3);
        s.f1y[c] = 1.0 + static_cast<double>(rng::splitmix64(rng::combine(k, 2)) % 3);
        s.ph1[c] = 6.283185307179586 * rng::unit_uniform(rng::combine(k, 3));
        s.f2x[c] = 1.0 + static_cast<double>(rng::splitmix64(rng::combine(k, 4)) % 4);
        s.f2y[c] = 1.0 + static_cast<double>(rng::splitmix64(rng::combine(k, 5)) % 4);
        s.ph2[c] = 6.283185307179586 * rng::unit_uniform(rng::combine(k, 6));
    }
    if (!prompt.empty()) {
        std::uint64_t bk =
            rng::combine(rng::splitmix64(seed ^ 0xb10bULL), rng::fnv1a(prompt));
        double u1 = rng::unit_uniform(rng::combine(bk, 1));
        double u2 = rng::unit_uniform(rng::combine(bk, 2));
        double u3 = rng::unit_uniform(rng::combine(bk, 3));
        s.has_blob = true;
        s.cx = (0.30 + 0.40 * u1) * width;
        s.cy = (0.30 + 0.40 * u2) * height;
        s.r = (0.12 + 0.10 * u3) * std::min(width, height);
        s.edge = std::max(2.0, 0.15 * s.r);
        int d = static_cast<int>(rng::splitmix64(rng::combine(bk, 7)) % 3);
        s.color[d] = 0.87 + 0.10 * rng::unit_uniform(rng::combine(bk, 8));
        s.color[(d + 1) % 3] = 0.75 + 0.08 * rng::unit_uniform(rng::combine(bk, 9));
        s.color[(d + 2) % 3] = 0.75 + 0.08 * rng::unit_uniform(rng::combine(bk, 10));
    }
    return s;
}

inline void target_pixel(const TargetSpec& s, int x, int y, int width,
                         int height, double out[3]) {
    constexpr double two_pi = 6.283185307179586;
    double fx = static_cast<double>(x) / width;
    double fy = static_cast<double>(y) / height;
    double blend = 0.0;
    if (s.has_blob) {
        double dx = (x + 0.5) - s.cx;
        double dy = (y + 0.5) - s.cy;
        double dist = std::sqrt(dx * dx + dy * dy);
        double t = std::clamp((s.r - dist) / s.edge, 0.0, 1.0);
        blend = t * t * (3.0 - 2.0 * t);
    }
    for (int c = 0; c < 3; ++c) {
        double bg = 0.30 + 0.12 * std::sin(two_pi * (s.f1x[c] * fx + s.f1y[c] * fy) + s.ph1[c]) +
                    0.08 * std::sin(two_pi * (s.f2x[c] * fx + s.f2y[c] * fy) + s.ph2[c]);
        double v = bg + (s.color[c] - bg) * blend;
        out[c] = std::clamp(v, 0.0, 1.0);
    }
}

}  // namespace c2m::detail
