#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace c2m {

struct Point {
    int x = 0;
    int y = 0;
};

// Latent-resolution real grid, row-major. Holds the potential and saliency.
struct Field {
    int width = 0;
    int height = 0;
    std::vector<double> v;

    Field() = default;
    Field(int w, int h, double fill = 0.0)
        : width(w), height(h), v(static_cast<size_t>(w) * h, fill) {}

    double& at(int y, int x) { return v[static_cast<size_t>(y) * width + x]; }
    double at(int y, int x) const { return v[static_cast<size_t>(y) * width + x]; }
    bool same_dims(const Field& o) const { return width == o.width && height == o.height; }
};

// Boolean grid at latent or pixel resolution.
struct Mask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    Mask() = default;
    Mask(int w, int h, bool fill = false)
        : width(w), height(h), bits(static_cast<size_t>(w) * h, fill ? 1 : 0) {}

    bool get(int y, int x) const { return bits[static_cast<size_t>(y) * width + x] != 0; }
    void set(int y, int x, bool b) { bits[static_cast<size_t>(y) * width + x] = b ? 1 : 0; }
    bool contains(int y, int x) const { return y >= 0 && y < height && x >= 0 && x < width; }
    size_t count() const {
        size_t n = 0;
        for (auto b : bits) n += (b != 0);
        return n;
    }
    bool empty_mask() const { return count() == 0; }
    bool same_dims(const Mask& o) const { return width == o.width && height == o.height; }
    bool operator==(const Mask&) const = default;
};

// Feathered blend weights, all alpha in [0,1].
struct SoftMask {
    int width = 0;
    int height = 0;
    std::vector<double> alpha;

    SoftMask() = default;
    SoftMask(int w, int h, double fill = 0.0)
        : width(w), height(h), alpha(static_cast<size_t>(w) * h, fill) {}

    double& at(int y, int x) { return alpha[static_cast<size_t>(y) * width + x]; }
    double at(int y, int x) const { return alpha[static_cast<size_t>(y) * width + x]; }
};

// RGB pixel buffer, values in [0,1], layout (y, x, c).
struct Image {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<double> v;

    Image() = default;
    Image(int w, int h, int c, double fill = 0.0)
        : width(w), height(h), channels(c),
          v(static_cast<size_t>(w) * h * c, fill) {}

    double& at(int y, int x, int c) {
        return v[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    double at(int y, int x, int c) const {
        return v[(static_cast<size_t>(y) * width + x) * channels + c];
    }
    bool same_dims(const Image& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }
};

// Channel-major latent tensor (C, H, W).
struct Latent {
    int channels = 0;
    int height = 0;
    int width = 0;
    std::vector<double> v;

    Latent() = default;
    Latent(int c, int h, int w, double fill = 0.0)
        : channels(c), height(h), width(w),
          v(static_cast<size_t>(c) * h * w, fill) {}

    double& at(int c, int y, int x) {
        return v[(static_cast<size_t>(c) * height + y) * width + x];
    }
    double at(int c, int y, int x) const {
        return v[(static_cast<size_t>(c) * height + y) * width + x];
    }
    bool same_dims(const Latent& o) const {
        return channels == o.channels && height == o.height && width == o.width;
    }
};

// Thrown when mask evolution cannot continue; message names the failed stage.
struct EvolutionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Thrown on file read/write failures.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace c2m
