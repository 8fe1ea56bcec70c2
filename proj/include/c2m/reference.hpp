#pragma once

#include <cstdint>
#include <string>

#include "c2m/types.hpp"

// Serial brute-force implementations of the parallel kernels. They serve as
// oracles in the test suite and as the baseline in the benchmark target.
namespace c2m::reference {

// Direct truncated 2D convolution, reflected borders.
Field gaussian_blur_field(const Field& f, double sigma);

// Full window scan per cell.
Mask dilate(const Mask& m, int r);
Mask erode(const Mask& m, int r);

// Block means through latent_mix_matrix, plain loops.
Latent encode(const Image& image, int downscale);

// Pseudo-inverse and nearest-neighbor upsample, plain loops, clamped.
Image decode(const Latent& z, int downscale);

Image composite(const Image& edited, const Image& original, const SoftMask& soft);

Image synthetic_target(const std::string& prompt, int width, int height,
                       std::uint64_t seed);

// Similarity of `image` to `target` under per-cell block weights:
// 1 - sum(w * sqerr) / (block_pixels * #nonzero_weights). The denominator is
// the fixed support mass, so the score is linear in each weight; the
// finite-difference gradient oracle perturbs one weight at a time.
double weighted_similarity(const Image& image, const Image& target,
                           const Field& cell_weights, int downscale);

}  // namespace c2m::reference
