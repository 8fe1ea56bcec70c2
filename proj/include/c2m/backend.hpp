#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "c2m/types.hpp"

namespace c2m {

struct ScoreResult {
    double similarity = 0.0;  // in [-1, 1]
    Field gradient;           // per latent cell
};

// Pluggable model bundle. Implementations must be deterministic given
// (inputs, seed) and safe for concurrent read-only use.
class Backend {
public:
    virtual ~Backend() = default;

    virtual Latent encode(const Image& image) const = 0;
    virtual Image decode(const Latent& z) const = 0;

    // Source latent noised to level t; t = 0 returns the input unchanged.
    virtual Latent noise_to(const Latent& z0, int t, std::uint64_t seed) const = 0;

    // One step at level t: returns (z_{t-1}, predicted final foreground).
    virtual std::pair<Latent, Latent> denoise(const Latent& z_t,
                                              const std::string& prompt, int t,
                                              std::uint64_t seed) const = 0;

    // Similarity of the masked image to the prompt plus its gradient with
    // respect to each latent mask cell. Empty mask -> (-1, zero field).
    virtual ScoreResult score(const Image& image, const Mask& pixel_mask,
                              const std::string& prompt) const = 0;
};

struct SyntheticParams {
    int n = 100;
    double noise_scale = 0.05;
    int downscale = 8;
    int latent_channels = 4;
    int scorer_dilation_cells = 1;
    std::uint64_t target_seed = 0;
};

// Deterministic procedural image keyed by hash(prompt, seed): a smooth
// low-luminance background plus, for nonempty prompts, one compact bright
// disk with a soft edge. Stands in for prompt semantics.
Image synthetic_target(const std::string& prompt, int width, int height,
                       std::uint64_t seed);

// Deterministic transform set for score averaging: identity, horizontal
// flip, then center crops re-padded with zeros (masks transformed alike).
std::vector<std::pair<Image, Mask>> augment_for_scoring(const Image& image,
                                                        const Mask& mask, int k);

// Fixed full-rank 4x3 map from block-mean RGB to latent channels.
const std::array<std::array<double, 3>, 4>& latent_mix_matrix();

// Linear encoder/decoder (8x8 block means through latent_mix_matrix and its
// pseudo-inverse), a deterministic noiser, a denoiser whose trajectory
// converges to the encoded prompt target, and an analytic-gradient scorer.
class SyntheticBackend : public Backend {
public:
    explicit SyntheticBackend(SyntheticParams params);

    Latent encode(const Image& image) const override;
    Image decode(const Latent& z) const override;
    Latent noise_to(const Latent& z0, int t, std::uint64_t seed) const override;
    std::pair<Latent, Latent> denoise(const Latent& z_t, const std::string& prompt,
                                      int t, std::uint64_t seed) const override;
    ScoreResult score(const Image& image, const Mask& pixel_mask,
                      const std::string& prompt) const override;

    const SyntheticParams& params() const { return params_; }

private:
    const Image& target_image(const std::string& prompt, int width, int height) const;
    const Latent& target_latent(const std::string& prompt, int width, int height) const;

    SyntheticParams params_;
    std::array<std::array<double, 4>, 3> unmix_;  // pseudo-inverse of the mix matrix
    mutable std::mutex cache_mu_;
    mutable std::unordered_map<std::string, Image> image_cache_;
    mutable std::unordered_map<std::string, Latent> latent_cache_;
};

// Backend selection by config key; "synthetic" is the only shipped backend.
std::unique_ptr<Backend> make_backend(const std::string& key,
                                      const SyntheticParams& params);

}  // namespace c2m
