#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "c2m/backend.hpp"
#include "c2m/field.hpp"
#include "c2m/types.hpp"

namespace c2m {

struct EvolutionConfig {
    int n = 100;                 // diffusion steps
    double blend_start = 0.25;   // progress where blending begins
    double elevate_start = 0.40; // progress where elevation begins
    double optional_stop = 0.45; // progress where the early-stop check begins
    double evolve_end = 0.50;    // progress where mask evolution stops
    TauSchedule tau;
    double lr = 0.20;
    int ring_r_in = 1;
    int ring_r_out = 2;
    int downscale = 8;
    int latent_channels = 4;
    double target_initial_area = 0.16;
    int seeds_per_batch = 8;
    int evolutions = 3;
    std::uint64_t master_seed = 0;
    int closing_radius = 2;
    int min_component_cells = 4;
    double phi_blur_sigma = 0.5;  // latent cells, applied to a copy before thresholding
    double feather_sigma = 8.0;   // pixels
    int scorer_dilation_cells = 1;
    int augmentations = 3;
    double noise_scale = 0.05;
    bool rerun = true;
    bool early_stop = true;
    std::uint64_t target_seed = 0;
    std::string backend = "synthetic";
};

// Throws std::invalid_argument on violated constraints.
void validate(const EvolutionConfig& cfg);

SyntheticParams synthetic_params(const EvolutionConfig& cfg);

struct TraceRecord {
    int t = 0;
    double progress = 0.0;
    double tau = 0.0;
    double area = 0.0;
    bool scored = false;
    double score = 0.0;
    bool rerun = false;
    bool stopped = false;
    bool elevated = false;      // mask-update branch ran this step
    bool stop_checked = false;  // early-stop comparison ran this step
    Mask mask;                  // latent-resolution snapshot after the step
};

struct EvolutionTrace {
    std::vector<TraceRecord> records;
    Mask final_mask;
};

struct Candidate {
    std::uint64_t seed = 0;
    Image image;
    double score = 0.0;
};

struct CandidateSet {
    std::vector<Candidate> candidates;
    int selected = -1;  // maximal score, ties to the lowest seed
};

struct EditResult {
    Image image;
    CandidateSet candidates;
    std::vector<EvolutionTrace> traces;
};

// Blended loop with the given fixed mask from full noise down to t_target,
// seed reset at the start. Blending applies to every produced level at or
// below floor(n * (1 - blend_start)).
Latent bld_run(const Image& image, const std::string& prompt, const Mask& mask,
               int t_target, std::uint64_t seed, const EvolutionConfig& cfg,
               const Backend& backend);

// Grows the mask from a Gaussian around the click through the blended loop:
// per-step scoring, saliency elevation on the contour ring, re-thresholding
// under the rising cut, rerun on mask change, optional early stop.
std::pair<Mask, EvolutionTrace> evolve_mask(const Image& image,
                                            const std::string& prompt,
                                            Point point_px,
                                            const EvolutionConfig& cfg,
                                            const Backend& backend);

// Runs the blended loop to completion for each derived seed, composites with
// the feathered mask, scores with augmentation averaging, picks the argmax.
CandidateSet generate_final(const Image& image, const std::string& prompt,
                            const Mask& mask, const EvolutionConfig& cfg,
                            const Backend& backend);

// Full pipeline: `evolutions` independent mask evolutions, each followed by a
// candidate batch; returns the globally best composite plus all traces.
EditResult edit(const Image& image, const std::string& prompt, Point point_px,
                const EvolutionConfig& cfg, const Backend& backend);

}  // namespace c2m
