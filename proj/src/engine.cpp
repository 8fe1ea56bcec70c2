#include "c2m/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "c2m/latent.hpp"
#include "c2m/mask.hpp"

namespace c2m {

void validate(const EvolutionConfig& cfg) {
    if (cfg.n < 4) throw std::invalid_argument("config: n must be >= 4");
    if (!(0.0 <= cfg.blend_start && cfg.blend_start < cfg.elevate_start &&
          cfg.elevate_start <= cfg.optional_stop &&
          cfg.optional_stop <= cfg.evolve_end && cfg.evolve_end <= 1.0)) {
        throw std::invalid_argument(
            "config: need 0 <= blend_start < elevate_start <= optional_stop <= evolve_end <= 1");
    }
    if (!(cfg.tau.tau_init < cfg.tau.tau_rapid &&
          cfg.tau.tau_rapid <= cfg.tau.tau_final)) {
        throw std::invalid_argument("config: need tau_init < tau_rapid <= tau_final");
    }
    if (!(cfg.tau.rapid_phase_end >= cfg.blend_start &&
          cfg.tau.rapid_phase_end <= cfg.evolve_end)) {
        throw std::invalid_argument(
            "config: rapid_phase_end must lie in [blend_start, evolve_end]");
    }
    if (cfg.lr < 0.0) throw std::invalid_argument("config: lr must be >= 0");
    if (cfg.ring_r_in < 0 || cfg.ring_r_out < 1) {
        throw std::invalid_argument("config: ring radii invalid");
    }
    if (cfg.downscale < 1) throw std::invalid_argument("config: downscale < 1");
    if (cfg.latent_channels < 1) throw std::invalid_argument("config: latent_channels < 1");
    if (!(cfg.target_initial_area > 0.0 && cfg.target_initial_area < 1.0)) {
        throw std::invalid_argument("config: target_initial_area must be in (0,1)");
    }
    if (cfg.seeds_per_batch < 1) throw std::invalid_argument("config: seeds_per_batch < 1");
    if (cfg.evolutions < 1) throw std::invalid_argument("config: evolutions < 1");
    if (cfg.closing_radius < 0) throw std::invalid_argument("config: closing_radius < 0");
    if (cfg.min_component_cells < 1) {
        throw std::invalid_argument("config: min_component_cells < 1");
    }
    if (cfg.phi_blur_sigma < 0.0) throw std::invalid_argument("config: phi_blur_sigma < 0");
    if (!(cfg.feather_sigma > 0.0)) throw std::invalid_argument("config: feather_sigma <= 0");
    if (cfg.scorer_dilation_cells < 0) {
        throw std::invalid_argument("config: scorer_dilation_cells < 0");
    }
    if (cfg.augmentations < 1) throw std::invalid_argument("config: augmentations < 1");
    if (cfg.noise_scale < 0.0) throw std::invalid_argument("config: noise_scale < 0");
}

SyntheticParams synthetic_params(const EvolutionConfig& cfg) {
    SyntheticParams p;
    p.n = cfg.n;
    p.noise_scale = cfg.noise_scale;
    p.downscale = cfg.downscale;
    p.latent_channels = cfg.latent_channels;
    p.scorer_dilation_cells = cfg.scorer_dilation_cells;
    p.target_seed = cfg.target_seed;
    return p;
}

namespace {

int first_blended_step(const EvolutionConfig& cfg) {
    return static_cast<int>(std::floor(cfg.n * (1.0 - cfg.blend_start)));
}

int evolve_end_step(const EvolutionConfig& cfg) {
    return static_cast<int>(std::floor(cfg.n * (1.0 - cfg.evolve_end)));
}

void check_image(const Image& image, const EvolutionConfig& cfg) {
    if (image.width <= 0 || image.height <= 0 || image.channels != 3) {
        throw std::invalid_argument("engine: expected nonempty 3-channel image");
    }
    if (image.width % cfg.downscale != 0 || image.height % cfg.downscale != 0) {
        throw std::invalid_argument("engine: image dims not divisible by downscale");
    }
}

}  // namespace

Latent bld_run(const Image& image, const std::string& prompt, const Mask& mask,
               int t_target, std::uint64_t seed, const EvolutionConfig& cfg,
               const Backend& backend) {
    check_image(image, cfg);
    const int t_bs = first_blended_step(cfg);
    if (t_target < 0 || t_target > t_bs) {
        throw std::invalid_argument("bld_run: t_target outside [0, first blended step]");
    }
    if (mask.width != image.width / cfg.downscale ||
        mask.height != image.height / cfg.downscale) {
        throw std::invalid_argument("bld_run: mask dims mismatch latent dims");
    }
    Latent z_init = backend.encode(image);
    Latent z = backend.noise_to(z_init, cfg.n, seed);
    for (int t = cfg.n; t > t_target; --t) {
        auto step = backend.denoise(z, prompt, t, seed);
        if (t - 1 <= t_bs) {
            z = blend_latents(step.first, backend.noise_to(z_init, t - 1, seed), mask);
        } else {
            z = std::move(step.first);
        }
    }
    return z;
}

std::pair<Mask, EvolutionTrace> evolve_mask(const Image& image,
                                            const std::string& prompt,
                                            Point point_px,
                                            const EvolutionConfig& cfg,
                                            const Backend& backend) {
    check_image(image, cfg);
    if (point_px.x < 0 || point_px.x >= image.width || point_px.y < 0 ||
        point_px.y >= image.height) {
        throw std::invalid_argument("evolve_mask: point outside image");
    }
    const int ds = cfg.downscale;
    const int w = image.width / ds;
    const int h = image.height / ds;
    const Point anchor{point_px.x / ds, point_px.y / ds};
    const std::uint64_t seed = cfg.master_seed;

    Field phi;
    Mask mask;
    try {
        phi = init_potential(anchor, w, h, cfg.target_initial_area, cfg.tau.tau_init);
        mask = postprocess_mask(threshold(phi, cfg.tau.tau_init), anchor,
                                cfg.closing_radius, cfg.min_component_cells);
    } catch (const std::exception& e) {
        throw EvolutionError(std::string("evolve_mask: initial mask: ") + e.what());
    }

    const int t_start = first_blended_step(cfg);
    const int t_end = evolve_end_step(cfg);
    Latent z_init = backend.encode(image);
    Latent z = bld_run(image, prompt, mask, t_start, seed, cfg, backend);

    EvolutionTrace trace;
    double prev_score = 0.0;
    bool have_prev_score = false;

    for (int t = t_start; t >= t_end; --t) {
        const double progress = 1.0 - static_cast<double>(t) / cfg.n;
        TraceRecord rec;
        rec.t = t;
        rec.progress = progress;
        rec.tau = tau_at(cfg.tau, progress, cfg.blend_start, cfg.evolve_end);

        auto [z_next, fg_hat] = backend.denoise(z, prompt, t, seed);
        const bool elevation_window =
            progress >= cfg.elevate_start && progress < cfg.evolve_end;
        bool did_rerun = false;

        if (elevation_window) {
            Image estimate = backend.decode(predict_blended_final(fg_hat, z_init, mask));
            ScoreResult sr = backend.score(estimate, upscale_mask(mask, ds), prompt);
            rec.scored = true;
            rec.score = sr.similarity;

            const bool stop_window =
                cfg.early_stop && progress >= cfg.optional_stop && have_prev_score;
            rec.stop_checked = stop_window;
            if (stop_window && sr.similarity <= prev_score) {
                // Similarity failed to improve: freeze the mask and exit.
                rec.stopped = true;
                rec.area = area_fraction(mask);
                rec.mask = mask;
                trace.records.push_back(std::move(rec));
                break;
            }

            rec.elevated = true;
            Field grad_abs(sr.gradient.width, sr.gradient.height);
            for (size_t i = 0; i < sr.gradient.v.size(); ++i) {
                grad_abs.v[i] = std::fabs(sr.gradient.v[i]);
            }
            if (cfg.lr > 0.0) {
                phi = elevate_potential(phi, normalize_saliency(grad_abs), cfg.lr,
                                        contour_ring(mask, cfg.ring_r_in, cfg.ring_r_out));
            }
            Mask updated;
            bool collapsed = false;
            try {
                updated = postprocess_mask(
                    threshold(gaussian_blur_field(phi, cfg.phi_blur_sigma), rec.tau),
                    anchor, cfg.closing_radius, cfg.min_component_cells);
            } catch (const EvolutionError&) {
                collapsed = true;
            }
            if (collapsed) {
                // Fall back to the last valid mask and stop evolving.
                rec.stopped = true;
                rec.area = area_fraction(mask);
                rec.mask = mask;
                trace.records.push_back(std::move(rec));
                break;
            }

            prev_score = sr.similarity;
            have_prev_score = true;
            const bool changed = !(updated == mask);
            mask = std::move(updated);
            if (changed && cfg.rerun) {
                z = bld_run(image, prompt, mask, t - 1, seed, cfg, backend);
                did_rerun = true;
            } else {
                z = blend_latents(z_next, backend.noise_to(z_init, t - 1, seed), mask);
            }
        } else {
            z = blend_latents(z_next, backend.noise_to(z_init, t - 1, seed), mask);
        }

        rec.rerun = did_rerun;
        rec.area = area_fraction(mask);
        rec.mask = mask;
        trace.records.push_back(std::move(rec));
    }

    trace.final_mask = mask;
    return {mask, trace};
}

CandidateSet generate_final(const Image& image, const std::string& prompt,
                            const Mask& mask, const EvolutionConfig& cfg,
                            const Backend& backend) {
    if (mask.empty_mask()) {
        throw EvolutionError("generate_final: empty mask");
    }
    const Mask pixel_mask = upscale_mask(mask, cfg.downscale);
    const SoftMask soft = feather(pixel_mask, cfg.feather_sigma);

    CandidateSet set;
    for (int j = 0; j < cfg.seeds_per_batch; ++j) {
        const std::uint64_t seed =
            cfg.master_seed + static_cast<std::uint64_t>(j + 1) * 7919ULL;
        Latent z0 = bld_run(image, prompt, mask, 0, seed, cfg, backend);
        Image out = composite(backend.decode(z0), image, soft);

        auto views = augment_for_scoring(out, pixel_mask, cfg.augmentations);
        double score_sum = 0.0;
        for (const auto& [img, msk] : views) {
            score_sum += backend.score(img, msk, prompt).similarity;
        }
        double score = score_sum / static_cast<double>(views.size());

        set.candidates.push_back({seed, std::move(out), score});
        if (set.selected < 0 ||
            score > set.candidates[set.selected].score ||
            (score == set.candidates[set.selected].score &&
             seed < set.candidates[set.selected].seed)) {
            set.selected = static_cast<int>(set.candidates.size()) - 1;
        }
    }
    return set;
}

EditResult edit(const Image& image, const std::string& prompt, Point point_px,
                const EvolutionConfig& cfg, const Backend& backend) {
    validate(cfg);
    EditResult result;
    std::vector<std::string> failures;

    for (int i = 0; i < cfg.evolutions; ++i) {
        EvolutionConfig run_cfg = cfg;
        run_cfg.master_seed =
            cfg.master_seed + static_cast<std::uint64_t>(i) * 1000003ULL;
        try {
            auto [mask, trace] = evolve_mask(image, prompt, point_px, run_cfg, backend);
            result.traces.push_back(std::move(trace));
            CandidateSet batch = generate_final(image, prompt, mask, run_cfg, backend);
            for (auto& cand : batch.candidates) {
                result.candidates.candidates.push_back(std::move(cand));
                const auto& added = result.candidates.candidates.back();
                int sel = result.candidates.selected;
                if (sel < 0 ||
                    added.score > result.candidates.candidates[sel].score ||
                    (added.score == result.candidates.candidates[sel].score &&
                     added.seed < result.candidates.candidates[sel].seed)) {
                    result.candidates.selected =
                        static_cast<int>(result.candidates.candidates.size()) - 1;
                }
            }
        } catch (const std::exception& e) {
            failures.push_back("evolution " + std::to_string(i) + ": " + e.what());
        }
    }
    if (result.candidates.selected < 0) {
        std::string msg = "edit: all evolutions failed";
        for (const auto& f : failures) msg += "; " + f;
        throw EvolutionError(msg);
    }
    result.image = result.candidates.candidates[result.candidates.selected].image;
    return result;
}

}  // namespace c2m
