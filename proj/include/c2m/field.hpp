#pragma once

#include "c2m/types.hpp"

namespace c2m {

struct TauSchedule {
    double tau_init = 0.5;
    double rapid_phase_end = 0.40;  // progress fraction where the rapid segment ends
    double tau_rapid = 0.85;
    double tau_final = 0.95;
};

// Isotropic Gaussian bump with amplitude 1 at `point`; sigma is solved by
// bisection so that the area above tau_init matches target_area to within
// one cell-row of the grid.
Field init_potential(Point point, int width, int height, double target_area,
                     double tau_init);

// Two-segment piecewise-linear cut level: tau_init -> tau_rapid over
// [blend_start, rapid_phase_end], then tau_rapid -> tau_final over
// [rapid_phase_end, evolve_end]; clamped to tau_final past evolve_end.
double tau_at(const TauSchedule& s, double progress, double blend_start,
              double evolve_end);

// Divides by the maximum value; all-zero input is returned unchanged.
Field normalize_saliency(const Field& g);

// phi + lr * g_norm on ring cells, phi elsewhere.
Field elevate_potential(const Field& phi, const Field& g_norm, double lr,
                        const Mask& ring);

// Separable Gaussian, reflected borders, kernel truncated at ceil(3*sigma).
// sigma == 0 returns the input unchanged.
Field gaussian_blur_field(const Field& f, double sigma);

}  // namespace c2m
