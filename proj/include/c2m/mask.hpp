#pragma once

#include "c2m/types.hpp"

namespace c2m {

// bit = value > tau, strict.
Mask threshold(const Field& f, double tau);

// Chebyshev-window morphology; cells outside the grid count as false.
Mask dilate(const Mask& m, int r);
Mask erode(const Mask& m, int r);

// dilate(m, r_out) AND NOT erode(m, r_in).
Mask contour_ring(const Mask& m, int r_in, int r_out);

// Closing, small-component removal, anchor-component selection (largest when
// the anchor is uncovered), hole filling. 8-connected components,
// 4-connected holes. Throws EvolutionError on an empty input mask.
Mask postprocess_mask(const Mask& m, Point anchor, int closing_radius,
                      int min_component_cells);

// Nearest-neighbor block replication.
Mask upscale_mask(const Mask& m, int factor);

double area_fraction(const Mask& m);

// 8-connected component label per cell, -1 outside the mask; sizes by label.
std::vector<int> label_components(const Mask& m, std::vector<long>& sizes);

// Gaussian blur of the 0/1 mask at pixel resolution; sigma > 0.
SoftMask feather(const Mask& pixel_mask, double sigma);

// edited * alpha + original * (1 - alpha), clamped to [0,1].
Image composite(const Image& edited, const Image& original, const SoftMask& soft);

}  // namespace c2m
