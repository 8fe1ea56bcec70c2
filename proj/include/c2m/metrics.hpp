#pragma once

#include <string>
#include <vector>

#include "c2m/backend.hpp"
#include "c2m/types.hpp"

namespace c2m {

struct ExtractParams {
    double threshold = 0.05;
    int pool_radius = 2;
    int min_component = 16;  // pixels
};

// Changed-region mask from an (input, output) pair: per-pixel absolute
// difference, RGB mean, binarize, min-pool then max-pool, drop small
// components, replace each component by its filled convex hull (iterated
// until every component is hull-closed).
Mask extract_edit_mask(const Image& input, const Image& output,
                       const ExtractParams& params);

double mean_l1(const Image& a, const Image& b);

class Embedder {
public:
    virtual ~Embedder() = default;
    virtual std::vector<double> embed_image(const Image& image) const = 0;
    virtual std::vector<double> embed_text(const std::string& text) const = 0;
};

// Image embedding from channel statistics; text embedding is the image
// embedding of the text's procedural target, so both live in one space.
class SyntheticEmbedder : public Embedder {
public:
    std::vector<double> embed_image(const Image& image) const override;
    std::vector<double> embed_text(const std::string& text) const override;
};

// Cosine of (image delta, text delta); zero-norm deltas give 0.
double directional_clip(const Embedder& e, const Image& in_img,
                        const Image& out_img, const std::string& in_caption,
                        const std::string& out_caption);

// Cosine of (output image embedding, output caption embedding).
double clip_out(const Embedder& e, const Image& out_img,
                const std::string& caption);

struct AlphaClipEditResult {
    double value = 0.0;
    bool empty_mask = false;
};

// extract_edit_mask, then the scorer's similarity of the masked output
// against the instruction; empty extraction yields value 0 with the flag set.
AlphaClipEditResult alpha_clip_edit(const Backend& backend, const Image& input,
                                    const Image& output,
                                    const std::string& instruction,
                                    const ExtractParams& params);

}  // namespace c2m
