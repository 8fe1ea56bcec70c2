#include "c2m/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "c2m/mask.hpp"

namespace c2m {

namespace {

struct Pt {
    long x, y;
};

long cross(const Pt& o, const Pt& a, const Pt& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Andrew monotone chain, counter-clockwise, collinear points dropped.
std::vector<Pt> convex_hull(std::vector<Pt> pts) {
    std::sort(pts.begin(), pts.end(), [](const Pt& a, const Pt& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Pt& a, const Pt& b) {
                              return a.x == b.x && a.y == b.y;
                          }),
              pts.end());
    const size_t n = pts.size();
    if (n < 3) return pts;
    std::vector<Pt> hull(2 * n);
    size_t k = 0;
    for (size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    size_t lower = k + 1;
    for (size_t i = n - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

// Integer-exact inclusive containment for a counter-clockwise convex polygon.
bool inside_hull(const std::vector<Pt>& hull, long x, long y) {
    Pt p{x, y};
    for (size_t i = 0; i < hull.size(); ++i) {
        const Pt& a = hull[i];
        const Pt& b = hull[(i + 1) % hull.size()];
        if (cross(a, b, p) < 0) return false;
    }
    return true;
}

// One pass: every component replaced by its filled convex hull. Components
// with fewer than three non-collinear cells are kept as they are.
bool hull_close_components(Mask& m) {
    std::vector<long> sizes;
    std::vector<int> label = label_components(m, sizes);
    if (sizes.empty()) return false;

    std::vector<std::vector<Pt>> comp_pts(sizes.size());
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            int l = label[static_cast<size_t>(y) * m.width + x];
            if (l >= 0) comp_pts[l].push_back({x, y});
        }
    }
    bool changed = false;
    for (const auto& pts : comp_pts) {
        std::vector<Pt> hull = convex_hull(pts);
        if (hull.size() < 3) continue;
        long min_x = hull[0].x, max_x = hull[0].x;
        long min_y = hull[0].y, max_y = hull[0].y;
        for (const auto& p : hull) {
            min_x = std::min(min_x, p.x);
            max_x = std::max(max_x, p.x);
            min_y = std::min(min_y, p.y);
            max_y = std::max(max_y, p.y);
        }
        for (long y = min_y; y <= max_y; ++y) {
            for (long x = min_x; x <= max_x; ++x) {
                if (!m.get(static_cast<int>(y), static_cast<int>(x)) &&
                    inside_hull(hull, x, y)) {
                    m.set(static_cast<int>(y), static_cast<int>(x), true);
                    changed = true;
                }
            }
        }
    }
    return changed;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("cosine: embedding dimension mismatch");
    }
    double na = std::sqrt(dot(a, a));
    double nb = std::sqrt(dot(b, b));
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot(a, b) / (na * nb);
}

}  // namespace

Mask extract_edit_mask(const Image& input, const Image& output,
                       const ExtractParams& params) {
    if (!input.same_dims(output)) {
        throw std::invalid_argument("extract_edit_mask: dimension mismatch");
    }
    Mask diff(input.width, input.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < input.height; ++y) {
        for (int x = 0; x < input.width; ++x) {
            double d = 0.0;
            for (int c = 0; c < input.channels; ++c) {
                d += std::fabs(input.at(y, x, c) - output.at(y, x, c));
            }
            diff.set(y, x, d / input.channels > params.threshold);
        }
    }
    Mask pooled = dilate(erode(diff, params.pool_radius), params.pool_radius);

    std::vector<long> sizes;
    std::vector<int> label = label_components(pooled, sizes);
    Mask kept(pooled.width, pooled.height);
    for (int y = 0; y < pooled.height; ++y) {
        for (int x = 0; x < pooled.width; ++x) {
            int l = label[static_cast<size_t>(y) * pooled.width + x];
            if (l >= 0 && sizes[l] >= params.min_component) kept.set(y, x, true);
        }
    }
    // Iterate: hulls may overlap and merge into non-convex unions.
    while (hull_close_components(kept)) {
    }
    return kept;
}

double mean_l1(const Image& a, const Image& b) {
    if (!a.same_dims(b)) {
        throw std::invalid_argument("mean_l1: dimension mismatch");
    }
    std::vector<double> row_sum(a.height, 0.0);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < a.height; ++y) {
        double acc = 0.0;
        for (int x = 0; x < a.width; ++x) {
            for (int c = 0; c < a.channels; ++c) {
                acc += std::fabs(a.at(y, x, c) - b.at(y, x, c));
            }
        }
        row_sum[y] = acc;
    }
    double total = 0.0;
    for (double s : row_sum) total += s;
    return total / (static_cast<double>(a.width) * a.height * a.channels);
}

std::vector<double> SyntheticEmbedder::embed_image(const Image& image) const {
    const size_t pixels = static_cast<size_t>(image.width) * image.height;
    std::vector<double> mean(3, 0.0), var(3, 0.0);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            for (int c = 0; c < std::min(image.channels, 3); ++c) {
                mean[c] += image.at(y, x, c);
            }
        }
    }
    for (int c = 0; c < 3; ++c) mean[c] /= static_cast<double>(pixels);
    for (int y = 0; y < image.height; ++y) {
        for (int x = 0; x < image.width; ++x) {
            for (int c = 0; c < std::min(image.channels, 3); ++c) {
                double d = image.at(y, x, c) - mean[c];
                var[c] += d * d;
            }
        }
    }
    for (int c = 0; c < 3; ++c) var[c] /= static_cast<double>(pixels);
    double lum = (mean[0] + mean[1] + mean[2]) / 3.0;
    // Constant last component keeps the norm nonzero for any image.
    return {mean[0], mean[1], mean[2],
            std::sqrt(var[0]), std::sqrt(var[1]), std::sqrt(var[2]),
            lum, 0.5};
}

std::vector<double> SyntheticEmbedder::embed_text(const std::string& text) const {
    return embed_image(synthetic_target(text, 64, 64, 0));
}

double directional_clip(const Embedder& e, const Image& in_img,
                        const Image& out_img, const std::string& in_caption,
                        const std::string& out_caption) {
    if (in_caption.empty() || out_caption.empty()) {
        throw std::invalid_argument("directional_clip: empty caption");
    }
    std::vector<double> di = e.embed_image(out_img);
    std::vector<double> d0 = e.embed_image(in_img);
    std::vector<double> ti = e.embed_text(out_caption);
    std::vector<double> t0 = e.embed_text(in_caption);
    for (size_t i = 0; i < di.size(); ++i) di[i] -= d0[i];
    for (size_t i = 0; i < ti.size(); ++i) ti[i] -= t0[i];
    return cosine(di, ti);
}

double clip_out(const Embedder& e, const Image& out_img,
                const std::string& caption) {
    if (caption.empty()) {
        throw std::invalid_argument("clip_out: empty caption");
    }
    return cosine(e.embed_image(out_img), e.embed_text(caption));
}

AlphaClipEditResult alpha_clip_edit(const Backend& backend, const Image& input,
                                    const Image& output,
                                    const std::string& instruction,
                                    const ExtractParams& params) {
    Mask mask = extract_edit_mask(input, output, params);
    if (mask.empty_mask()) {
        return {0.0, true};
    }
    return {backend.score(output, mask, instruction).similarity, false};
}

}  // namespace c2m
