#include "c2m/mask.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "c2m/field.hpp"

namespace c2m {

Mask threshold(const Field& f, double tau) {
    Mask m(f.width, f.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < f.height; ++y) {
        for (int x = 0; x < f.width; ++x) {
            m.set(y, x, f.at(y, x) > tau);
        }
    }
    return m;
}

namespace {

// Horizontal then vertical window pass; the Chebyshev window separates.
// require_full makes it an erosion (out-of-bounds counts as false).
Mask window_pass(const Mask& m, int r, bool require_full) {
    if (r == 0 && !require_full) return m;
    Mask tmp(m.width, m.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < m.height; ++y) {
        std::vector<int> pre(m.width + 1, 0);
        for (int x = 0; x < m.width; ++x) pre[x + 1] = pre[x] + (m.get(y, x) ? 1 : 0);
        for (int x = 0; x < m.width; ++x) {
            int lo = std::max(0, x - r);
            int hi = std::min(m.width - 1, x + r);
            int cnt = pre[hi + 1] - pre[lo];
            if (require_full) {
                tmp.set(y, x, x - r >= 0 && x + r < m.width && cnt == 2 * r + 1);
            } else {
                tmp.set(y, x, cnt > 0);
            }
        }
    }
    Mask out(m.width, m.height);
#pragma omp parallel for schedule(static)
    for (int x = 0; x < m.width; ++x) {
        std::vector<int> pre(m.height + 1, 0);
        for (int y = 0; y < m.height; ++y) pre[y + 1] = pre[y] + (tmp.get(y, x) ? 1 : 0);
        for (int y = 0; y < m.height; ++y) {
            int lo = std::max(0, y - r);
            int hi = std::min(m.height - 1, y + r);
            int cnt = pre[hi + 1] - pre[lo];
            if (require_full) {
                out.set(y, x, y - r >= 0 && y + r < m.height && cnt == 2 * r + 1);
            } else {
                out.set(y, x, cnt > 0);
            }
        }
    }
    return out;
}

}  // namespace

Mask dilate(const Mask& m, int r) {
    if (r < 0) throw std::invalid_argument("dilate: negative radius");
    return window_pass(m, r, false);
}

Mask erode(const Mask& m, int r) {
    if (r < 0) throw std::invalid_argument("erode: negative radius");
    if (r == 0) return m;
    return window_pass(m, r, true);
}

Mask contour_ring(const Mask& m, int r_in, int r_out) {
    if (r_in < 0 || r_out < 1) {
        throw std::invalid_argument("contour_ring: r_in >= 0 and r_out >= 1 required");
    }
    Mask outer = dilate(m, r_out);
    Mask inner = erode(m, r_in);
    Mask ring(m.width, m.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            ring.set(y, x, outer.get(y, x) && !inner.get(y, x));
        }
    }
    return ring;
}

std::vector<int> label_components(const Mask& m, std::vector<long>& sizes) {
    std::vector<int> label(static_cast<size_t>(m.width) * m.height, -1);
    sizes.clear();
    std::vector<std::pair<int, int>> stack;
    int next = 0;
    for (int sy = 0; sy < m.height; ++sy) {
        for (int sx = 0; sx < m.width; ++sx) {
            if (!m.get(sy, sx) || label[static_cast<size_t>(sy) * m.width + sx] >= 0) {
                continue;
            }
            long sz = 0;
            stack.push_back({sy, sx});
            label[static_cast<size_t>(sy) * m.width + sx] = next;
            while (!stack.empty()) {
                auto [y, x] = stack.back();
                stack.pop_back();
                ++sz;
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        int ny = y + dy, nx = x + dx;
                        if (ny < 0 || ny >= m.height || nx < 0 || nx >= m.width) continue;
                        size_t idx = static_cast<size_t>(ny) * m.width + nx;
                        if (m.get(ny, nx) && label[idx] < 0) {
                            label[idx] = next;
                            stack.push_back({ny, nx});
                        }
                    }
                }
            }
            sizes.push_back(sz);
            ++next;
        }
    }
    return label;
}

namespace {

// 4-connected complement components that never touch the border.
Mask fill_holes(const Mask& m) {
    Mask reach(m.width, m.height);
    std::vector<std::pair<int, int>> stack;
    auto push = [&](int y, int x) {
        if (y < 0 || y >= m.height || x < 0 || x >= m.width) return;
        if (m.get(y, x) || reach.get(y, x)) return;
        reach.set(y, x, true);
        stack.push_back({y, x});
    };
    for (int x = 0; x < m.width; ++x) {
        push(0, x);
        push(m.height - 1, x);
    }
    for (int y = 0; y < m.height; ++y) {
        push(y, 0);
        push(y, m.width - 1);
    }
    while (!stack.empty()) {
        auto [y, x] = stack.back();
        stack.pop_back();
        push(y - 1, x);
        push(y + 1, x);
        push(y, x - 1);
        push(y, x + 1);
    }
    Mask out(m.width, m.height);
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            out.set(y, x, m.get(y, x) || !reach.get(y, x));
        }
    }
    return out;
}

}  // namespace

Mask postprocess_mask(const Mask& m, Point anchor, int closing_radius,
                      int min_component_cells) {
    if (m.empty_mask()) {
        throw EvolutionError("postprocess_mask: empty mask (mask collapse)");
    }
    if (!m.contains(anchor.y, anchor.x)) {
        throw std::invalid_argument("postprocess_mask: anchor out of bounds");
    }
    Mask closed = erode(dilate(m, closing_radius), closing_radius);

    std::vector<long> sizes;
    std::vector<int> label = label_components(closed, sizes);
    Mask kept(m.width, m.height);
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            int l = label[static_cast<size_t>(y) * m.width + x];
            if (l >= 0 && sizes[l] >= min_component_cells) kept.set(y, x, true);
        }
    }
    if (kept.empty_mask()) {
        throw EvolutionError("postprocess_mask: all components below size threshold");
    }

    int chosen;
    if (kept.get(anchor.y, anchor.x)) {
        chosen = label[static_cast<size_t>(anchor.y) * m.width + anchor.x];
    } else {
        chosen = -1;
        long best = -1;
        for (size_t l = 0; l < sizes.size(); ++l) {
            if (sizes[l] >= min_component_cells && sizes[l] > best) {
                best = sizes[l];
                chosen = static_cast<int>(l);
            }
        }
    }
    Mask single(m.width, m.height);
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            single.set(y, x, label[static_cast<size_t>(y) * m.width + x] == chosen);
        }
    }
    return fill_holes(single);
}

Mask upscale_mask(const Mask& m, int factor) {
    if (factor < 1) throw std::invalid_argument("upscale_mask: factor < 1");
    Mask out(m.width * factor, m.height * factor);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            out.set(y, x, m.get(y / factor, x / factor));
        }
    }
    return out;
}

double area_fraction(const Mask& m) {
    size_t total = static_cast<size_t>(m.width) * m.height;
    if (total == 0) return 0.0;
    return static_cast<double>(m.count()) / static_cast<double>(total);
}

SoftMask feather(const Mask& pixel_mask, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("feather: sigma must be > 0");
    Field f(pixel_mask.width, pixel_mask.height);
    for (int y = 0; y < f.height; ++y) {
        for (int x = 0; x < f.width; ++x) {
            f.at(y, x) = pixel_mask.get(y, x) ? 1.0 : 0.0;
        }
    }
    Field blurred = gaussian_blur_field(f, sigma);
    SoftMask out(f.width, f.height);
    for (size_t i = 0; i < blurred.v.size(); ++i) {
        out.alpha[i] = std::clamp(blurred.v[i], 0.0, 1.0);
    }
    return out;
}

Image composite(const Image& edited, const Image& original, const SoftMask& soft) {
    if (!edited.same_dims(original) || edited.width != soft.width ||
        edited.height != soft.height) {
        throw std::invalid_argument("composite: dimension mismatch");
    }
    Image out(edited.width, edited.height, edited.channels);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < edited.height; ++y) {
        for (int x = 0; x < edited.width; ++x) {
            double a = soft.at(y, x);
            for (int c = 0; c < edited.channels; ++c) {
                double v = edited.at(y, x, c) * a + original.at(y, x, c) * (1.0 - a);
                out.at(y, x, c) = std::clamp(v, 0.0, 1.0);
            }
        }
    }
    return out;
}

}  // namespace c2m
