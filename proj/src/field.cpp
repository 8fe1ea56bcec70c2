#include "c2m/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace c2m {

namespace {

// Cells above tau for a Gaussian of the given sigma; counted from squared
// distances so equal-distance cells cross the threshold together.
long count_above(int width, int height, Point p, double sigma, double tau) {
    // exp(-d2 / (2 sigma^2)) > tau  <=>  d2 < -2 sigma^2 ln(tau), tau in (0,1)
    if (tau >= 1.0) return 0;
    double limit;
    if (tau <= 0.0) {
        limit = 1e300;
    } else {
        limit = -2.0 * sigma * sigma * std::log(tau);
    }
    long n = 0;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double dx = x - p.x;
            double dy = y - p.y;
            if (dx * dx + dy * dy < limit) ++n;
        }
    }
    return n;
}

}  // namespace

Field init_potential(Point point, int width, int height, double target_area,
                     double tau_init) {
    if (width <= 0 || height <= 0) {
        throw std::invalid_argument("init_potential: dims must be positive");
    }
    if (point.x < 0 || point.x >= width || point.y < 0 || point.y >= height) {
        throw std::invalid_argument("init_potential: point out of bounds");
    }
    if (!(target_area > 0.0 && target_area < 1.0)) {
        throw std::invalid_argument("init_potential: target_area must be in (0,1)");
    }

    const long total = static_cast<long>(width) * height;
    const long target = std::lround(target_area * static_cast<double>(total));
    const long tol = width;  // one cell-row

    double lo = 1e-3;
    double hi = 4.0 * std::max(width, height);
    long n_lo = count_above(width, height, point, lo, tau_init);
    long n_hi = count_above(width, height, point, hi, tau_init);
    if (n_hi < target - tol || n_lo > target + tol) {
        throw std::invalid_argument("init_potential: target_area unreachable");
    }
    for (int iter = 0; iter < 200; ++iter) {
        double mid = 0.5 * (lo + hi);
        long n_mid = count_above(width, height, point, mid, tau_init);
        if (n_mid < target) {
            lo = mid;
            n_lo = n_mid;
        } else {
            hi = mid;
            n_hi = n_mid;
        }
    }
    double sigma = (std::labs(n_lo - target) <= std::labs(n_hi - target)) ? lo : hi;
    long best = std::min(std::labs(n_lo - target), std::labs(n_hi - target));
    if (best > tol) {
        throw std::invalid_argument("init_potential: target_area unreachable");
    }

    Field phi(width, height);
    const double inv = 1.0 / (2.0 * sigma * sigma);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double dx = x - point.x;
            double dy = y - point.y;
            phi.at(y, x) = std::exp(-(dx * dx + dy * dy) * inv);
        }
    }
    return phi;
}

double tau_at(const TauSchedule& s, double progress, double blend_start,
              double evolve_end) {
    if (progress < blend_start || progress > 1.0) {
        throw std::invalid_argument("tau_at: progress outside [blend_start, 1]");
    }
    if (progress <= s.rapid_phase_end) {
        double w = s.rapid_phase_end - blend_start;
        double f = (w > 0.0) ? (progress - blend_start) / w : 1.0;
        return s.tau_init + f * (s.tau_rapid - s.tau_init);
    }
    if (progress <= evolve_end) {
        double w = evolve_end - s.rapid_phase_end;
        double f = (w > 0.0) ? (progress - s.rapid_phase_end) / w : 1.0;
        return s.tau_rapid + f * (s.tau_final - s.tau_rapid);
    }
    return s.tau_final;
}

Field normalize_saliency(const Field& g) {
    double max_v = 0.0;
    for (double v : g.v) {
        if (v < 0.0) {
            throw std::invalid_argument("normalize_saliency: negative input");
        }
        max_v = std::max(max_v, v);
    }
    if (max_v <= 0.0) return g;
    Field out(g.width, g.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
            out.at(y, x) = g.at(y, x) / max_v;
        }
    }
    return out;
}

Field elevate_potential(const Field& phi, const Field& g_norm, double lr,
                        const Mask& ring) {
    if (!phi.same_dims(g_norm) || phi.width != ring.width ||
        phi.height != ring.height) {
        throw std::invalid_argument("elevate_potential: dimension mismatch");
    }
    if (!(lr > 0.0)) {
        throw std::invalid_argument("elevate_potential: lr must be positive");
    }
    Field out = phi;
#pragma omp parallel for schedule(static)
    for (int y = 0; y < phi.height; ++y) {
        for (int x = 0; x < phi.width; ++x) {
            if (ring.get(y, x)) out.at(y, x) = phi.at(y, x) + lr * g_norm.at(y, x);
        }
    }
    return out;
}

namespace {

// Index folding for reflected borders (edge sample not repeated).
inline int reflect_idx(int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * n - 2 - i;
    }
    return i;
}

}  // namespace

Field gaussian_blur_field(const Field& f, double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("gaussian_blur_field: sigma < 0");
    if (sigma == 0.0) return f;

    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    double ksum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
        ksum += kernel[i + radius];
    }
    // Dividing the accumulated window by the accumulated kernel sum (instead
    // of pre-normalizing) keeps constant-one inputs exactly one.

    Field tmp(f.width, f.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < f.height; ++y) {
        for (int x = 0; x < f.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                acc += kernel[i + radius] * f.at(y, reflect_idx(x + i, f.width));
            }
            tmp.at(y, x) = acc / ksum;
        }
    }
    Field out(f.width, f.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < f.height; ++y) {
        for (int x = 0; x < f.width; ++x) {
            double acc = 0.0;
            for (int i = -radius; i <= radius; ++i) {
                acc += kernel[i + radius] * tmp.at(reflect_idx(y + i, f.height), x);
            }
            out.at(y, x) = acc / ksum;
        }
    }
    return out;
}

}  // namespace c2m
