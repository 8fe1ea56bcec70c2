#include "c2m/reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "c2m/backend.hpp"
#include "c2m/detail/synthetic_pixel.hpp"

namespace c2m::reference {

namespace {

inline int reflect_idx(int i, int n) {
    if (n == 1) return 0;
    while (i < 0 || i >= n) {
        if (i < 0) i = -i;
        if (i >= n) i = 2 * n - 2 - i;
    }
    return i;
}

// Same pseudo-inverse construction as the backend constructor so the two
// decoders agree bit for bit.
struct Unmix {
    double m[3][4];
    Unmix() {
        const auto& a = latent_mix_matrix();
        double ata[3][3] = {};
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                for (int r = 0; r < 4; ++r) ata[i][j] += a[r][i] * a[r][j];
            }
        }
        double det = ata[0][0] * (ata[1][1] * ata[2][2] - ata[1][2] * ata[2][1]) -
                     ata[0][1] * (ata[1][0] * ata[2][2] - ata[1][2] * ata[2][0]) +
                     ata[0][2] * (ata[1][0] * ata[2][1] - ata[1][1] * ata[2][0]);
        double inv[3][3];
        inv[0][0] = (ata[1][1] * ata[2][2] - ata[1][2] * ata[2][1]) / det;
        inv[0][1] = (ata[0][2] * ata[2][1] - ata[0][1] * ata[2][2]) / det;
        inv[0][2] = (ata[0][1] * ata[1][2] - ata[0][2] * ata[1][1]) / det;
        inv[1][0] = (ata[1][2] * ata[2][0] - ata[1][0] * ata[2][2]) / det;
        inv[1][1] = (ata[0][0] * ata[2][2] - ata[0][2] * ata[2][0]) / det;
        inv[1][2] = (ata[0][2] * ata[1][0] - ata[0][0] * ata[1][2]) / det;
        inv[2][0] = (ata[1][0] * ata[2][1] - ata[1][1] * ata[2][0]) / det;
        inv[2][1] = (ata[0][1] * ata[2][0] - ata[0][0] * ata[2][1]) / det;
        inv[2][2] = (ata[0][0] * ata[1][1] - ata[0][1] * ata[1][0]) / det;
        for (int i = 0; i < 3; ++i) {
            for (int r = 0; r < 4; ++r) {
                double s = 0.0;
                for (int j = 0; j < 3; ++j) s += inv[i][j] * a[r][j];
                m[i][r] = s;
            }
        }
    }
};

const Unmix& unmix() {
    static const Unmix u;
    return u;
}

}  // namespace

Field gaussian_blur_field(const Field& f, double sigma) {
    if (sigma < 0.0) throw std::invalid_argument("gaussian_blur_field: sigma < 0");
    if (sigma == 0.0) return f;
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    for (int i = -radius; i <= radius; ++i) {
        kernel[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    }
    Field out(f.width, f.height);
    for (int y = 0; y < f.height; ++y) {
        for (int x = 0; x < f.width; ++x) {
            double acc = 0.0;
            double wsum = 0.0;
            for (int dy = -radius; dy <= radius; ++dy) {
                for (int dx = -radius; dx <= radius; ++dx) {
                    double w = kernel[dy + radius] * kernel[dx + radius];
                    acc += w * f.at(reflect_idx(y + dy, f.height),
                                    reflect_idx(x + dx, f.width));
                    wsum += w;
                }
            }
            out.at(y, x) = acc / wsum;
        }
    }
    return out;
}

Mask dilate(const Mask& m, int r) {
    if (r < 0) throw std::invalid_argument("dilate: negative radius");
    if (r == 0) return m;
    Mask out(m.width, m.height);
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            bool any = false;
            for (int dy = -r; dy <= r && !any; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    int yy = y + dy;
                    int xx = x + dx;
                    if (yy < 0 || yy >= m.height || xx < 0 || xx >= m.width) continue;
                    if (m.get(yy, xx)) {
                        any = true;
                        break;
                    }
                }
            }
            out.set(y, x, any);
        }
    }
    return out;
}

Mask erode(const Mask& m, int r) {
    if (r < 0) throw std::invalid_argument("erode: negative radius");
    if (r == 0) return m;
    Mask out(m.width, m.height);
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            // Cells whose window leaves the grid never survive.
            if (y - r < 0 || y + r >= m.height || x - r < 0 || x + r >= m.width) {
                out.set(y, x, false);
                continue;
            }
            bool all = true;
            for (int dy = -r; dy <= r && all; ++dy) {
                for (int dx = -r; dx <= r; ++dx) {
                    if (!m.get(y + dy, x + dx)) {
                        all = false;
                        break;
                    }
                }
            }
            out.set(y, x, all);
        }
    }
    return out;
}

Latent encode(const Image& image, int downscale) {
    if (image.channels != 3) {
        throw std::invalid_argument("reference encode: expected 3 channels");
    }
    const int ds = downscale;
    if (ds < 1 || image.width % ds != 0 || image.height % ds != 0) {
        throw std::invalid_argument("reference encode: bad downscale");
    }
    const int w = image.width / ds;
    const int h = image.height / ds;
    const auto& a = latent_mix_matrix();
    Latent z(4, h, w);
    for (int cy = 0; cy < h; ++cy) {
        for (int cx = 0; cx < w; ++cx) {
            double mean[3] = {0.0, 0.0, 0.0};
            for (int y = cy * ds; y < (cy + 1) * ds; ++y) {
                for (int x = cx * ds; x < (cx + 1) * ds; ++x) {
                    for (int c = 0; c < 3; ++c) mean[c] += image.at(y, x, c);
                }
            }
            const double inv_n = 1.0 / (ds * ds);
            for (int c = 0; c < 3; ++c) mean[c] *= inv_n;
            for (int r = 0; r < 4; ++r) {
                z.at(r, cy, cx) =
                    a[r][0] * mean[0] + a[r][1] * mean[1] + a[r][2] * mean[2];
            }
        }
    }
    return z;
}

Image decode(const Latent& z, int downscale) {
    if (z.channels != 4) {
        throw std::invalid_argument("reference decode: expected 4 channels");
    }
    const int ds = downscale;
    Image img(z.width * ds, z.height * ds, 3);
    const auto& u = unmix();
    for (int cy = 0; cy < z.height; ++cy) {
        for (int cx = 0; cx < z.width; ++cx) {
            double rgb[3];
            for (int c = 0; c < 3; ++c) {
                double s = 0.0;
                for (int r = 0; r < 4; ++r) s += u.m[c][r] * z.at(r, cy, cx);
                rgb[c] = std::clamp(s, 0.0, 1.0);
            }
            for (int y = cy * ds; y < (cy + 1) * ds; ++y) {
                for (int x = cx * ds; x < (cx + 1) * ds; ++x) {
                    for (int c = 0; c < 3; ++c) img.at(y, x, c) = rgb[c];
                }
            }
        }
    }
    return img;
}

Image composite(const Image& edited, const Image& original, const SoftMask& soft) {
    if (!edited.same_dims(original) || edited.width != soft.width ||
        edited.height != soft.height) {
        throw std::invalid_argument("composite: dimension mismatch");
    }
    Image out(edited.width, edited.height, edited.channels);
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

Image synthetic_target(const std::string& prompt, int width, int height,
                       std::uint64_t seed) {
    if (width <= 0 || height <= 0) {
        throw std::invalid_argument("synthetic_target: invalid dims");
    }
    const detail::TargetSpec spec = detail::make_target_spec(prompt, width, height, seed);
    Image img(width, height, 3);
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double px[3];
            detail::target_pixel(spec, x, y, width, height, px);
            for (int c = 0; c < 3; ++c) img.at(y, x, c) = px[c];
        }
    }
    return img;
}

double weighted_similarity(const Image& image, const Image& target,
                           const Field& cell_weights, int downscale) {
    if (!image.same_dims(target)) {
        throw std::invalid_argument("weighted_similarity: dimension mismatch");
    }
    const int ds = downscale;
    if (ds < 1 || image.width % ds != 0 || image.height % ds != 0) {
        throw std::invalid_argument("weighted_similarity: bad downscale");
    }
    const int w = image.width / ds;
    const int h = image.height / ds;
    if (cell_weights.width != w || cell_weights.height != h) {
        throw std::invalid_argument("weighted_similarity: weight grid mismatch");
    }
    const double block = static_cast<double>(ds) * ds;
    double num = 0.0;
    double den = 0.0;
    for (int cy = 0; cy < h; ++cy) {
        for (int cx = 0; cx < w; ++cx) {
            double sum = 0.0;
            for (int y = cy * ds; y < (cy + 1) * ds; ++y) {
                for (int x = cx * ds; x < (cx + 1) * ds; ++x) {
                    double e = 0.0;
                    for (int c = 0; c < 3; ++c) {
                        double d = image.at(y, x, c) - target.at(y, x, c);
                        e += d * d;
                    }
                    sum += e / 3.0;
                }
            }
            num += cell_weights.at(cy, cx) * sum;
            if (cell_weights.at(cy, cx) != 0.0) den += block;
        }
    }
    if (den == 0.0) throw std::invalid_argument("weighted_similarity: zero weight mass");
    return 1.0 - num / den;
}

}  // namespace c2m::reference
