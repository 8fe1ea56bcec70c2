#include "c2m/backend.hpp"

#include <cmath>
#include <stdexcept>

#include "c2m/detail/synthetic_pixel.hpp"
#include "c2m/mask.hpp"
#include "c2m/rng.hpp"

namespace c2m {

namespace {

const std::uint64_t kNoiseStream = rng::fnv1a("noise");
const std::uint64_t kDenoiseStream = rng::fnv1a("denoise");

std::string cache_key(const std::string& prompt, int width, int height) {
    return prompt + '\x1f' + std::to_string(width) + 'x' + std::to_string(height);
}

void check_latent_dims(const Latent& z) {
    if (z.channels <= 0 || z.height <= 0 || z.width <= 0) {
        throw std::invalid_argument("synthetic backend: empty latent");
    }
}

}  // namespace

const std::array<std::array<double, 3>, 4>& latent_mix_matrix() {
    static const std::array<std::array<double, 3>, 4> a = {{
        {0.60, 0.30, 0.10},
        {0.10, 0.60, 0.30},
        {0.30, 0.10, 0.60},
        {0.25, 0.25, 0.50},
    }};
    return a;
}

Image synthetic_target(const std::string& prompt, int width, int height,
                       std::uint64_t seed) {
    if (width <= 0 || height <= 0) {
        throw std::invalid_argument("synthetic_target: invalid dims");
    }
    const detail::TargetSpec spec = detail::make_target_spec(prompt, width, height, seed);
    Image img(width, height, 3);
#pragma omp parallel for collapse(2) schedule(static)
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            double px[3];
            detail::target_pixel(spec, x, y, width, height, px);
            for (int c = 0; c < 3; ++c) img.at(y, x, c) = px[c];
        }
    }
    return img;
}

std::vector<std::pair<Image, Mask>> augment_for_scoring(const Image& image,
                                                        const Mask& mask, int k) {
    if (k < 1) throw std::invalid_argument("augment_for_scoring: k < 1");
    if (image.width != mask.width || image.height != mask.height) {
        throw std::invalid_argument("augment_for_scoring: dimension mismatch");
    }
    std::vector<std::pair<Image, Mask>> out;
    out.reserve(k);
    out.emplace_back(image, mask);
    if (k >= 2) {
        Image flipped(image.width, image.height, image.channels);
        Mask mflip(mask.width, mask.height);
        for (int y = 0; y < image.height; ++y) {
            for (int x = 0; x < image.width; ++x) {
                for (int c = 0; c < image.channels; ++c) {
                    flipped.at(y, x, c) = image.at(y, image.width - 1 - x, c);
                }
                mflip.set(y, x, mask.get(y, image.width - 1 - x));
            }
        }
        out.emplace_back(std::move(flipped), std::move(mflip));
    }
    for (int j = 2; j < k; ++j) {
        double f = std::max(0.30, 0.80 - 0.10 * (j - 2));
        int cw = std::max(1, static_cast<int>(image.width * f));
        int ch = std::max(1, static_cast<int>(image.height * f));
        int ox = (image.width - cw) / 2;
        int oy = (image.height - ch) / 2;
        // Crop kept at its original position, border zeroed, mask cleared.
        Image cropped(image.width, image.height, image.channels, 0.0);
        Mask mcrop(mask.width, mask.height);
        for (int y = oy; y < oy + ch; ++y) {
            for (int x = ox; x < ox + cw; ++x) {
                for (int c = 0; c < image.channels; ++c) {
                    cropped.at(y, x, c) = image.at(y, x, c);
                }
                mcrop.set(y, x, mask.get(y, x));
            }
        }
        out.emplace_back(std::move(cropped), std::move(mcrop));
    }
    return out;
}

SyntheticBackend::SyntheticBackend(SyntheticParams params) : params_(params) {
    if (params_.n < 1) throw std::invalid_argument("synthetic backend: n < 1");
    if (params_.downscale < 1) {
        throw std::invalid_argument("synthetic backend: downscale < 1");
    }
    if (params_.latent_channels != 4) {
        throw std::invalid_argument("synthetic backend: latent_channels must be 4");
    }
    if (params_.noise_scale < 0.0 || params_.scorer_dilation_cells < 0) {
        throw std::invalid_argument("synthetic backend: invalid params");
    }
    // unmix = (A^T A)^{-1} A^T, so unmix * A = I exactly up to rounding.
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
            unmix_[i][r] = s;
        }
    }
}

Latent SyntheticBackend::encode(const Image& image) const {
    if (image.channels != 3) {
        throw std::invalid_argument("synthetic encode: expected 3 channels");
    }
    const int ds = params_.downscale;
    if (image.width % ds != 0 || image.height % ds != 0) {
        throw std::invalid_argument("synthetic encode: dims not divisible by downscale");
    }
    const int w = image.width / ds;
    const int h = image.height / ds;
    const auto& a = latent_mix_matrix();
    Latent z(4, h, w);
#pragma omp parallel for collapse(2) schedule(static)
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

Image SyntheticBackend::decode(const Latent& z) const {
    check_latent_dims(z);
    if (z.channels != 4) {
        throw std::invalid_argument("synthetic decode: expected 4 channels");
    }
    const int ds = params_.downscale;
    Image img(z.width * ds, z.height * ds, 3);
#pragma omp parallel for collapse(2) schedule(static)
    for (int cy = 0; cy < z.height; ++cy) {
        for (int cx = 0; cx < z.width; ++cx) {
            double rgb[3];
            for (int c = 0; c < 3; ++c) {
                double s = 0.0;
                for (int r = 0; r < 4; ++r) s += unmix_[c][r] * z.at(r, cy, cx);
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

Latent SyntheticBackend::noise_to(const Latent& z0, int t, std::uint64_t seed) const {
    check_latent_dims(z0);
    if (t < 0 || t > params_.n) {
        throw std::invalid_argument("noise_to: t out of range");
    }
    if (t == 0) return z0;
    const double s = static_cast<double>(t) / params_.n;
    const double sigma = params_.noise_scale * s;
    Latent out(z0.channels, z0.height, z0.width);
#pragma omp parallel for schedule(static)
    for (int c = 0; c < z0.channels; ++c) {
        for (int y = 0; y < z0.height; ++y) {
            for (int x = 0; x < z0.width; ++x) {
                size_t i = (static_cast<size_t>(c) * z0.height + y) * z0.width + x;
                double v = (1.0 - s) * z0.v[i];
                if (sigma > 0.0) {
                    v += sigma * rng::unit_normal(seed, kNoiseStream, t, i);
                }
                out.v[i] = v;
            }
        }
    }
    return out;
}

std::pair<Latent, Latent> SyntheticBackend::denoise(const Latent& z_t,
                                                    const std::string& prompt,
                                                    int t, std::uint64_t seed) const {
    check_latent_dims(z_t);
    if (t < 1 || t > params_.n) {
        throw std::invalid_argument("denoise: t out of range");
    }
    const Latent& target = target_latent(prompt, z_t.width * params_.downscale,
                                         z_t.height * params_.downscale);
    const double keep = 1.0 - 1.0 / t;  // zero at t = 1 so the last step lands exactly
    const double pull = 1.0 / t;
    const double s = static_cast<double>(t) / params_.n;
    const double sigma = params_.noise_scale * (t - 1.0) / params_.n;
    Latent next(z_t.channels, z_t.height, z_t.width);
    Latent fg(z_t.channels, z_t.height, z_t.width);
#pragma omp parallel for schedule(static)
    for (int c = 0; c < z_t.channels; ++c) {
        for (int y = 0; y < z_t.height; ++y) {
            for (int x = 0; x < z_t.width; ++x) {
                size_t i = (static_cast<size_t>(c) * z_t.height + y) * z_t.width + x;
                double v = z_t.v[i] * keep + target.v[i] * pull;
                if (sigma > 0.0) {
                    v += sigma * rng::unit_normal(seed, kDenoiseStream, t, i);
                }
                next.v[i] = v;
                fg.v[i] = (1.0 - s) * target.v[i] + s * z_t.v[i];
            }
        }
    }
    return {std::move(next), std::move(fg)};
}

ScoreResult SyntheticBackend::score(const Image& image, const Mask& pixel_mask,
                                    const std::string& prompt) const {
    if (image.width != pixel_mask.width || image.height != pixel_mask.height) {
        throw std::invalid_argument("score: dimension mismatch");
    }
    if (image.channels != 3) {
        throw std::invalid_argument("score: expected 3 channels");
    }
    const int ds = params_.downscale;
    if (image.width % ds != 0 || image.height % ds != 0) {
        throw std::invalid_argument("score: dims not divisible by downscale");
    }
    const int w = image.width / ds;
    const int h = image.height / ds;
    const Image& target = target_image(prompt, image.width, image.height);

    Mask covered(w, h);
#pragma omp parallel for collapse(2) schedule(static)
    for (int cy = 0; cy < h; ++cy) {
        for (int cx = 0; cx < w; ++cx) {
            bool any = false;
            for (int y = cy * ds; y < (cy + 1) * ds && !any; ++y) {
                for (int x = cx * ds; x < (cx + 1) * ds; ++x) {
                    if (pixel_mask.get(y, x)) {
                        any = true;
                        break;
                    }
                }
            }
            covered.set(cy, cx, any);
        }
    }
    Mask support = dilate(covered, params_.scorer_dilation_cells);
    if (support.empty_mask()) {
        return {-1.0, Field(w, h, 0.0)};
    }

    // Per-cell sums of the channel-mean squared error.
    Field cell_err(w, h);
#pragma omp parallel for collapse(2) schedule(static)
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
            cell_err.at(cy, cx) = sum;
        }
    }

    // Row partial sums combined serially keep the total thread-count invariant.
    std::vector<double> row_sum(h, 0.0);
#pragma omp parallel for schedule(static)
    for (int cy = 0; cy < h; ++cy) {
        double acc = 0.0;
        for (int cx = 0; cx < w; ++cx) {
            if (support.get(cy, cx)) acc += cell_err.at(cy, cx);
        }
        row_sum[cy] = acc;
    }
    double total_err = 0.0;
    for (int cy = 0; cy < h; ++cy) total_err += row_sum[cy];

    const double block = static_cast<double>(ds) * ds;
    const double s1 = block * static_cast<double>(support.count());
    const double mse = total_err / s1;

    // Derivative of the similarity in a cell's inclusion weight, holding the
    // support mass fixed: each cell contributes only its own error term.
    Field grad(w, h, 0.0);
#pragma omp parallel for collapse(2) schedule(static)
    for (int cy = 0; cy < h; ++cy) {
        for (int cx = 0; cx < w; ++cx) {
            if (support.get(cy, cx)) {
                grad.at(cy, cx) = -cell_err.at(cy, cx) / s1;
            }
        }
    }
    return {1.0 - mse, std::move(grad)};
}

const Image& SyntheticBackend::target_image(const std::string& prompt, int width,
                                            int height) const {
    std::string key = cache_key(prompt, width, height);
    std::lock_guard<std::mutex> lock(cache_mu_);
    auto it = image_cache_.find(key);
    if (it == image_cache_.end()) {
        it = image_cache_.emplace(key, synthetic_target(prompt, width, height,
                                                        params_.target_seed)).first;
    }
    return it->second;
}

const Latent& SyntheticBackend::target_latent(const std::string& prompt, int width,
                                              int height) const {
    std::string key = cache_key(prompt, width, height);
    {
        std::lock_guard<std::mutex> lock(cache_mu_);
        auto it = latent_cache_.find(key);
        if (it != latent_cache_.end()) return it->second;
    }
    Latent z = encode(target_image(prompt, width, height));
    std::lock_guard<std::mutex> lock(cache_mu_);
    return latent_cache_.emplace(key, std::move(z)).first->second;
}

std::unique_ptr<Backend> make_backend(const std::string& key,
                                      const SyntheticParams& params) {
    if (key == "synthetic") {
        return std::make_unique<SyntheticBackend>(params);
    }
    throw std::invalid_argument("make_backend: unknown backend key '" + key + "'");
}

}  // namespace c2m
