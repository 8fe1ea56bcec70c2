#include "c2m/latent.hpp"

#include <stdexcept>

namespace c2m {

Latent blend_latents(const Latent& z_fg, const Latent& z_bg, const Mask& m) {
    if (!z_fg.same_dims(z_bg)) {
        throw std::invalid_argument("blend_latents: latent dimension mismatch");
    }
    if (m.width != z_fg.width || m.height != z_fg.height) {
        throw std::invalid_argument("blend_latents: mask dimension mismatch");
    }
    Latent out(z_fg.channels, z_fg.height, z_fg.width);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < z_fg.height; ++y) {
        for (int x = 0; x < z_fg.width; ++x) {
            bool inside = m.get(y, x);
            for (int c = 0; c < z_fg.channels; ++c) {
                out.at(c, y, x) = inside ? z_fg.at(c, y, x) : z_bg.at(c, y, x);
            }
        }
    }
    return out;
}

Latent predict_blended_final(const Latent& z_fg_hat, const Latent& z_init,
                             const Mask& m) {
    return blend_latents(z_fg_hat, z_init, m);
}

}  // namespace c2m
