#pragma once

#include "c2m/types.hpp"

namespace c2m {

// Per-cell selection broadcast across channels: fg where m, bg elsewhere.
Latent blend_latents(const Latent& z_fg, const Latent& z_bg, const Mask& m);

// Same blend with (predicted foreground, source latent, current mask).
Latent predict_blended_final(const Latent& z_fg_hat, const Latent& z_init,
                             const Mask& m);

}  // namespace c2m
