#pragma once

#include <string>

#include "c2m/types.hpp"

namespace c2m {

// 8-bit RGB PNG in, values scaled to [0,1]; grayscale/palette/alpha inputs
// are expanded or stripped to RGB. Throws IoError.
Image load_image(const std::string& path);

// Round-half-up quantization to 8-bit RGB. Throws IoError.
void save_image(const std::string& path, const Image& image);

// 1-bit grayscale PNG, 0 = outside, 255 = inside. Throws IoError.
void save_mask(const std::string& path, const Mask& mask);

// Any PNG; a pixel is inside when its channel mean is >= 128. Throws IoError.
Mask load_mask(const std::string& path);

}  // namespace c2m
