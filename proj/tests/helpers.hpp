// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>

#include "occsim/bits.hpp"
#include "occsim/image.hpp"
#include "occsim/random.hpp"

namespace occsim::test {

inline Bits random_bits(std::size_t n, std::uint64_t seed) {
    RandomSource rng(seed);
    Bits bits(n);
    for (auto& b : bits) b = rng.bit() ? 1 : 0;
    return bits;
}

/// `image` area-downscaled by `scale` and centred on a white canvas.
struct Placed {
    GrayImage image;
    PixelBox placement;
};

inline Placed place_scaled(const GrayImage& image, double scale, int canvas_w, int canvas_h) {
    const int w = static_cast<int>(std::lround(image.width() * scale));
    const int h = static_cast<int>(std::lround(image.height() * scale));
    GrayImage canvas(canvas_w, canvas_h, 1.0);
    const PixelBox box{(canvas_w - w) / 2, (canvas_h - h) / 2, w, h};
    paste(canvas, resample_area(image, w, h), box.x, box.y);
    return {canvas, box};
}

}  // namespace occsim::test
