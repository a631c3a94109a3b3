#pragma once

#include <array>
#include <cstddef>

#include "lidarseg/geometry.hpp"

namespace lidarseg {

struct GridTap {
    std::size_t cell = 0;  // row-major index y * w + x
    double weight = 0.0;
};

/// Up to four grid cells with positive bilinear weight; weights sum to 1.
struct GridTaps {
    std::array<GridTap, 4> taps{};
    int count = 0;

    const GridTap* begin() const { return taps.data(); }
    const GridTap* end() const { return taps.data() + count; }
};

/// Maps an image position (u, v) onto an h x w grid that evenly covers the image, with
/// half-pixel-center alignment: grid x = u * w / W - 0.5. Taps beyond the border are
/// clamped to the nearest edge cell and merged.
GridTaps bilinear_taps(int grid_h, int grid_w, double u, double v, ImageSize image);

}  // namespace lidarseg
