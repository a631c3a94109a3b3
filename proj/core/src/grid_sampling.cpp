#include "lidarseg/grid_sampling.hpp"

#include <algorithm>
#include <cmath>

namespace lidarseg {

GridTaps bilinear_taps(int grid_h, int grid_w, double u, double v, ImageSize image) {
    const double gx = u * static_cast<double>(grid_w) / image.width - 0.5;
    const double gy = v * static_cast<double>(grid_h) / image.height - 0.5;
    const double fx0 = std::floor(gx);
    const double fy0 = std::floor(gy);
    const double ax = gx - fx0;
    const double ay = gy - fy0;
    const int x0 = static_cast<int>(fx0);
    const int y0 = static_cast<int>(fy0);

    const int xs[2] = {std::clamp(x0, 0, grid_w - 1), std::clamp(x0 + 1, 0, grid_w - 1)};
    const int ys[2] = {std::clamp(y0, 0, grid_h - 1), std::clamp(y0 + 1, 0, grid_h - 1)};
    const double wx[2] = {1.0 - ax, ax};
    const double wy[2] = {1.0 - ay, ay};

    GridTaps out;
    for (int j = 0; j < 2; ++j) {
        for (int i = 0; i < 2; ++i) {
            const double w = wx[i] * wy[j];
            if (w == 0.0) continue;
            const std::size_t cell = static_cast<std::size_t>(ys[j]) * grid_w + xs[i];
            auto it = std::find_if(out.taps.begin(), out.taps.begin() + out.count,
                                   [cell](const GridTap& t) { return t.cell == cell; });
            if (it != out.taps.begin() + out.count) {
                it->weight += w;
            } else {
                out.taps[out.count++] = {cell, w};
            }
        }
    }
    return out;
}

}  // namespace lidarseg
