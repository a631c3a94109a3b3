#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace lidarseg {

using Rgb = std::array<std::uint8_t, 3>;

/// 8-bit RGB raster, row-major, interleaved.
struct RgbImage {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> data;

    RgbImage() = default;
    RgbImage(int h, int w, Rgb fill = {0, 0, 0});

    Rgb get(int x, int y) const;
    void set(int x, int y, Rgb c);
};

/// Binary PPM (P6, maxval 255).
void write_ppm(const RgbImage& image, const std::filesystem::path& path);
RgbImage read_ppm(const std::filesystem::path& path);

}  // namespace lidarseg
