#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lidarseg/geometry.hpp"

namespace lidarseg {

/// Rasterized depth of a projected point set. A pixel holds 0 when no point landed on it,
/// otherwise the depth of the nearest point rasterized there.
class SparseDepthMap {
public:
    static constexpr std::int64_t kNoPoint = -1;

    SparseDepthMap() = default;
    explicit SparseDepthMap(ImageSize size);

    ImageSize size() const noexcept { return size_; }
    double depth(int x, int y) const { return depth_[index(x, y)]; }
    /// Index into the ProjectedPointSet the map was built from, or kNoPoint.
    std::int64_t entry(int x, int y) const { return entry_[index(x, y)]; }
    std::size_t occupied() const noexcept { return occupied_; }

    /// Rasterizes one point at (floor(u), floor(v)); nearer depth wins on collision.
    void splat(const ProjectedPoint& p, std::int64_t entry_index);

private:
    std::size_t index(int x, int y) const {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(size_.width) +
               static_cast<std::size_t>(x);
    }

    ImageSize size_;
    std::vector<double> depth_;
    std::vector<std::int64_t> entry_;
    std::size_t occupied_ = 0;
};

/// Integer pixel window [x, x + width) x [y, y + height).
struct PixelWindow {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;

    friend bool operator==(const PixelWindow&, const PixelWindow&) = default;
};

struct RefinementConfig {
    int window_size = 32;
    int stride = 16;
    double tau_depth = 0.1;

    void validate() const;
};

/// An occupied depth-map pixel inside a window.
struct DepthPixel {
    int x = 0;
    int y = 0;
    double depth = 0.0;
    std::int64_t entry = SparseDepthMap::kNoPoint;

    friend bool operator==(const DepthPixel&, const DepthPixel&) = default;
};

struct WindowPartition {
    std::vector<DepthPixel> near;
    std::vector<DepthPixel> far;
    double d_min = 0.0;
};

struct RemovedPoint {
    ProjectedPoint point;
    std::size_t window_index = 0;  // first window that flagged the point
};

struct RefinedPointSet {
    ProjectedPointSet kept;
    std::vector<RemovedPoint> removed;
};

SparseDepthMap build_depth_map(const ProjectedPointSet& points, ImageSize size);

/// Splits the occupied pixels of `window` by relative depth (d - d_min) / d_min < tau_depth.
WindowPartition partition_window(const SparseDepthMap& depth_map, const PixelWindow& window,
                                 double tau_depth);

/// Far pixels inside the bounding box of the near pixels (inclusive).
std::vector<DepthPixel> noise_in_window(const std::vector<DepthPixel>& near,
                                        const std::vector<DepthPixel>& far);

/// Raster-order sliding windows; the last row/column of windows is clamped to the border.
std::vector<PixelWindow> sliding_windows(ImageSize size, int window_size, int stride);

/// Removes points flagged as noise by at least one window. Points that lost a
/// rasterization collision are judged with the same window statistics as the pixel
/// winner, using their own depth.
RefinedPointSet refine(const ProjectedPointSet& points, ImageSize size, const RefinementConfig& cfg);

}  // namespace lidarseg
