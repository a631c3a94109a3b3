#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "lidarseg/geometry.hpp"

namespace lidarseg {

/// Dense H x W x C feature tensor, channel-fastest. The grid evenly covers the camera
/// image, so it may be coarser than the image itself.
class FeatureMap {
public:
    FeatureMap() = default;
    FeatureMap(int height, int width, int channels);
    FeatureMap(int height, int width, int channels, std::vector<float> values);

    int height() const noexcept { return height_; }
    int width() const noexcept { return width_; }
    int channels() const noexcept { return channels_; }
    bool empty() const noexcept { return values_.empty(); }

    std::span<const float> at(int x, int y) const;
    std::span<float> at(int x, int y);
    const std::vector<float>& values() const noexcept { return values_; }

    /// Throws DataError on non-finite values or channels < 1.
    void validate() const;

    /// Bilinear feature at image position (u, v).
    Eigen::VectorXd sample(double u, double v, ImageSize image) const;

    /// sample() followed by L2 normalization; a zero vector stays zero.
    Eigen::VectorXd sample_normalized(double u, double v, ImageSize image) const;

private:
    int height_ = 0;
    int width_ = 0;
    int channels_ = 0;
    std::vector<float> values_;
};

Eigen::VectorXd l2_normalized(const Eigen::VectorXd& f);

}  // namespace lidarseg
