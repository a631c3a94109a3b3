#include "lidarseg/feature_map.hpp"

#include <cmath>
#include <string>

#include "lidarseg/errors.hpp"
#include "lidarseg/grid_sampling.hpp"

namespace lidarseg {

FeatureMap::FeatureMap(int height, int width, int channels)
    : FeatureMap(height, width, channels,
                 std::vector<float>(static_cast<std::size_t>(height) * width * channels, 0.0f)) {}

FeatureMap::FeatureMap(int height, int width, int channels, std::vector<float> values)
    : height_(height), width_(width), channels_(channels), values_(std::move(values)) {
    if (height <= 0 || width <= 0 || channels <= 0) {
        throw StructuralError("feature map dimensions must be positive");
    }
    const std::size_t expected = static_cast<std::size_t>(height) * width * channels;
    if (values_.size() != expected) {
        throw StructuralError("feature map expects " + std::to_string(expected) + " values, got " +
                              std::to_string(values_.size()));
    }
}

std::span<const float> FeatureMap::at(int x, int y) const {
    const std::size_t off = (static_cast<std::size_t>(y) * width_ + x) * channels_;
    return {values_.data() + off, static_cast<std::size_t>(channels_)};
}

std::span<float> FeatureMap::at(int x, int y) {
    const std::size_t off = (static_cast<std::size_t>(y) * width_ + x) * channels_;
    return {values_.data() + off, static_cast<std::size_t>(channels_)};
}

void FeatureMap::validate() const {
    if (channels_ < 1) throw DataError("feature map needs at least one channel");
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw DataError("feature map value " + std::to_string(i) + " is not finite");
        }
    }
}

Eigen::VectorXd FeatureMap::sample(double u, double v, ImageSize image) const {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(channels_);
    for (const GridTap& t : bilinear_taps(height_, width_, u, v, image)) {
        const float* src = values_.data() + t.cell * channels_;
        for (int c = 0; c < channels_; ++c) f[c] += t.weight * static_cast<double>(src[c]);
    }
    return f;
}

Eigen::VectorXd l2_normalized(const Eigen::VectorXd& f) {
    const double n = f.norm();
    return n > 0.0 ? Eigen::VectorXd(f / n) : f;
}

Eigen::VectorXd FeatureMap::sample_normalized(double u, double v, ImageSize image) const {
    return l2_normalized(sample(u, v, image));
}

}  // namespace lidarseg
