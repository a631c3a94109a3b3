#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "lidarseg/depth_refinement.hpp"
#include "lidarseg/feature_map.hpp"
#include "lidarseg/geometry.hpp"
#include "lidarseg/rng.hpp"

namespace lidarseg {

inline constexpr int kPositive = 1;
inline constexpr int kNegative = 0;
inline constexpr int kIgnore = -1;

enum class SampleOrigin : std::uint8_t { lidar, padded, propagated };

std::string_view to_string(SampleOrigin origin);
SampleOrigin origin_from_string(std::string_view name);

struct LabeledPoint {
    ProjectedPoint point;
    int label = kIgnore;
};

struct PseudoLabelSample {
    double u = 0.0;
    double v = 0.0;
    int label = kIgnore;
    SampleOrigin origin = SampleOrigin::lidar;
    std::int64_t source_index = -1;  // LiDAR point index for origin == lidar, else -1

    friend bool operator==(const PseudoLabelSample&, const PseudoLabelSample&) = default;
};

struct InstancePseudoLabels {
    std::int64_t instance_id = 0;
    std::int32_t class_id = 0;
    Rect2D rect;
    std::vector<PseudoLabelSample> samples;

    std::size_t count(int label) const;
    std::size_t count(SampleOrigin origin) const;
};

/// Similarity used by label propagation.
enum class PropagationKernel : std::uint8_t {
    distance,  // exp(-|f_i - f_c|) on L2-normalized features
    literal,   // exp(-f_i . f_c) on L2-normalized features
};

std::string_view to_string(PropagationKernel kernel);
PropagationKernel kernel_from_string(std::string_view name);

struct SamplingConfig {
    int s = 40;
    double pos_ratio = 0.5;
    double pad_sigma = 2.0;
    double tau_d = 0.7;
    int neighbor_radius = 2;
    PropagationKernel kernel = PropagationKernel::distance;
    std::uint64_t seed = 0;

    void validate() const;
    int positive_quota() const;
};

struct InOutSplit {
    ProjectedPointSet in;
    ProjectedPointSet out;
};

/// Splits refined points by whether their 3D source lies inside `box`, faces grown by
/// kBoxSurfaceTolerance.
InOutSplit split_in_out(const ProjectedPointSet& refined, const PointCloud& cloud, const Box3D& box);

/// Positive for every point of `in`; negative for points of `out` inside `rect`;
/// ignore for the rest. Order: all of `in`, then all of `out`.
std::vector<LabeledPoint> assign_labels(const ProjectedPointSet& in, const ProjectedPointSet& out,
                                        const Rect2D& rect);

/// Draws exactly cfg.s samples: round(s * pos_ratio) positives and the rest negatives,
/// uniformly without replacement. A short pool is padded with Gaussian-jittered copies of
/// its own members (clamped to `rect`); an empty pool hands its quota to the other one.
/// Throws InstanceUnlabelable when both pools are empty.
InstancePseudoLabels sample_budget(std::span<const LabeledPoint> labeled, const Rect2D& rect,
                                   const SamplingConfig& cfg, Rng& rng);

double propagation_similarity(const Eigen::VectorXd& f_i, const Eigen::VectorXd& f_c,
                              PropagationKernel kernel);

/// Appends propagated samples at integer pixels within cfg.neighbor_radius (Chebyshev) of
/// each labeled sample whose feature similarity exceeds cfg.tau_d. A pixel reached with
/// conflicting labels is kept with label -1. Original samples are never modified.
InstancePseudoLabels propagate(const InstancePseudoLabels& labels, const FeatureMap& feat,
                               ImageSize image, const SamplingConfig& cfg);

}  // namespace lidarseg
