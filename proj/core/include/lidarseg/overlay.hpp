#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "lidarseg/depth_refinement.hpp"
#include "lidarseg/image.hpp"
#include "lidarseg/label_assignment.hpp"

namespace lidarseg {

enum class OverlayMode { raw, refined, labels };

std::string_view to_string(OverlayMode mode);
OverlayMode overlay_mode_from_string(std::string_view name);

inline constexpr Rgb kPositiveColor{255, 0, 0};
inline constexpr Rgb kNegativeColor{255, 255, 0};
inline constexpr Rgb kRemovedColor{255, 140, 0};

struct OverlayInput {
    ImageSize size;
    const RgbImage* background = nullptr;        // camera image, optional
    const ProjectedPointSet* depth_points = nullptr;  // colored by depth (raw / refined kept points)
    const std::vector<RemovedPoint>* removed = nullptr;
    const std::vector<InstancePseudoLabels>* labels = nullptr;
    int dot_radius = 1;
};

/// Rasterizes point layers over the camera image, or over a dark canvas when no image is
/// given. Throws DataError when neither an image nor depth points are available.
RgbImage render_overlay(const OverlayInput& input, OverlayMode mode);

/// Near-to-far color ramp used for depth-colored points.
Rgb depth_color(double depth, double near = 2.0, double far = 60.0);

}  // namespace lidarseg
