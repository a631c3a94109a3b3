#include "lidarseg/overlay.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lidarseg/errors.hpp"

namespace lidarseg {

std::string_view to_string(OverlayMode mode) {
    switch (mode) {
        case OverlayMode::raw: return "raw";
        case OverlayMode::refined: return "refined";
        case OverlayMode::labels: return "labels";
    }
    return "raw";
}

OverlayMode overlay_mode_from_string(std::string_view name) {
    if (name == "raw") return OverlayMode::raw;
    if (name == "refined") return OverlayMode::refined;
    if (name == "labels") return OverlayMode::labels;
    throw ConfigError("unknown overlay mode '" + std::string(name) + "'");
}

Rgb depth_color(double depth, double near, double far) {
    const double t = std::clamp((depth - near) / (far - near), 0.0, 1.0);
    // blue (near) -> cyan -> green (far)
    const auto r = static_cast<std::uint8_t>(0);
    const auto g = static_cast<std::uint8_t>(std::lround(80 + 175 * t));
    const auto b = static_cast<std::uint8_t>(std::lround(255 * (1.0 - t)));
    return {r, g, b};
}

namespace {

void dot(RgbImage& img, double u, double v, int radius, Rgb c) {
    const int cx = static_cast<int>(std::floor(u));
    const int cy = static_cast<int>(std::floor(v));
    for (int y = cy - radius; y <= cy + radius; ++y) {
        if (y < 0 || y >= img.height) continue;
        for (int x = cx - radius; x <= cx + radius; ++x) {
            if (x < 0 || x >= img.width) continue;
            img.set(x, y, c);
        }
    }
}

}  // namespace

RgbImage render_overlay(const OverlayInput& input, OverlayMode mode) {
    if (input.background == nullptr && input.depth_points == nullptr) {
        throw DataError("overlay needs a camera image or depth points for the background");
    }
    RgbImage img;
    if (input.background != nullptr) {
        if (input.background->height != input.size.height || input.background->width != input.size.width) {
            throw StructuralError("camera image size does not match the calibration");
        }
        img = *input.background;
    } else {
        img = RgbImage(input.size.height, input.size.width, {16, 16, 16});
    }

    const int r = input.dot_radius;
    if (mode == OverlayMode::raw || mode == OverlayMode::refined) {
        if (input.depth_points != nullptr) {
            for (const auto& p : *input.depth_points) dot(img, p.u, p.v, r, depth_color(p.depth));
        }
    }
    if (mode == OverlayMode::refined || mode == OverlayMode::labels) {
        if (input.removed != nullptr) {
            for (const auto& p : *input.removed) dot(img, p.point.u, p.point.v, r, kRemovedColor);
        }
    }
    if (mode == OverlayMode::labels && input.labels != nullptr) {
        // Negatives first so positives stay visible where dots overlap.
        for (int pass = 0; pass < 2; ++pass) {
            const int want = pass == 0 ? kNegative : kPositive;
            for (const auto& inst : *input.labels) {
                for (const auto& s : inst.samples) {
                    if (s.label != want) continue;
                    dot(img, s.u, s.v, r, want == kPositive ? kPositiveColor : kNegativeColor);
                }
            }
        }
    }
    return img;
}

}  // namespace lidarseg
