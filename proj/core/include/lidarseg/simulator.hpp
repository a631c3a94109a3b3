#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lidarseg/feature_map.hpp"
#include "lidarseg/geometry.hpp"
#include "lidarseg/image.hpp"

namespace lidarseg {

/// Vertical rectangle spanning segment a-b on the ground plane, from z_min to z_max (world frame).
struct VerticalRect {
    Eigen::Vector2d a = Eigen::Vector2d::Zero();
    Eigen::Vector2d b = Eigen::Vector2d::UnitX();
    double z_min = 0.0;
    double z_max = 1.0;
};

struct ScanPattern {
    double azimuth_min = -0.7;   // radians, 0 = +x, counter-clockwise
    double azimuth_max = 0.7;
    double azimuth_step = 0.002;
    std::vector<double> elevations;  // radians, one per ring
    double max_range = 80.0;         // meters
};

/// A synthetic scene in a world frame whose axes coincide with the LiDAR frame
/// (x forward, y left, z up). The LiDAR frame is the world frame shifted by lidar_origin.
struct SceneSpec {
    std::string frame_id = "sim";
    std::vector<Box3D> objects;          // world frame
    std::vector<VerticalRect> occluders;  // world frame
    double ground_z = 0.0;
    Vec3 lidar_origin = Vec3(0.0, 0.0, 1.9);
    ScanPattern scan;
    CalibratedCamera camera;  // LiDAR frame -> image
    double glass_pass_probability = 0.0;  // chance a ray passes through a box
    std::uint64_t seed = 0;

    void validate() const;
};

inline constexpr std::int64_t kBackground = -1;

enum class SurfaceKind : std::uint8_t { box, occluder, ground };

struct SurfaceRef {
    SurfaceKind kind = SurfaceKind::ground;
    std::size_t index = 0;
};

struct GroundTruth {
    std::vector<std::int64_t> owner;  // instance id per emitted point, or kBackground
    std::vector<bool> camera_visible;
    std::vector<SurfaceRef> surface;
    /// Instance id of the nearest surface through every pixel center, or kBackground.
    std::vector<std::int64_t> instance_mask;
    ImageSize image_size;

    std::int64_t mask_at(double u, double v) const;
};

struct SimulatedFrame {
    PointCloud cloud;              // LiDAR frame
    std::vector<Box3D> boxes;      // LiDAR frame
    CalibratedCamera camera;
    GroundTruth truth;
};

/// Camera at `position` (LiDAR frame) looking along +x rotated by `yaw`, principal point
/// at the image center.
CalibratedCamera make_forward_camera(const Vec3& position, double yaw, double focal, ImageSize size);

/// `rings` elevations evenly spaced over [min, max] (radians).
std::vector<double> uniform_elevations(double min, double max, int rings);

/// Casts every (azimuth, elevation) ray from the LiDAR and keeps the nearest hit. Rays that
/// hit nothing within scan.max_range emit no point.
SimulatedFrame raycast_scene(const SceneSpec& spec);

/// Nearest hit distance of a ray (LiDAR frame) against the scene; nullopt when nothing is hit.
std::optional<double> cast_ray(const SceneSpec& spec, const Vec3& origin, const Vec3& direction);

struct ParallaxCase {
    SimulatedFrame frame;
    ProjectedPointSet projected;
    /// Per projected entry: hidden from the camera yet landing on some instance's footprint.
    std::vector<bool> should_remove;
    /// Per projected entry: camera-visible point owned by an instance.
    std::vector<bool> visible_foreground;

    std::size_t should_remove_count() const;
};

ParallaxCase parallax_case(const SceneSpec& spec);

/// Per-cell unit feature = normalize(instance embedding + low-frequency noise).
FeatureMap synthesize_features(const GroundTruth& truth, int height, int width, int channels,
                               std::uint64_t seed, double noise_amplitude = 0.15);

/// Flat-shaded rendering of the instance mask, used as a stand-in camera image.
RgbImage synthesize_image(const GroundTruth& truth);

struct RandomSceneOptions {
    ImageSize image{450, 800};
    double focal = 600.0;
    int rings = 64;
    double azimuth_step_deg = 0.1;
    int min_cars = 2;
    int max_cars = 3;
};

/// Street scene with an elevated LiDAR, staggered cars, a low fence and a background wall.
SceneSpec random_parallax_scene(std::uint64_t seed, const RandomSceneOptions& options = {});

}  // namespace lidarseg
