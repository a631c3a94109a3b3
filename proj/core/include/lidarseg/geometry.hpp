#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace lidarseg {

using Vec3 = Eigen::Vector3d;
using Mat4 = Eigen::Matrix4d;
using Mat34 = Eigen::Matrix<double, 3, 4>;

/// Projected points closer than this (camera-frame z, meters) are dropped.
inline constexpr double kMinDepth = 1e-6;

/// Slack (meters) when testing LiDAR returns against box faces. Returns off a box surface
/// sit on the face up to rounding and float32 storage error.
inline constexpr double kBoxSurfaceTolerance = 1e-4;

struct ImageSize {
    int height = 0;
    int width = 0;

    friend bool operator==(const ImageSize&, const ImageSize&) = default;
};

/// LiDAR scan in the sensor frame. `intensity` is either empty or one value per point.
struct PointCloud {
    std::vector<Vec3> points;
    std::vector<float> intensity;

    std::size_t size() const noexcept { return points.size(); }
    bool empty() const noexcept { return points.empty(); }

    /// Throws DataError on non-finite coordinates or a mismatched intensity channel.
    void validate() const;
};

/// Extrinsic T(cam <- lidar) plus a 3x4 camera matrix mapping camera frame to pixels.
struct CalibratedCamera {
    Mat4 extrinsic = Mat4::Identity();
    Mat34 camera_matrix = Mat34::Zero();
    ImageSize image_size;

    /// Throws DataError unless the bottom row is (0,0,0,1), the rotation block is
    /// orthonormal to 1e-6 and the image size is positive.
    void validate() const;

    /// camera_matrix * extrinsic.
    Mat34 full_projection() const { return camera_matrix * extrinsic; }

    /// Optical center expressed in the LiDAR frame.
    Vec3 center_in_lidar() const;
};

struct Box3D {
    Vec3 center = Vec3::Zero();
    Vec3 size = Vec3::Ones();  // length (local x), width (local y), height (z)
    double yaw = 0.0;          // radians about +z
    std::int32_t class_id = 0;
    std::int64_t instance_id = 0;

    void validate() const;
};

/// A LiDAR point on the image plane. (u, v) are sub-pixel; pixel (i, j) covers [i, i+1) x [j, j+1).
struct ProjectedPoint {
    double u = 0.0;
    double v = 0.0;
    double depth = 0.0;
    std::size_t source_index = 0;

    friend bool operator==(const ProjectedPoint&, const ProjectedPoint&) = default;
};

using ProjectedPointSet = std::vector<ProjectedPoint>;

/// Axis-aligned rectangle in pixel coordinates, inclusive on all sides.
struct Rect2D {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    bool contains(double u, double v) const noexcept {
        return u >= x_min && u <= x_max && v >= y_min && v <= y_max;
    }
    double width() const noexcept { return x_max - x_min; }
    double height() const noexcept { return y_max - y_min; }

    friend bool operator==(const Rect2D&, const Rect2D&) = default;
};

/// Projects every point through camera_matrix * extrinsic and keeps those in front of the
/// camera (depth > kMinDepth) that land inside [0, W) x [0, H). Throws DataError on
/// non-finite input.
ProjectedPointSet project_points(const PointCloud& cloud, const CalibratedCamera& cam);

/// Projects a single LiDAR-frame point without the on-image test. Returns false when the
/// point is behind the camera or numerically degenerate.
bool project_point(const Mat34& projection, const Mat4& extrinsic, const Vec3& p,
                   double& u, double& v, double& depth);

/// Corners of the yaw-rotated cuboid. Index bits: bit0 -> +x, bit1 -> +y, bit2 -> +z.
std::array<Vec3, 8> corners_of_box(const Box3D& box);

/// Enclosing image rectangle of the part of `box` in front of the camera, clamped to
/// [0, W] x [0, H]. Throws BoxNotVisible when nothing of the box is in front.
Rect2D relaxed_rect(const Box3D& box, const CalibratedCamera& cam);

/// Boundary-inclusive containment in the box's yaw-aligned frame.
bool contains_point(const Box3D& box, const Vec3& p);

/// Same as contains_point with every half extent grown by `margin`.
bool contains_point(const Box3D& box, const Vec3& p, double margin);

/// Wraps an angle into [-pi, pi).
double wrap_angle(double radians);

}  // namespace lidarseg
