#include "lidarseg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "lidarseg/errors.hpp"

namespace lidarseg {

namespace {

bool finite(const Vec3& p) { return std::isfinite(p.x()) && std::isfinite(p.y()) && std::isfinite(p.z()); }

// Cuboid edges as pairs of corner indices (corners differ in exactly one bit).
constexpr std::array<std::array<int, 2>, 12> kBoxEdges = {{
    {0, 1}, {2, 3}, {4, 5}, {6, 7},
    {0, 2}, {1, 3}, {4, 6}, {5, 7},
    {0, 4}, {1, 5}, {2, 6}, {3, 7},
}};

}  // namespace

void PointCloud::validate() const {
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!finite(points[i])) {
            std::ostringstream os;
            os << "point " << i << " has a non-finite coordinate";
            throw DataError(os.str());
        }
    }
    if (!intensity.empty() && intensity.size() != points.size()) {
        throw DataError("intensity channel has " + std::to_string(intensity.size()) +
                        " values for " + std::to_string(points.size()) + " points");
    }
}

void CalibratedCamera::validate() const {
    if (!extrinsic.allFinite() || !camera_matrix.allFinite()) {
        throw DataError("camera calibration contains non-finite values");
    }
    if (extrinsic(3, 0) != 0.0 || extrinsic(3, 1) != 0.0 || extrinsic(3, 2) != 0.0 ||
        extrinsic(3, 3) != 1.0) {
        throw DataError("extrinsic bottom row must be (0, 0, 0, 1)");
    }
    const Eigen::Matrix3d r = extrinsic.topLeftCorner<3, 3>();
    const double err = (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    if (err > 1e-6) {
        std::ostringstream os;
        os << "extrinsic rotation is not orthonormal (max deviation " << err << ")";
        throw DataError(os.str());
    }
    if (image_size.height <= 0 || image_size.width <= 0) {
        throw DataError("image size must be positive");
    }
}

Vec3 CalibratedCamera::center_in_lidar() const {
    // Null space of the full 3x4 projection: P * [c; 1] = 0.
    const Mat34 p = full_projection();
    const Eigen::Matrix3d a = p.leftCols<3>();
    return -a.fullPivLu().solve(p.col(3));
}

void Box3D::validate() const {
    if (!finite(center) || !finite(size) || !std::isfinite(yaw)) {
        throw DataError("box " + std::to_string(instance_id) + " has non-finite parameters");
    }
    if (size.x() <= 0.0 || size.y() <= 0.0 || size.z() <= 0.0) {
        throw DataError("box " + std::to_string(instance_id) + " has a non-positive size");
    }
    if (yaw < -std::numbers::pi || yaw >= std::numbers::pi) {
        throw DataError("box " + std::to_string(instance_id) + " yaw outside [-pi, pi)");
    }
}

double wrap_angle(double radians) {
    double a = std::fmod(radians + std::numbers::pi, 2.0 * std::numbers::pi);
    if (a < 0.0) a += 2.0 * std::numbers::pi;
    a -= std::numbers::pi;
    // fmod can land exactly on +pi through rounding.
    if (a >= std::numbers::pi) a = -std::numbers::pi;
    return a;
}

bool project_point(const Mat34& projection, const Mat4& extrinsic, const Vec3& p,
                   double& u, double& v, double& depth) {
    const Eigen::Vector4d ph(p.x(), p.y(), p.z(), 1.0);
    depth = extrinsic.row(2).dot(ph);
    if (!(depth > kMinDepth)) return false;
    const Eigen::Vector3d img = projection * ph;
    if (!(img.z() > 0.0)) return false;
    u = img.x() / img.z();
    v = img.y() / img.z();
    return std::isfinite(u) && std::isfinite(v);
}

ProjectedPointSet project_points(const PointCloud& cloud, const CalibratedCamera& cam) {
    cloud.validate();
    const Mat34 projection = cam.full_projection();
    const double w = cam.image_size.width;
    const double h = cam.image_size.height;

    ProjectedPointSet out;
    out.reserve(cloud.size() / 4);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        double u, v, depth;
        if (!project_point(projection, cam.extrinsic, cloud.points[i], u, v, depth)) continue;
        if (u < 0.0 || u >= w || v < 0.0 || v >= h) continue;
        out.push_back({u, v, depth, i});
    }
    return out;
}

std::array<Vec3, 8> corners_of_box(const Box3D& box) {
    const double c = std::cos(box.yaw);
    const double s = std::sin(box.yaw);
    const Vec3 half = 0.5 * box.size;
    std::array<Vec3, 8> out;
    for (int k = 0; k < 8; ++k) {
        const double lx = (k & 1) ? half.x() : -half.x();
        const double ly = (k & 2) ? half.y() : -half.y();
        const double lz = (k & 4) ? half.z() : -half.z();
        out[k] = box.center + Vec3(c * lx - s * ly, s * lx + c * ly, lz);
    }
    return out;
}

Rect2D relaxed_rect(const Box3D& box, const CalibratedCamera& cam) {
    const auto corners = corners_of_box(box);
    const Mat34 projection = cam.full_projection();

    std::array<double, 8> depth;
    for (int k = 0; k < 8; ++k) {
        const Eigen::Vector4d ph(corners[k].x(), corners[k].y(), corners[k].z(), 1.0);
        depth[k] = cam.extrinsic.row(2).dot(ph);
    }

    double x_min = std::numeric_limits<double>::infinity();
    double y_min = x_min;
    double x_max = -x_min;
    double y_max = -x_min;
    bool any = false;
    auto take = [&](const Vec3& p) {
        double u, v, d;
        if (!project_point(projection, cam.extrinsic, p, u, v, d)) return;
        any = true;
        x_min = std::min(x_min, u);
        x_max = std::max(x_max, u);
        y_min = std::min(y_min, v);
        y_max = std::max(y_max, v);
    };

    for (int k = 0; k < 8; ++k) {
        if (depth[k] > kMinDepth) take(corners[k]);
    }
    if (!any) throw BoxNotVisible("box " + std::to_string(box.instance_id) + " is behind the camera");

    // Edges crossing the near plane contribute their crossing point so the rectangle
    // covers the whole visible part of a box that straddles the camera plane.
    const double clip = 2.0 * kMinDepth;
    for (const auto& [a, b] : kBoxEdges) {
        const bool a_front = depth[a] > clip;
        const bool b_front = depth[b] > clip;
        if (a_front == b_front) continue;
        const double t = (clip - depth[a]) / (depth[b] - depth[a]);
        take(corners[a] + t * (corners[b] - corners[a]));
    }

    const double w = cam.image_size.width;
    const double h = cam.image_size.height;
    Rect2D r{std::clamp(x_min, 0.0, w), std::clamp(y_min, 0.0, h), std::clamp(x_max, 0.0, w),
             std::clamp(y_max, 0.0, h)};
    return r;
}

bool contains_point(const Box3D& box, const Vec3& p, double margin) {
    const double c = std::cos(box.yaw);
    const double s = std::sin(box.yaw);
    const Vec3 d = p - box.center;
    const double lx = c * d.x() + s * d.y();
    const double ly = -s * d.x() + c * d.y();
    return std::abs(lx) <= 0.5 * box.size.x() + margin &&
           std::abs(ly) <= 0.5 * box.size.y() + margin &&
           std::abs(d.z()) <= 0.5 * box.size.z() + margin;
}

bool contains_point(const Box3D& box, const Vec3& p) { return contains_point(box, p, 0.0); }

}  // namespace lidarseg
