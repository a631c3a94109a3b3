#include "lidarseg/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>

#include "lidarseg/errors.hpp"
#include "lidarseg/rng.hpp"

namespace lidarseg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kHitEpsilon = 1e-9;

struct Hit {
    double t = kInf;
    SurfaceRef surface;
};

// Scene primitives moved into the LiDAR frame.
struct LocalScene {
    std::vector<Box3D> boxes;
    std::vector<VerticalRect> occluders;
    double ground_z = 0.0;
};

LocalScene to_lidar_frame(const SceneSpec& spec) {
    LocalScene s;
    s.boxes = spec.objects;
    for (auto& b : s.boxes) b.center -= spec.lidar_origin;
    s.occluders = spec.occluders;
    for (auto& o : s.occluders) {
        o.a -= spec.lidar_origin.head<2>();
        o.b -= spec.lidar_origin.head<2>();
        o.z_min -= spec.lidar_origin.z();
        o.z_max -= spec.lidar_origin.z();
    }
    s.ground_z = spec.ground_z - spec.lidar_origin.z();
    return s;
}

// Slab test in the box frame; returns the entry distance when the origin is outside.
double intersect_box(const Box3D& box, const Vec3& o, const Vec3& d) {
    const double c = std::cos(box.yaw);
    const double s = std::sin(box.yaw);
    const Vec3 rel = o - box.center;
    const Vec3 lo(c * rel.x() + s * rel.y(), -s * rel.x() + c * rel.y(), rel.z());
    const Vec3 ld(c * d.x() + s * d.y(), -s * d.x() + c * d.y(), d.z());
    const Vec3 half = 0.5 * box.size;

    double t_near = -kInf;
    double t_far = kInf;
    for (int k = 0; k < 3; ++k) {
        if (std::abs(ld[k]) < 1e-15) {
            if (std::abs(lo[k]) > half[k]) return kInf;
            continue;
        }
        double t0 = (-half[k] - lo[k]) / ld[k];
        double t1 = (half[k] - lo[k]) / ld[k];
        if (t0 > t1) std::swap(t0, t1);
        t_near = std::max(t_near, t0);
        t_far = std::min(t_far, t1);
        if (t_near > t_far) return kInf;
    }
    if (t_near > kHitEpsilon) return t_near;
    return kInf;
}

double intersect_occluder(const VerticalRect& r, const Vec3& o, const Vec3& d) {
    const Eigen::Vector2d e = r.b - r.a;
    const Eigen::Vector2d n(-e.y(), e.x());
    const double denom = n.x() * d.x() + n.y() * d.y();
    if (std::abs(denom) < 1e-15) return kInf;
    const double t = (n.x() * (r.a.x() - o.x()) + n.y() * (r.a.y() - o.y())) / denom;
    if (!(t > kHitEpsilon)) return kInf;
    const Vec3 p = o + t * d;
    const double along = ((p.x() - r.a.x()) * e.x() + (p.y() - r.a.y()) * e.y()) / e.squaredNorm();
    if (along < 0.0 || along > 1.0 || p.z() < r.z_min || p.z() > r.z_max) return kInf;
    return t;
}

double intersect_ground(double ground_z, const Vec3& o, const Vec3& d) {
    if (!(d.z() < 0.0)) return kInf;
    const double t = (ground_z - o.z()) / d.z();
    return t > kHitEpsilon ? t : kInf;
}

// Nearest hit; boxes for which `skip_box` returns true are transparent for this ray.
template <typename SkipBox>
Hit nearest_hit(const LocalScene& scene, const Vec3& o, const Vec3& d, SkipBox&& skip_box) {
    Hit best;
    for (std::size_t i = 0; i < scene.boxes.size(); ++i) {
        const double t = intersect_box(scene.boxes[i], o, d);
        if (t < best.t && !skip_box(i)) best = {t, {SurfaceKind::box, i}};
    }
    for (std::size_t i = 0; i < scene.occluders.size(); ++i) {
        const double t = intersect_occluder(scene.occluders[i], o, d);
        if (t < best.t) best = {t, {SurfaceKind::occluder, i}};
    }
    const double tg = intersect_ground(scene.ground_z, o, d);
    if (tg < best.t) best = {tg, {SurfaceKind::ground, 0}};
    return best;
}

Hit nearest_hit(const LocalScene& scene, const Vec3& o, const Vec3& d) {
    return nearest_hit(scene, o, d, [](std::size_t) { return false; });
}

std::int64_t owner_of(const LocalScene& scene, const SurfaceRef& s) {
    return s.kind == SurfaceKind::box ? scene.boxes[s.index].instance_id : kBackground;
}

// Ray through a pixel position, in the LiDAR frame, pointing in front of the camera.
Vec3 pixel_ray(const Eigen::Matrix3d& inv_a, const Mat4& extrinsic, double u, double v) {
    Vec3 d = inv_a * Vec3(u, v, 1.0);
    if (extrinsic.block<1, 3>(2, 0).dot(d) < 0.0) d = -d;
    return d.normalized();
}

}  // namespace

void SceneSpec::validate() const {
    camera.validate();
    if (!(lidar_origin.z() > ground_z)) throw DataError("lidar origin must be above the ground plane");
    if (!(scan.azimuth_step > 0.0)) throw DataError("scan azimuth step must be > 0");
    if (!(scan.azimuth_max >= scan.azimuth_min)) throw DataError("scan azimuth range is empty");
    if (scan.elevations.empty()) throw DataError("scan needs at least one elevation ring");
    if (!(scan.max_range > 0.0)) throw DataError("scan max range must be > 0");
    if (glass_pass_probability < 0.0 || glass_pass_probability > 1.0) {
        throw DataError("glass pass probability must lie in [0, 1]");
    }
    for (const auto& b : objects) b.validate();
    for (const auto& o : occluders) {
        if ((o.b - o.a).norm() <= 0.0 || !(o.z_max > o.z_min)) throw DataError("degenerate occluder");
    }
}

std::int64_t GroundTruth::mask_at(double u, double v) const {
    const int x = static_cast<int>(std::floor(u));
    const int y = static_cast<int>(std::floor(v));
    if (x < 0 || y < 0 || x >= image_size.width || y >= image_size.height) return kBackground;
    return instance_mask[static_cast<std::size_t>(y) * image_size.width + x];
}

CalibratedCamera make_forward_camera(const Vec3& position, double yaw, double focal, ImageSize size) {
    // LiDAR axes (x fwd, y left, z up) -> camera axes (x right, y down, z fwd).
    Eigen::Matrix3d base;
    base << 0, -1, 0,
            0, 0, -1,
            1, 0, 0;
    const Eigen::Matrix3d rz = Eigen::AngleAxisd(-yaw, Vec3::UnitZ()).toRotationMatrix();
    const Eigen::Matrix3d r = base * rz;

    CalibratedCamera cam;
    cam.extrinsic.setIdentity();
    cam.extrinsic.topLeftCorner<3, 3>() = r;
    cam.extrinsic.topRightCorner<3, 1>() = -r * position;
    cam.camera_matrix << focal, 0, size.width / 2.0, 0,
                         0, focal, size.height / 2.0, 0,
                         0, 0, 1, 0;
    cam.image_size = size;
    return cam;
}

std::vector<double> uniform_elevations(double min, double max, int rings) {
    std::vector<double> out;
    if (rings <= 0) return out;
    if (rings == 1) return {0.5 * (min + max)};
    for (int k = 0; k < rings; ++k) out.push_back(min + (max - min) * k / (rings - 1));
    return out;
}

std::optional<double> cast_ray(const SceneSpec& spec, const Vec3& origin, const Vec3& direction) {
    const LocalScene scene = to_lidar_frame(spec);
    const Hit h = nearest_hit(scene, origin, direction.normalized());
    if (h.t == kInf) return std::nullopt;
    return h.t;
}

SimulatedFrame raycast_scene(const SceneSpec& spec) {
    spec.validate();
    const LocalScene scene = to_lidar_frame(spec);
    const ScanPattern& scan = spec.scan;

    SimulatedFrame frame;
    frame.camera = spec.camera;
    frame.boxes = scene.boxes;
    GroundTruth& gt = frame.truth;
    gt.image_size = spec.camera.image_size;

    const auto n_az = static_cast<std::size_t>(
        std::floor((scan.azimuth_max - scan.azimuth_min) / scan.azimuth_step + 1e-9)) + 1;

    std::uint64_t ray_index = 0;
    for (double elevation : scan.elevations) {
        const double ce = std::cos(elevation);
        const double se = std::sin(elevation);
        for (std::size_t k = 0; k < n_az; ++k, ++ray_index) {
            const double az = scan.azimuth_min + static_cast<double>(k) * scan.azimuth_step;
            const Vec3 d(ce * std::cos(az), ce * std::sin(az), se);

            Hit hit;
            if (spec.glass_pass_probability > 0.0) {
                Rng rng(mix64(spec.seed ^ mix64(ray_index)));
                std::vector<bool> skip(scene.boxes.size());
                for (std::size_t b = 0; b < skip.size(); ++b) {
                    skip[b] = rng.uniform() < spec.glass_pass_probability;
                }
                hit = nearest_hit(scene, Vec3::Zero(), d, [&](std::size_t b) { return skip[b]; });
            } else {
                hit = nearest_hit(scene, Vec3::Zero(), d);
            }
            if (hit.t == kInf || hit.t > scan.max_range) continue;

            frame.cloud.points.push_back(hit.t * d);
            frame.cloud.intensity.push_back(hit.surface.kind == SurfaceKind::box ? 0.8f : 0.3f);
            gt.owner.push_back(owner_of(scene, hit.surface));
            gt.surface.push_back(hit.surface);
        }
    }

    // Camera visibility: projects on-image and nothing nearer along the camera ray.
    const Vec3 cam_center = spec.camera.center_in_lidar();
    const Mat34 projection = spec.camera.full_projection();
    const double w = spec.camera.image_size.width;
    const double h = spec.camera.image_size.height;
    gt.camera_visible.resize(frame.cloud.size());
    for (std::size_t i = 0; i < frame.cloud.size(); ++i) {
        const Vec3& p = frame.cloud.points[i];
        double u, v, depth;
        if (!project_point(projection, spec.camera.extrinsic, p, u, v, depth) || u < 0.0 || u >= w ||
            v < 0.0 || v >= h) {
            gt.camera_visible[i] = false;
            continue;
        }
        const Vec3 seg = p - cam_center;
        const double dist = seg.norm();
        const Hit blocker = nearest_hit(scene, cam_center, seg / dist);
        gt.camera_visible[i] = !(blocker.t < dist - 1e-6 * std::max(1.0, dist));
    }

    // Instance footprint through every pixel center.
    const Eigen::Matrix3d inv_a = projection.leftCols<3>().inverse();
    gt.instance_mask.assign(static_cast<std::size_t>(gt.image_size.height) * gt.image_size.width, kBackground);
    for (int y = 0; y < gt.image_size.height; ++y) {
        for (int x = 0; x < gt.image_size.width; ++x) {
            const Vec3 d = pixel_ray(inv_a, spec.camera.extrinsic, x + 0.5, y + 0.5);
            const Hit hit = nearest_hit(scene, cam_center, d);
            if (hit.t != kInf) {
                gt.instance_mask[static_cast<std::size_t>(y) * gt.image_size.width + x] = owner_of(scene, hit.surface);
            }
        }
    }
    return frame;
}

std::size_t ParallaxCase::should_remove_count() const {
    return static_cast<std::size_t>(std::count(should_remove.begin(), should_remove.end(), true));
}

ParallaxCase parallax_case(const SceneSpec& spec) {
    ParallaxCase pc;
    pc.frame = raycast_scene(spec);
    pc.projected = project_points(pc.frame.cloud, pc.frame.camera);
    pc.should_remove.resize(pc.projected.size());
    pc.visible_foreground.resize(pc.projected.size());
    const GroundTruth& gt = pc.frame.truth;
    for (std::size_t k = 0; k < pc.projected.size(); ++k) {
        const ProjectedPoint& p = pc.projected[k];
        const bool visible = gt.camera_visible[p.source_index];
        pc.should_remove[k] = !visible && gt.mask_at(p.u, p.v) != kBackground;
        pc.visible_foreground[k] = visible && gt.owner[p.source_index] != kBackground;
    }
    return pc;
}

FeatureMap synthesize_features(const GroundTruth& truth, int height, int width, int channels,
                               std::uint64_t seed, double noise_amplitude) {
    FeatureMap fm(height, width, channels);

    auto embedding = [&](std::int64_t id) {
        Rng rng(mix64(seed ^ mix64(static_cast<std::uint64_t>(id) + 0x5eedULL)));
        Eigen::VectorXd e(channels);
        for (int c = 0; c < channels; ++c) e[c] = rng.normal();
        return l2_normalized(e);
    };

    // Two low-frequency plane waves per channel.
    Rng noise_rng(mix64(seed ^ 0x6e6f697365ULL));
    struct Wave {
        double kx, ky, phase;
    };
    std::vector<Wave> waves;
    for (int c = 0; c < 2 * channels; ++c) {
        const double angle = 2.0 * std::numbers::pi * noise_rng.uniform();
        const double freq = 2.0 * std::numbers::pi * (0.5 + 1.5 * noise_rng.uniform());
        waves.push_back({freq * std::cos(angle), freq * std::sin(angle), 2.0 * std::numbers::pi * noise_rng.uniform()});
    }

    std::vector<std::pair<std::int64_t, Eigen::VectorXd>> cache;
    const ImageSize image = truth.image_size;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double u = (x + 0.5) * image.width / width;
            const double v = (y + 0.5) * image.height / height;
            const std::int64_t id = truth.mask_at(u, v);
            auto it = std::find_if(cache.begin(), cache.end(), [id](const auto& e) { return e.first == id; });
            if (it == cache.end()) {
                cache.emplace_back(id, embedding(id));
                it = cache.end() - 1;
            }
            const double nx = u / image.width;
            const double ny = v / image.height;
            Eigen::VectorXd f = it->second;
            for (int c = 0; c < channels; ++c) {
                const Wave& a = waves[2 * c];
                const Wave& b = waves[2 * c + 1];
                f[c] += noise_amplitude * 0.5 *
                        (std::sin(a.kx * nx + a.ky * ny + a.phase) + std::sin(b.kx * nx + b.ky * ny + b.phase));
            }
            f = l2_normalized(f);
            auto dst = fm.at(x, y);
            for (int c = 0; c < channels; ++c) dst[c] = static_cast<float>(f[c]);
        }
    }
    return fm;
}

RgbImage synthesize_image(const GroundTruth& truth) {
    RgbImage img(truth.image_size.height, truth.image_size.width, {96, 96, 96});
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const std::int64_t id = truth.instance_mask[static_cast<std::size_t>(y) * img.width + x];
            if (id == kBackground) {
                const auto shade = static_cast<std::uint8_t>(70 + (60 * y) / std::max(1, img.height));
                img.set(x, y, {shade, shade, shade});
                continue;
            }
            const std::uint64_t h = mix64(static_cast<std::uint64_t>(id));
            img.set(x, y, {static_cast<std::uint8_t>(40 + (h & 0x7f)), static_cast<std::uint8_t>(40 + ((h >> 8) & 0x7f)),
                           static_cast<std::uint8_t>(120 + ((h >> 16) & 0x7f))});
        }
    }
    return img;
}

SceneSpec random_parallax_scene(std::uint64_t seed, const RandomSceneOptions& options) {
    Rng rng(mix64(seed ^ 0x7363656e65ULL));
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
    const double deg = std::numbers::pi / 180.0;

    SceneSpec spec;
    spec.frame_id = "scene_" + std::to_string(seed);
    spec.seed = seed;
    spec.ground_z = 0.0;
    spec.lidar_origin = Vec3(0.0, 0.0, uniform(1.9, 2.1));
    const double camera_height = uniform(1.55, 1.65);
    spec.camera = make_forward_camera(Vec3(uniform(0.3, 0.6), 0.0, camera_height - spec.lidar_origin.z()),
                                      0.0, options.focal, options.image);

    spec.scan.azimuth_min = -40.0 * deg;
    spec.scan.azimuth_max = 40.0 * deg;
    spec.scan.azimuth_step = options.azimuth_step_deg * deg;
    spec.scan.elevations = uniform_elevations(-22.0 * deg, 6.0 * deg, options.rings);
    spec.scan.max_range = 80.0;

    const int n_cars = options.min_cars +
                       static_cast<int>(rng.below(static_cast<std::uint64_t>(options.max_cars - options.min_cars + 1)));
    // Lead car, then cars staggered behind it with partial lateral overlap.
    double x = uniform(8.0, 12.0);
    double y = uniform(-2.5, 2.5);
    for (int k = 0; k < n_cars; ++k) {
        Box3D car;
        car.size = Vec3(uniform(4.0, 4.8), uniform(1.75, 1.95), uniform(1.38, 1.52));
        car.center = Vec3(x, y, 0.5 * car.size.z());
        car.yaw = wrap_angle(uniform(-0.25, 0.25) + (rng.uniform() < 0.3 ? std::numbers::pi : 0.0));
        car.class_id = 0;
        car.instance_id = k + 1;
        spec.objects.push_back(car);

        x += uniform(6.0, 9.0);
        y += (rng.uniform() < 0.5 ? -1.0 : 1.0) * uniform(0.8, 1.6);
    }

    // Low fence in front of a car, partially covering it.
    const Box3D& fenced = spec.objects[rng.below(spec.objects.size())];
    const double fx = fenced.center.x() - 0.5 * fenced.size.x() - uniform(1.5, 2.5);
    const double fy = fenced.center.y() + uniform(-1.0, 1.0);
    const double half_len = uniform(1.0, 1.8);
    spec.occluders.push_back({Eigen::Vector2d(fx, fy - half_len), Eigen::Vector2d(fx, fy + half_len), 0.0,
                              uniform(0.9, 1.2)});

    // Background wall.
    const double wall_x = x + uniform(4.0, 8.0);
    spec.occluders.push_back({Eigen::Vector2d(wall_x, -25.0), Eigen::Vector2d(wall_x, 25.0), 0.0, uniform(3.0, 5.0)});
    return spec;
}

}  // namespace lidarseg
