#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "lidarseg/errors.hpp"
#include "lidarseg/simulator.hpp"
#include "oracles.hpp"

using namespace lidarseg;
using fixtures::uniform;

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

SceneSpec empty_scene() {
    SceneSpec s;
    s.lidar_origin = Vec3(0, 0, 2);
    s.scan.azimuth_min = -20 * kDeg;
    s.scan.azimuth_max = 20 * kDeg;
    s.scan.azimuth_step = 0.5 * kDeg;
    s.scan.elevations = uniform_elevations(-20 * kDeg, 2 * kDeg, 16);
    s.camera = make_forward_camera(Vec3(0.5, 0, -0.4), 0, 300, {150, 300});
    return s;
}

// Tall car close to a low LiDAR, wall behind: the raised LiDAR looks over the roof.
SceneSpec parallax_scene(double lidar_height, double camera_height) {
    SceneSpec s;
    s.lidar_origin = Vec3(0, 0, lidar_height);
    s.scan.azimuth_min = -25 * kDeg;
    s.scan.azimuth_max = 25 * kDeg;
    s.scan.azimuth_step = 0.2 * kDeg;
    s.scan.elevations = uniform_elevations(-25 * kDeg, 5 * kDeg, 48);
    s.camera = make_forward_camera(Vec3(0.5, 0, camera_height - lidar_height), 0, 400, {200, 400});
    Box3D car;
    car.center = Vec3(8, 0, 0.75);
    car.size = Vec3(4.5, 1.8, 1.5);
    car.instance_id = 1;
    car.class_id = 1;
    s.objects.push_back(car);
    VerticalRect wall;
    wall.a = Eigen::Vector2d(20, -10);
    wall.b = Eigen::Vector2d(20, 10);
    wall.z_min = 0;
    wall.z_max = 4;
    s.occluders.push_back(wall);
    return s;
}

}  // namespace

TEST_CASE("uniform elevations") {
    const auto e = uniform_elevations(-1, 1, 5);
    REQUIRE(e.size() == 5);
    CHECK(e.front() == -1);
    CHECK(e.back() == 1);
    CHECK(e[2] == doctest::Approx(0.0));
    CHECK(uniform_elevations(0, 1, 0).empty());
    CHECK(uniform_elevations(0, 1, 1) == std::vector<double>{0.5});
}

TEST_CASE("ray-box distance matches the face-plane oracle") {
    Rng rng(223);
    SceneSpec s = empty_scene();
    s.ground_z = -1e9;  // ground hits land beyond 1e6
    s.lidar_origin = Vec3::Zero();
    int hits = 0;
    for (int trial = 0; trial < 500; ++trial) {
        Box3D b;
        b.center = Vec3(uniform(rng, 3, 15), uniform(rng, -4, 4), uniform(rng, -2, 2));
        b.size = Vec3(uniform(rng, 0.5, 4), uniform(rng, 0.5, 3), uniform(rng, 0.5, 2));
        s.objects = {b};
        const Vec3 dir = (b.center + Vec3(0, uniform(rng, -2, 2), uniform(rng, -1.5, 1.5))).normalized();
        const double want = oracle::ray_box_distance(Vec3::Zero(), dir, b);
        const auto got = cast_ray(s, Vec3::Zero(), dir);
        if (std::isinf(want)) {
            CHECK((!got.has_value() || *got > 1e6));
        } else {
            REQUIRE(got.has_value());
            CHECK(std::abs(*got - want) <= 1e-9 * want);
            ++hits;
        }
    }
    CHECK(hits > 100);
}

TEST_CASE("ground returns lie on the ground plane at the expected range") {
    const SceneSpec s = empty_scene();
    const auto frame = raycast_scene(s);
    REQUIRE(frame.cloud.size() > 0);
    for (std::size_t i = 0; i < frame.cloud.size(); ++i) {
        const Vec3& p = frame.cloud.points[i];
        CHECK(p.z() == doctest::Approx(s.ground_z - s.lidar_origin.z()).epsilon(1e-9));
        CHECK(frame.truth.owner[i] == kBackground);
        CHECK(frame.truth.surface[i].kind == SurfaceKind::ground);
        const double elevation = std::asin(p.z() / p.norm());
        CHECK(std::abs(p.norm() - 2.0 / std::sin(-elevation)) <= 1e-9 * p.norm());
    }
    // Upward and grazing rings reach nothing within range.
    std::size_t reaching = 0;
    for (double e : s.scan.elevations) reaching += (e < 0 && 2.0 / std::sin(-e) <= s.scan.max_range) ? 1 : 0;
    const std::size_t n_az = 81;
    CHECK(frame.cloud.size() == reaching * n_az);
}

TEST_CASE("an elevated LiDAR produces camera-hidden points over the car") {
    const auto pc = parallax_case(parallax_scene(2.2, 1.2));
    std::size_t behind = 0;
    for (std::size_t k = 0; k < pc.projected.size(); ++k) {
        if (!pc.should_remove[k]) continue;
        const auto& p = pc.projected[k];
        CHECK_FALSE(pc.frame.truth.camera_visible[p.source_index]);
        CHECK(pc.frame.truth.mask_at(p.u, p.v) == 1);
        behind += pc.frame.truth.owner[p.source_index] == kBackground ? 1 : 0;
    }
    CHECK(behind > 20);
}

TEST_CASE("co-located LiDAR and camera produce no parallax") {
    SceneSpec s = parallax_scene(1.5, 1.5);
    s.camera = make_forward_camera(Vec3::Zero(), 0, 400, {200, 400});
    const auto pc = parallax_case(s);
    CHECK(pc.should_remove_count() == 0);
}

TEST_CASE("every ray is conserved: points equal rays minus misses") {
    SceneSpec s = parallax_scene(2.0, 1.6);
    s.scan.max_range = 1000;
    const auto frame = raycast_scene(s);
    const std::size_t n_az = 251;
    std::size_t expected = 0;
    for (double e : s.scan.elevations) {
        for (std::size_t k = 0; k < n_az; ++k) {
            const double az = s.scan.azimuth_min + k * s.scan.azimuth_step;
            const Vec3 d(std::cos(e) * std::cos(az), std::cos(e) * std::sin(az), std::sin(e));
            expected += cast_ray(s, Vec3::Zero(), d).has_value() ? 1 : 0;
        }
    }
    CHECK(frame.cloud.size() == expected);
    CHECK(frame.truth.owner.size() == frame.cloud.size());
    CHECK(frame.truth.camera_visible.size() == frame.cloud.size());
    CHECK(frame.cloud.intensity.size() == frame.cloud.size());
}

TEST_CASE("owners match containment in the box") {
    const auto frame = raycast_scene(parallax_scene(2.0, 1.6));
    std::size_t owned = 0;
    for (std::size_t i = 0; i < frame.cloud.size(); ++i) {
        const bool in = oracle::box_contains(frame.boxes[0], frame.cloud.points[i], 1e-6);
        CHECK((frame.truth.owner[i] == 1) == in);
        owned += in ? 1 : 0;
    }
    CHECK(owned > 100);
}

TEST_CASE("raycasting is deterministic") {
    SceneSpec s = parallax_scene(2.0, 1.6);
    s.glass_pass_probability = 0.3;
    s.seed = 9;
    const auto a = raycast_scene(s);
    const auto b = raycast_scene(s);
    CHECK(a.cloud.points == b.cloud.points);
    CHECK(a.truth.owner == b.truth.owner);
    CHECK(a.truth.instance_mask == b.truth.instance_mask);
    s.seed = 10;
    const auto c = raycast_scene(s);
    CHECK(a.cloud.points != c.cloud.points);
}

TEST_CASE("visible points are first hits along the camera ray") {
    const auto frame = raycast_scene(parallax_scene(2.2, 1.2));
    const SceneSpec s = parallax_scene(2.2, 1.2);
    const Vec3 c = frame.camera.center_in_lidar();
    std::size_t visible = 0;
    for (std::size_t i = 0; i < frame.cloud.size(); i += 7) {
        if (!frame.truth.camera_visible[i]) continue;
        const Vec3 seg = frame.cloud.points[i] - c;
        const auto t = cast_ray(s, c, seg);
        REQUIRE(t.has_value());
        CHECK(*t >= seg.norm() - 1e-6 * seg.norm());
        ++visible;
    }
    CHECK(visible > 100);
}

TEST_CASE("instance mask covers the projected box") {
    const auto pc = parallax_case(parallax_scene(2.0, 1.6));
    std::size_t on_car = 0, agree = 0;
    for (std::size_t k = 0; k < pc.projected.size(); ++k) {
        const auto& p = pc.projected[k];
        if (pc.frame.truth.owner[p.source_index] != 1 || !pc.frame.truth.camera_visible[p.source_index]) continue;
        ++on_car;
        agree += pc.frame.truth.mask_at(p.u, p.v) == 1 ? 1 : 0;
    }
    REQUIRE(on_car > 100);
    CHECK(static_cast<double>(agree) / on_car >= 0.95);
}

TEST_CASE("synthesized features are unit length and instance-separated") {
    const auto frame = raycast_scene(parallax_scene(2.0, 1.6));
    const auto feat = synthesize_features(frame.truth, 50, 100, 8, 3);
    double same = 0, cross = 0;
    int n_same = 0, n_cross = 0;
    const ImageSize img = frame.truth.image_size;
    const Eigen::VectorXd car = feat.sample_normalized(img.width * 0.5, img.height * 0.6, img);
    for (int y = 0; y < 50; ++y) {
        for (int x = 0; x < 100; ++x) {
            const auto f = feat.at(x, y);
            double n2 = 0;
            for (float c : f) n2 += double(c) * c;
            CHECK(std::abs(n2 - 1.0) <= 1e-5);
            const double u = (x + 0.5) * img.width / 100, v = (y + 0.5) * img.height / 50;
            const Eigen::VectorXd g = feat.sample_normalized(u, v, img);
            if (frame.truth.mask_at(u, v) == 1) {
                same += car.dot(g);
                ++n_same;
            } else {
                cross += car.dot(g);
                ++n_cross;
            }
        }
    }
    REQUIRE(n_same > 0);
    REQUIRE(n_cross > 0);
    CHECK(same / n_same > cross / n_cross + 0.3);
}

TEST_CASE("random parallax scenes are valid and seeded") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto s = random_parallax_scene(seed);
        CHECK_NOTHROW(s.validate());
        CHECK(s.objects.size() >= 2);
        CHECK(s.objects.size() <= 3);
        const auto t = random_parallax_scene(seed);
        CHECK(s.objects.size() == t.objects.size());
        for (std::size_t k = 0; k < s.objects.size(); ++k) CHECK(s.objects[k].center == t.objects[k].center);
    }
}

TEST_CASE("scene validation") {
    SceneSpec s = empty_scene();
    s.lidar_origin.z() = -1;
    CHECK_THROWS_AS(s.validate(), DataError);
    s = empty_scene();
    s.glass_pass_probability = 2;
    CHECK_THROWS_AS(s.validate(), DataError);
}
