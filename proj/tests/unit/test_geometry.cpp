#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

#include "fixtures.hpp"
#include "lidarseg/errors.hpp"
#include "lidarseg/geometry.hpp"
#include "oracles.hpp"

using namespace lidarseg;
using fixtures::uniform;

TEST_CASE("principal ray projects to the principal point") {
    const auto cam = fixtures::principal_camera();
    PointCloud cloud;
    cloud.points = {{0, 0, 10}, {0, 0, -5}};
    const auto out = project_points(cloud, cam);
    REQUIRE(out.size() == 1);
    CHECK(out[0].u == doctest::Approx(50.0).epsilon(1e-15));
    CHECK(out[0].v == doctest::Approx(50.0).epsilon(1e-15));
    CHECK(out[0].depth == 10.0);
    CHECK(out[0].source_index == 0);
}

TEST_CASE("projection drops off-image and degenerate-depth points") {
    const auto cam = fixtures::principal_camera();
    PointCloud cloud;
    cloud.points = {{-5, 0, 10}, {5.1, 0, 10}, {0, 0, 5e-7}, {4.99, 4.99, 10}};
    const auto out = project_points(cloud, cam);
    REQUIRE(out.size() == 2);
    CHECK(out[0].source_index == 0);  // u = 0 is on the image
    CHECK(out[1].source_index == 3);
}

TEST_CASE("non-finite coordinates reject the frame") {
    const auto cam = fixtures::principal_camera();
    PointCloud cloud;
    cloud.points = {{0, 0, 10}, {std::nan(""), 0, 1}};
    CHECK_THROWS_AS(project_points(cloud, cam), DataError);
}

TEST_CASE("projection matches the matrix-chain oracle") {
    Rng rng(101);
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto cam = fixtures::random_camera(rng);
        PointCloud cloud;
        for (int k = 0; k < 50; ++k) {
            cloud.points.push_back(fixtures::from_camera_frame(
                cam, Vec3(uniform(rng, -20, 20), uniform(rng, -15, 15), uniform(rng, -5, 40))));
        }
        const auto out = project_points(cloud, cam);
        std::size_t next = 0;
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            double u, v, d;
            const bool in_front = oracle::project(cam.camera_matrix, cam.extrinsic, cloud.points[i], u, v, d);
            const bool on_image = in_front && d > kMinDepth && u >= 0 && u < cam.image_size.width && v >= 0 &&
                                  v < cam.image_size.height;
            if (!on_image) continue;
            REQUIRE(next < out.size());
            const auto& p = out[next++];
            REQUIRE(p.source_index == i);
            CHECK(std::abs(p.u - u) <= 1e-9 * std::abs(u) + 1e-9);
            CHECK(std::abs(p.v - v) <= 1e-9 * std::abs(v) + 1e-9);
            CHECK(std::abs(p.depth - d) <= 1e-9 * d);
            ++checked;
        }
        CHECK(next == out.size());
    }
    CHECK(checked > 1000);
}

TEST_CASE("projected depth is the camera-frame z") {
    Rng rng(7);
    const auto cam = fixtures::random_camera(rng);
    PointCloud cloud;
    for (int k = 0; k < 500; ++k) cloud.points.push_back(Vec3(uniform(rng, -30, 30), uniform(rng, -30, 30), uniform(rng, -30, 30)));
    for (const auto& p : project_points(cloud, cam)) {
        const Eigen::Vector4d h = cam.extrinsic * cloud.points[p.source_index].homogeneous();
        CHECK(p.depth == doctest::Approx(h.z()).epsilon(1e-12));
    }
}

TEST_CASE("projection is scale-aware about the principal point") {
    Rng rng(19);
    for (int trial = 0; trial < 50; ++trial) {
        auto cam = fixtures::random_camera(rng, {4000, 4000});
        const double k = uniform(rng, 0.3, 0.9);
        auto scaled = cam;
        scaled.camera_matrix.topRows<2>() *= k;
        const double cx = cam.camera_matrix(0, 2), cy = cam.camera_matrix(1, 2);
        const Vec3 p = fixtures::from_camera_frame(cam, Vec3(uniform(rng, -3, 3), uniform(rng, -3, 3), uniform(rng, 4, 30)));
        double u, v, d, us, vs, ds;
        REQUIRE(project_point(cam.full_projection(), cam.extrinsic, p, u, v, d));
        REQUIRE(project_point(scaled.full_projection(), scaled.extrinsic, p, us, vs, ds));
        // Scaling the first two rows maps (u, v) to k * (u, v); relative to the scaled
        // principal point that is k times the original offset.
        CHECK(us - k * cx == doctest::Approx(k * (u - cx)).epsilon(1e-9));
        CHECK(vs - k * cy == doctest::Approx(k * (v - cy)).epsilon(1e-9));
    }
}

TEST_CASE("unit cube corners") {
    Box3D b;
    const auto c = corners_of_box(b);
    for (int k = 0; k < 8; ++k) {
        CHECK(std::abs(c[k].x()) == 0.5);
        CHECK(std::abs(c[k].y()) == 0.5);
        CHECK(std::abs(c[k].z()) == 0.5);
    }
    Box3D q = b;
    q.yaw = std::numbers::pi / 2;
    const auto cq = corners_of_box(q);
    for (int k = 0; k < 8; ++k) {
        CHECK(std::abs(cq[k].x() - (-c[k].y())) < 1e-12);
        CHECK(std::abs(cq[k].y() - c[k].x()) < 1e-12);
        CHECK(std::abs(cq[k].z() - c[k].z()) < 1e-12);
    }
}

TEST_CASE("corners match the rotate-scale-translate oracle and average to the center") {
    Rng rng(3);
    for (int trial = 0; trial < 500; ++trial) {
        const Box3D b = fixtures::random_box(rng);
        const auto c = corners_of_box(b);
        const auto o = oracle::box_corners(b);
        Vec3 mean = Vec3::Zero();
        for (int k = 0; k < 8; ++k) {
            CHECK((c[k] - o[k]).norm() < 1e-12);
            mean += c[k] / 8.0;
        }
        CHECK((mean - b.center).norm() < 1e-9);
    }
}

TEST_CASE("containment is boundary inclusive") {
    Box3D b;
    b.center = {1, 2, 3};
    b.size = {4, 2, 1};
    CHECK(contains_point(b, b.center));
    CHECK(contains_point(b, {3, 2, 3}));    // +x face center
    CHECK(contains_point(b, {1, 1, 3}));    // -y face center
    CHECK(contains_point(b, {1, 2, 3.5}));  // top face center
    CHECK_FALSE(contains_point(b, {3.0001, 2, 3}));
    CHECK(contains_point(b, {3.00005, 2, 3}, kBoxSurfaceTolerance));
}

TEST_CASE("containment agrees with the explicit 2D rotation oracle") {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const Box3D b = fixtures::random_box(rng, 2.0);
        for (int k = 0; k < 1000; ++k) {
            const Vec3 p(uniform(rng, -6, 6), uniform(rng, -6, 6), uniform(rng, -6, 6));
            CHECK(contains_point(b, p) == oracle::box_contains(b, p));
        }
    }
}

TEST_CASE("containment is yaw-equivariant") {
    Rng rng(11);
    int inside = 0;
    for (int k = 0; k < 2000; ++k) {
        Box3D b = fixtures::random_box(rng, 1.0);
        const Vec3 p = b.center + Vec3(uniform(rng, -1.5, 1.5), uniform(rng, -1.5, 1.5), uniform(rng, -1.5, 1.5));
        const double phi = uniform(rng, -10, 10);
        const Eigen::Matrix3d R = Eigen::AngleAxisd(phi, Vec3::UnitZ()).toRotationMatrix();
        Box3D r = b;
        r.center = R * b.center;
        r.yaw = wrap_angle(b.yaw + phi);
        const Vec3 rp = R * p;
        // Points within rounding distance of a face are skipped.
        if (contains_point(b, p, 1e-9) != contains_point(b, p, -1e-9)) continue;
        CHECK(contains_point(b, p) == contains_point(r, rp));
        inside += contains_point(b, p) ? 1 : 0;
    }
    CHECK(inside > 200);
}

TEST_CASE("relaxed rect of a centered cube is centered on the principal point") {
    const auto cam = fixtures::principal_camera();
    Box3D b;
    b.center = {0, 0, 10};
    const Rect2D r = relaxed_rect(b, cam);
    CHECK((r.x_min + r.x_max) / 2 == doctest::Approx(50.0));
    CHECK((r.y_min + r.y_max) / 2 == doctest::Approx(50.0));
    CHECK(r.x_max - r.x_min > 0);
}

TEST_CASE("relaxed rect of a box behind the camera is not visible") {
    const auto cam = fixtures::principal_camera();
    Box3D b;
    b.center = {0, 0, -10};
    CHECK_THROWS_AS(relaxed_rect(b, cam), BoxNotVisible);
}

TEST_CASE("relaxed rect matches the corner projection oracle") {
    Rng rng(23);
    int compared = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const auto cam = fixtures::random_camera(rng);
        Box3D b = fixtures::random_box(rng, 1.0);
        b.center = fixtures::from_camera_frame(cam, Vec3(uniform(rng, -6, 6), uniform(rng, -4, 4), uniform(rng, 6, 30)));
        Rect2D expected;
        if (!oracle::relaxed_rect(b, cam, expected)) continue;
        const Rect2D r = relaxed_rect(b, cam);
        CHECK(r.x_min == doctest::Approx(expected.x_min).epsilon(1e-9));
        CHECK(r.x_max == doctest::Approx(expected.x_max).epsilon(1e-9));
        CHECK(r.y_min == doctest::Approx(expected.y_min).epsilon(1e-9));
        CHECK(r.y_max == doctest::Approx(expected.y_max).epsilon(1e-9));
        ++compared;
    }
    CHECK(compared > 300);
}

TEST_CASE("relaxed rect encloses every on-image projection of an interior point") {
    Rng rng(29);
    for (int trial = 0; trial < 200; ++trial) {
        const auto cam = fixtures::random_camera(rng);
        Box3D b = fixtures::random_box(rng, 1.0);
        // Includes boxes straddling the camera plane.
        b.center = fixtures::from_camera_frame(cam, Vec3(uniform(rng, -5, 5), uniform(rng, -4, 4), uniform(rng, -1, 15)));
        Rect2D r;
        try {
            r = relaxed_rect(b, cam);
        } catch (const BoxNotVisible&) {
            continue;
        }
        PointCloud cloud;
        const auto corners = oracle::box_corners(b);
        for (int k = 0; k < 300; ++k) {
            Vec3 p = Vec3::Zero();
            double wsum = 0;
            std::array<double, 8> w;
            for (auto& x : w) {
                x = rng.uniform();
                wsum += x;
            }
            for (int c = 0; c < 8; ++c) p += (w[c] / wsum) * corners[c];
            cloud.points.push_back(p);
        }
        for (const auto& p : project_points(cloud, cam)) {
            CHECK(r.x_min <= p.u + 1e-9);
            CHECK(p.u <= r.x_max + 1e-9);
            CHECK(r.y_min <= p.v + 1e-9);
            CHECK(p.v <= r.y_max + 1e-9);
        }
    }
}

TEST_CASE("camera validation") {
    auto cam = fixtures::principal_camera();
    CHECK_NOTHROW(cam.validate());
    cam.extrinsic(3, 0) = 0.1;
    CHECK_THROWS_AS(cam.validate(), DataError);
    cam = fixtures::principal_camera();
    cam.extrinsic(0, 0) = 1.01;
    CHECK_THROWS_AS(cam.validate(), DataError);
    cam = fixtures::principal_camera();
    cam.image_size = {0, 10};
    CHECK_THROWS_AS(cam.validate(), DataError);
}

TEST_CASE("wrap_angle lands in [-pi, pi)") {
    CHECK(wrap_angle(std::numbers::pi) == doctest::Approx(-std::numbers::pi));
    CHECK(wrap_angle(3 * std::numbers::pi / 2) == doctest::Approx(-std::numbers::pi / 2));
    CHECK(wrap_angle(0.25) == doctest::Approx(0.25));
}
