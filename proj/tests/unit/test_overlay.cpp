#include <doctest.h>

#include "fixtures.hpp"
#include "lidarseg/errors.hpp"
#include "lidarseg/overlay.hpp"
#include "lidarseg/pipeline.hpp"

using namespace lidarseg;

TEST_CASE("overlay mode names") {
    for (auto m : {OverlayMode::raw, OverlayMode::refined, OverlayMode::labels})
        CHECK(overlay_mode_from_string(to_string(m)) == m);
    CHECK_THROWS_AS(overlay_mode_from_string("depth"), ConfigError);
}

TEST_CASE("no points gives the background only") {
    const RgbImage bg(20, 30, {1, 2, 3});
    const ProjectedPointSet none;
    OverlayInput in;
    in.size = {20, 30};
    in.background = &bg;
    in.depth_points = &none;
    for (auto m : {OverlayMode::raw, OverlayMode::refined, OverlayMode::labels}) CHECK(render_overlay(in, m).data == bg.data);
    in.background = nullptr;
    const auto canvas = render_overlay(in, OverlayMode::raw);
    CHECK(canvas.height == 20);
    CHECK(canvas.width == 30);
    for (int y = 0; y < 20; ++y)
        for (int x = 0; x < 30; ++x) CHECK(canvas.get(x, y) == Rgb{16, 16, 16});
}

TEST_CASE("missing image and depth is refused") {
    OverlayInput in;
    in.size = {10, 10};
    CHECK_THROWS_AS(render_overlay(in, OverlayMode::labels), DataError);
}

TEST_CASE("label colors") {
    InstancePseudoLabels l;
    l.samples.push_back({2.5, 2.5, kPositive, SampleOrigin::lidar, 0});
    l.samples.push_back({7.5, 7.5, kNegative, SampleOrigin::lidar, 1});
    l.samples.push_back({5.5, 5.5, kIgnore, SampleOrigin::lidar, 2});
    const std::vector<InstancePseudoLabels> labels{l};
    const RgbImage bg(10, 10);
    OverlayInput in;
    in.size = {10, 10};
    in.background = &bg;
    in.labels = &labels;
    in.dot_radius = 0;
    const auto img = render_overlay(in, OverlayMode::labels);
    CHECK(img.get(2, 2) == kPositiveColor);
    CHECK(img.get(7, 7) == kNegativeColor);
    CHECK(img.get(5, 5) == Rgb{0, 0, 0});
}

TEST_CASE("rendering is byte-deterministic") {
    RandomSceneOptions opt;
    opt.image = {225, 400};
    opt.focal = 300;
    const auto sim = raycast_scene(random_parallax_scene(21, opt));
    const FrameBundle f = fixtures::bundle_from(sim, "ov", 21);
    const auto r = run_frame(f, {});
    std::vector<InstancePseudoLabels> labels;
    for (const auto& i : r.instances) labels.push_back(i.labels);
    const RgbImage bg = synthesize_image(sim.truth);
    OverlayInput in;
    in.size = f.camera.image_size;
    in.background = &bg;
    in.depth_points = &r.refined.kept;
    in.removed = &r.refined.removed;
    in.labels = &labels;
    fixtures::TempDir dir;
    write_ppm(render_overlay(in, OverlayMode::labels), dir / "a.ppm");
    write_ppm(render_overlay(in, OverlayMode::labels), dir / "b.ppm");
    CHECK(fixtures::file_bytes(dir / "a.ppm") == fixtures::file_bytes(dir / "b.ppm"));
}

TEST_CASE("positive dots land inside the car footprint") {
    std::size_t inside = 0, total = 0;
    for (std::uint64_t seed = 30; seed < 35; ++seed) {
        const auto sim = raycast_scene(random_parallax_scene(seed));
        const FrameBundle f = fixtures::bundle_from(sim, "fp", seed);
        const auto r = run_frame(f, {});
        std::vector<InstancePseudoLabels> labels;
        for (const auto& i : r.instances) labels.push_back(i.labels);
        const RgbImage bg(f.camera.image_size.height, f.camera.image_size.width);
        OverlayInput in;
        in.size = f.camera.image_size;
        in.background = &bg;
        in.labels = &labels;
        in.dot_radius = 0;
        const auto img = render_overlay(in, OverlayMode::labels);
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x) {
                if (img.get(x, y) != kPositiveColor) continue;
                ++total;
                inside += sim.truth.mask_at(x + 0.5, y + 0.5) != kBackground ? 1 : 0;
            }
    }
    REQUIRE(total > 100);
    const double frac = static_cast<double>(inside) / total;
    MESSAGE("positive pixels inside a footprint: " << frac);
    CHECK(frac >= 0.95);
}
