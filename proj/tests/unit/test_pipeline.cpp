#include <doctest.h>

#include "fixtures.hpp"
#include "lidarseg/errors.hpp"
#include "lidarseg/pipeline.hpp"
#include "lidarseg/rng.hpp"

using namespace lidarseg;

namespace {

FrameBundle three_car_frame(std::uint64_t seed) {
    RandomSceneOptions opt;
    opt.min_cars = 3;
    opt.max_cars = 3;
    const auto sim = raycast_scene(random_parallax_scene(seed, opt));
    return fixtures::bundle_from(sim, "three_" + std::to_string(seed), seed);
}

}  // namespace

TEST_CASE("a frame without boxes gives empty outputs") {
    FrameBundle f = three_car_frame(1);
    f.boxes.clear();
    f.predictions.reset();
    const auto r = run_frame(f, {});
    CHECK(r.instances.empty());
    CHECK(r.skipped() == 0);
    CHECK(make_records(r, {}, "g.json", 0).empty());
    CHECK(make_graph_records(r).empty());
    CHECK_FALSE(r.projected.empty());
}

TEST_CASE("run_frame equals the manually chained stages") {
    const FrameBundle f = three_car_frame(2);
    PipelineConfig cfg;
    cfg.seed = 17;
    const auto r = run_frame(f, cfg);
    const ImageSize image = f.camera.image_size;

    const auto projected = project_points(f.cloud, f.camera);
    CHECK(projected == r.projected);
    const auto refined = refine(projected, image, cfg.refine);
    CHECK(refined.kept == r.refined.kept);
    REQUIRE(refined.removed.size() == r.refined.removed.size());

    std::size_t k = 0;
    for (const auto& box : f.boxes) {
        const Rect2D rect = relaxed_rect(box, f.camera);
        const auto split = split_in_out(refined.kept, f.cloud, box);
        const auto assigned = assign_labels(split.in, split.out, rect);
        SamplingConfig sc = cfg.sampling;
        sc.seed = stream_seed(cfg.seed, f.frame_id, box.instance_id);
        Rng rng(sc.seed);
        auto labels = sample_budget(assigned, rect, sc, rng);
        labels = propagate(labels, *f.features, image, cfg.sampling);

        ProjectedPointSet nodes;
        for (const auto& lp : assigned)
            if (lp.label != kIgnore) nodes.push_back(lp.point);
        GraphConfig gc = cfg.graph;
        gc.seed = stream_seed(cfg.seed ^ 0x6772617068ULL, f.frame_id, box.instance_id);
        const auto graph = build_graph(nodes, f.cloud, *f.features, image, gc);
        const auto loss = loss_total((*f.predictions)[k], labels, graph, image, cfg.loss_weights, cfg.loss_eps);

        REQUIRE(k < r.instances.size());
        const auto& inst = r.instances[k];
        CHECK(inst.instance_id == box.instance_id);
        CHECK(inst.rect == rect);
        CHECK(inst.labels.samples == labels.samples);
        REQUIRE(inst.graph.has_value());
        CHECK(inst.graph->edges().size() == graph.edges().size());
        REQUIRE(inst.loss.has_value());
        CHECK(inst.loss->total == loss.total);
        CHECK(inst.loss->grad == loss.grad);
        ++k;
    }
    CHECK(k == r.instances.size());
}

TEST_CASE("lidar-origin positives on a simulated three-car frame are precise") {
    std::size_t correct = 0, total = 0;
    for (std::uint64_t seed : {3, 4, 5}) {
        const FrameBundle f = three_car_frame(seed);
        const auto sim = raycast_scene(random_parallax_scene(seed, [] {
            RandomSceneOptions o;
            o.min_cars = 3;
            o.max_cars = 3;
            return o;
        }()));
        const auto r = run_frame(f, {});
        for (const auto& inst : r.instances) {
            for (const auto& s : inst.labels.samples) {
                if (s.origin != SampleOrigin::lidar || s.label != kPositive) continue;
                ++total;
                correct += sim.truth.owner[static_cast<std::size_t>(s.source_index)] == inst.instance_id ? 1 : 0;
            }
        }
    }
    REQUIRE(total > 0);
    const double precision = static_cast<double>(correct) / total;
    MESSAGE("lidar-origin positive precision: " << precision << " (" << correct << "/" << total << ")");
    CHECK(precision >= 0.95);
}

TEST_CASE("reruns produce byte-identical label files") {
    const FrameBundle f = three_car_frame(6);
    PipelineConfig cfg;
    cfg.seed = 3;
    const auto a = labels_to_json(make_records(run_frame(f, cfg), cfg, "x.graphs.json", 0));
    const auto b = labels_to_json(make_records(run_frame(f, cfg), cfg, "x.graphs.json", 0));
    CHECK(a == b);
    cfg.seed = 4;
    const auto c = labels_to_json(make_records(run_frame(f, cfg), cfg, "x.graphs.json", 0));
    CHECK(a != c);
}

TEST_CASE("records reference graphs in order and echo the config") {
    const FrameBundle f = three_car_frame(7);
    const PipelineConfig cfg;
    const auto r = run_frame(f, cfg);
    const auto records = make_records(r, cfg, "out.graphs.json", 5);
    const auto graphs = make_graph_records(r);
    std::size_t next = 5;
    for (const auto& rec : records) {
        CHECK(rec.config == cfg.to_map());
        if (!rec.graph_ref.empty()) CHECK(rec.graph_ref == "out.graphs.json#" + std::to_string(next++));
    }
    CHECK(next - 5 == graphs.size());
}

TEST_CASE("budgets total exactly s for every labeled instance") {
    for (std::uint64_t seed = 10; seed < 14; ++seed) {
        const FrameBundle f = three_car_frame(seed);
        PipelineConfig cfg;
        cfg.propagate = false;
        const auto r = run_frame(f, cfg);
        for (const auto& inst : r.instances) CHECK(inst.labels.samples.size() == static_cast<std::size_t>(cfg.sampling.s));
    }
}

TEST_CASE("a box behind the camera is skipped and counted") {
    FrameBundle f = three_car_frame(8);
    f.predictions.reset();
    Box3D behind = f.boxes.front();
    behind.center = Vec3(-20, 0, 0);
    behind.instance_id = 999;
    f.boxes.push_back(behind);
    const auto r = run_frame(f, {});
    CHECK(r.skipped_not_visible == 1);
    CHECK(r.instances.size() == f.boxes.size() - 1);
}

TEST_CASE("without features propagation and graphs are skipped") {
    FrameBundle f = three_car_frame(9);
    f.features.reset();
    const auto r = run_frame(f, {});
    for (const auto& inst : r.instances) {
        CHECK_FALSE(inst.graph.has_value());
        CHECK(inst.labels.count(SampleOrigin::propagated) == 0);
        CHECK(inst.loss.has_value());
    }
}

TEST_CASE("timings are recorded") {
    const auto r = run_frame(three_car_frame(11), {});
    CHECK(r.timings.total_us() >= 0);
    CHECK(r.timings.total_us() == r.timings.project_us + r.timings.refine_us + r.timings.assign_us +
                                      r.timings.sample_us + r.timings.propagate_us + r.timings.graph_us +
                                      r.timings.loss_us);
}
