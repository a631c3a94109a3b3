#include <benchmark/benchmark.h>

#include "lidarseg/depth_refinement.hpp"
#include "lidarseg/graph.hpp"
#include "lidarseg/label_assignment.hpp"
#include "lidarseg/losses.hpp"
#include "lidarseg/pipeline.hpp"
#include "lidarseg/rng.hpp"
#include "lidarseg/simulator.hpp"

using namespace lidarseg;

namespace {

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

// 30k points, 6 boxes, 1600x900: a third of the points on the cars, the rest scattered.
struct SyntheticFrame {
    CalibratedCamera camera;
    PointCloud cloud;
    std::vector<Box3D> boxes;
};

const SyntheticFrame& frame() {
    static const SyntheticFrame f = [] {
        SyntheticFrame s;
        Rng rng(77);
        s.camera = make_forward_camera(Vec3(0.5, 0, -0.3), 0, 1200, {900, 1600});
        for (int b = 0; b < 6; ++b) {
            Box3D box;
            box.center = Vec3(uniform(rng, 8, 30), uniform(rng, -8, 8), -1.0);
            box.size = Vec3(4.5, 1.9, 1.6);
            box.yaw = uniform(rng, -0.5, 0.5);
            box.instance_id = b + 1;
            box.class_id = 1;
            s.boxes.push_back(box);
        }
        for (int k = 0; k < 30000; ++k) {
            if (k % 3 == 0) {
                const Box3D& b = s.boxes[static_cast<std::size_t>(k / 3) % s.boxes.size()];
                s.cloud.points.push_back(b.center + Vec3(uniform(rng, -2.2, 2.2), uniform(rng, -0.9, 0.9), uniform(rng, -0.8, 0.8)));
            } else {
                s.cloud.points.push_back(Vec3(uniform(rng, 3, 60), uniform(rng, -20, 20), uniform(rng, -2, 3)));
            }
        }
        return s;
    }();
    return f;
}

void BM_Project(benchmark::State& state) {
    const auto& f = frame();
    for (auto _ : state) benchmark::DoNotOptimize(project_points(f.cloud, f.camera));
}
BENCHMARK(BM_Project)->Unit(benchmark::kMillisecond);

void BM_Refine(benchmark::State& state) {
    const auto& f = frame();
    const auto projected = project_points(f.cloud, f.camera);
    RefinementConfig cfg;
    cfg.stride = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(refine(projected, f.camera.image_size, cfg));
}
BENCHMARK(BM_Refine)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_ProjectRefineAssign(benchmark::State& state) {
    const auto& f = frame();
    const RefinementConfig rc;
    for (auto _ : state) {
        const auto projected = project_points(f.cloud, f.camera);
        const auto refined = refine(projected, f.camera.image_size, rc);
        for (const auto& box : f.boxes) {
            const auto split = split_in_out(refined.kept, f.cloud, box);
            benchmark::DoNotOptimize(assign_labels(split.in, split.out, relaxed_rect(box, f.camera)));
        }
    }
    state.counters["fps"] = benchmark::Counter(static_cast<double>(state.iterations()), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_ProjectRefineAssign)->Unit(benchmark::kMillisecond);

void BM_BuildGraph(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Rng rng(3);
    const ImageSize image{256, 256};
    FeatureMap feat(64, 64, 16);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x)
            for (auto& v : feat.at(x, y)) v = static_cast<float>(rng.normal());
    PointCloud cloud;
    ProjectedPointSet pts;
    for (int k = 0; k < n; ++k) {
        cloud.points.push_back(Vec3(uniform(rng, -2, 2), uniform(rng, -1, 1), uniform(rng, 0, 1.5)));
        pts.push_back({uniform(rng, 0, 256), uniform(rng, 0, 256), 10.0, static_cast<std::size_t>(k)});
    }
    GraphConfig cfg;
    cfg.max_nodes = static_cast<std::size_t>(n);
    for (auto _ : state) benchmark::DoNotOptimize(build_graph(pts, cloud, feat, image, cfg));
}
BENCHMARK(BM_BuildGraph)->Arg(64)->Arg(256)->Arg(1024)->Unit(benchmark::kMicrosecond);

void BM_LossTotal(benchmark::State& state) {
    Rng rng(5);
    const ImageSize image{256, 256};
    PredictionMap map(64, 64);
    for (auto& v : map.values) v = uniform(rng, 0.05, 0.95);
    InstancePseudoLabels labels;
    for (int k = 0; k < 40; ++k)
        labels.samples.push_back({uniform(rng, 0, 256), uniform(rng, 0, 256), k % 2 ? kPositive : kNegative, SampleOrigin::lidar, k});
    std::vector<GraphNode> nodes;
    std::vector<Eigen::VectorXd> features;
    for (int k = 0; k < 256; ++k) {
        nodes.push_back({static_cast<std::size_t>(k), uniform(rng, 0, 256), uniform(rng, 0, 256),
                         Vec3(uniform(rng, -2, 2), uniform(rng, -1, 1), uniform(rng, 0, 1.5))});
        features.push_back(Eigen::VectorXd::Ones(4).normalized());
    }
    const auto graph = build_graph_from_features(nodes, features, GraphConfig{});
    for (auto _ : state) benchmark::DoNotOptimize(loss_total(map, labels, graph, image, {}, kProbabilityEps));
}
BENCHMARK(BM_LossTotal)->Unit(benchmark::kMicrosecond);

void BM_RunFrame(benchmark::State& state) {
    RandomSceneOptions opt;
    opt.min_cars = opt.max_cars = 3;
    const auto sim = raycast_scene(random_parallax_scene(1, opt));
    FrameBundle f;
    f.frame_id = "bench";
    f.cloud = sim.cloud;
    f.camera = sim.camera;
    f.boxes = sim.boxes;
    const ImageSize img = sim.camera.image_size;
    f.features = synthesize_features(sim.truth, img.height / 4, img.width / 4, 8, 1);
    f.predictions = std::vector<PredictionMap>(f.boxes.size(), PredictionMap(img.height / 4, img.width / 4, 0.5));
    const PipelineConfig cfg;
    for (auto _ : state) benchmark::DoNotOptimize(run_frame(f, cfg));
    state.counters["points"] = static_cast<double>(f.cloud.size());
}
BENCHMARK(BM_RunFrame)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
