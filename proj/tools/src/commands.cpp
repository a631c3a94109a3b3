#include "lidarseg_app/commands.hpp"

#include <algorithm>
#include <iterator>
#include <vector>

#include "lidarseg/config.hpp"
#include "lidarseg/errors.hpp"
#include "lidarseg/io_formats.hpp"
#include "lidarseg/pipeline.hpp"
#include "lidarseg/simulator.hpp"

namespace fs = std::filesystem;

namespace lidarseg::app {

namespace {

PipelineConfig resolve_config(const std::optional<fs::path>& file, const std::optional<std::uint64_t>& seed) {
    PipelineConfig cfg = file ? load_config(*file) : PipelineConfig{};
    if (seed) cfg.seed = *seed;
    cfg.validate();
    return cfg;
}

// Soft masks standing in for a segmentation head: 0.8 on the instance, 0.2 elsewhere.
std::vector<PredictionMap> mask_predictions(const SimulatedFrame& sim, int h, int w) {
    const ImageSize image = sim.truth.image_size;
    std::vector<PredictionMap> maps;
    for (const auto& box : sim.boxes) {
        PredictionMap m(h, w, 0.2);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                const double u = (x + 0.5) * image.width / w;
                const double v = (y + 0.5) * image.height / h;
                if (sim.truth.mask_at(u, v) == box.instance_id) m.at(x, y) = 0.8;
            }
        }
        maps.push_back(std::move(m));
    }
    return maps;
}

}  // namespace

fs::path graphs_path_for(const fs::path& labels_file) {
    return labels_file.parent_path() / (labels_file.stem().string() + ".graphs.json");
}

GenerateSummary generate(const GenerateOptions& options, std::ostream& log) {
    const PipelineConfig cfg = resolve_config(options.config, options.seed);
    if (!fs::is_directory(options.frames_dir)) {
        throw DataError(options.frames_dir.string() + ": not a directory");
    }

    GenerateSummary summary;
    summary.labels_file = options.out;
    summary.graphs_file = graphs_path_for(options.out);
    const std::string graph_ref = summary.graphs_file.filename().string();

    std::vector<PseudoLabelRecord> records;
    std::vector<GraphRecord> graphs;
    for (const auto& descriptor : list_frames(options.frames_dir)) {
        const FrameBundle frame = read_frame(descriptor);
        const FrameResult result = run_frame(frame, cfg);

        auto frame_records = make_records(result, cfg, graph_ref, graphs.size());
        auto frame_graphs = make_graph_records(result);
        log << frame.frame_id << ": " << result.projected.size() << " projected, "
            << result.refined.removed.size() << " removed, " << frame_records.size() << " labeled, "
            << result.skipped() << " skipped\n";

        summary.skipped += result.skipped();
        records.insert(records.end(), std::make_move_iterator(frame_records.begin()),
                       std::make_move_iterator(frame_records.end()));
        graphs.insert(graphs.end(), std::make_move_iterator(frame_graphs.begin()),
                      std::make_move_iterator(frame_graphs.end()));
        ++summary.frames;
    }

    if (options.out.has_parent_path()) fs::create_directories(options.out.parent_path());
    write_labels(records, summary.labels_file);
    write_graphs(graphs, summary.graphs_file);
    summary.records = records.size();
    summary.graphs = graphs.size();
    return summary;
}

fs::path simulate(const SimulateOptions& options, std::ostream& log) {
    SceneSpec spec = read_scene(options.scene);
    if (options.seed) spec.seed = *options.seed;
    const SimulatedFrame sim = raycast_scene(spec);
    const ImageSize image = sim.camera.image_size;

    FrameBundle frame;
    frame.frame_id = spec.frame_id;
    frame.cloud = sim.cloud;
    frame.camera = sim.camera;
    frame.boxes = sim.boxes;

    const int fh = std::max(1, image.height / options.feature_stride);
    const int fw = std::max(1, image.width / options.feature_stride);
    frame.features = synthesize_features(sim.truth, fh, fw, options.feature_channels, spec.seed);
    if (options.predictions && !sim.boxes.empty()) frame.predictions = mask_predictions(sim, fh, fw);
    frame.image = synthesize_image(sim.truth);

    fs::create_directories(options.out);
    const fs::path descriptor = write_frame(frame, options.out);
    write_ground_truth(sim.truth, options.out / (frame.frame_id + ".groundtruth.json"));

    std::size_t hidden = 0;
    for (bool visible : sim.truth.camera_visible) hidden += visible ? 0 : 1;
    log << frame.frame_id << ": " << sim.cloud.size() << " points, " << sim.boxes.size() << " boxes, "
        << hidden << " hidden from the camera\n";
    return descriptor;
}

fs::path visualize(const VisualizeOptions& options, std::ostream& log) {
    const PipelineConfig cfg = resolve_config(options.config, options.seed);
    const fs::path descriptor = options.frames_dir / (options.frame_id + ".json");
    if (!fs::exists(descriptor)) throw DataError(descriptor.string() + ": no such frame");
    const FrameBundle frame = read_frame(descriptor);

    RunOptions run;
    run.refine = options.mode != OverlayMode::raw;
    run.compute_losses = false;
    const FrameResult result = run_frame(frame, cfg, run);

    std::vector<InstancePseudoLabels> labels;
    for (const auto& inst : result.instances) labels.push_back(inst.labels);

    OverlayInput input;
    input.size = frame.camera.image_size;
    if (frame.image) input.background = &*frame.image;
    input.depth_points = options.mode == OverlayMode::raw ? &result.projected : &result.refined.kept;
    input.removed = &result.refined.removed;
    input.labels = &labels;

    const RgbImage overlay = render_overlay(input, options.mode);
    const fs::path out = options.out.empty()
                             ? fs::path(options.frame_id + "." + std::string(to_string(options.mode)) + ".ppm")
                             : options.out;
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    write_ppm(overlay, out);
    log << "wrote " << out.string() << "\n";
    return out;
}

}  // namespace lidarseg::app
