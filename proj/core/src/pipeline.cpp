#include "lidarseg/pipeline.hpp"

#include <chrono>

#include "lidarseg/errors.hpp"
#include "lidarseg/rng.hpp"

namespace lidarseg {

namespace {

using Clock = std::chrono::steady_clock;

class StageTimer {
public:
    explicit StageTimer(std::int64_t& sink) : sink_(sink), start_(Clock::now()) {}
    ~StageTimer() {
        sink_ += std::chrono::duration_cast<std::chrono::microseconds>(Clock::now() - start_).count();
    }
    StageTimer(const StageTimer&) = delete;
    StageTimer& operator=(const StageTimer&) = delete;

private:
    std::int64_t& sink_;
    Clock::time_point start_;
};

constexpr std::uint64_t kGraphStreamSalt = 0x6772617068ULL;

}  // namespace

FrameResult run_frame(const FrameBundle& frame, const PipelineConfig& cfg, const RunOptions& options) {
    cfg.validate();
    frame.camera.validate();
    const ImageSize image = frame.camera.image_size;

    FrameResult result;
    result.frame_id = frame.frame_id;
    {
        StageTimer t(result.timings.project_us);
        result.projected = project_points(frame.cloud, frame.camera);
    }
    {
        StageTimer t(result.timings.refine_us);
        if (options.refine) {
            result.refined = refine(result.projected, image, cfg.refine);
        } else {
            result.refined.kept = result.projected;
        }
    }

    const bool have_features = frame.features.has_value() && !frame.features->empty();
    for (std::size_t b = 0; b < frame.boxes.size(); ++b) {
        const Box3D& box = frame.boxes[b];
        InstanceResult inst;
        inst.instance_id = box.instance_id;
        inst.class_id = box.class_id;

        {
            StageTimer t(result.timings.assign_us);
            try {
                inst.rect = relaxed_rect(box, frame.camera);
            } catch (const BoxNotVisible&) {
                ++result.skipped_not_visible;
                continue;
            }
            const InOutSplit split = split_in_out(result.refined.kept, frame.cloud, box);
            inst.assigned = assign_labels(split.in, split.out, inst.rect);
        }

        {
            StageTimer t(result.timings.sample_us);
            SamplingConfig sc = cfg.sampling;
            sc.seed = stream_seed(cfg.seed, frame.frame_id, box.instance_id);
            Rng rng(sc.seed);
            try {
                inst.labels = sample_budget(inst.assigned, inst.rect, sc, rng);
            } catch (const InstanceUnlabelable&) {
                ++result.skipped_unlabelable;
                continue;
            }
            inst.labels.instance_id = box.instance_id;
            inst.labels.class_id = box.class_id;
        }

        if (have_features && cfg.propagate) {
            StageTimer t(result.timings.propagate_us);
            inst.labels = propagate(inst.labels, *frame.features, image, cfg.sampling);
        }

        if (have_features && cfg.build_graph) {
            StageTimer t(result.timings.graph_us);
            ProjectedPointSet nodes;
            for (const auto& lp : inst.assigned) {
                if (lp.label != kIgnore) nodes.push_back(lp.point);
            }
            GraphConfig gc = cfg.graph;
            gc.seed = stream_seed(cfg.seed ^ kGraphStreamSalt, frame.frame_id, box.instance_id);
            try {
                inst.graph = build_graph(nodes, frame.cloud, *frame.features, image, gc);
            } catch (const EmptyGraph&) {
                inst.graph.reset();
            }
        }

        if (options.compute_losses && frame.predictions.has_value()) {
            StageTimer t(result.timings.loss_us);
            const PredictionMap& pred = (*frame.predictions)[b];
            const SimilarityGraph empty;
            inst.loss = loss_total(pred, inst.labels, inst.graph ? *inst.graph : empty, image,
                                   cfg.loss_weights, cfg.loss_eps);
        }

        result.instances.push_back(std::move(inst));
    }
    return result;
}

std::vector<PseudoLabelRecord> make_records(const FrameResult& result, const PipelineConfig& cfg,
                                            const std::string& graph_file, std::size_t first_graph_index) {
    const auto echo = cfg.to_map();
    std::vector<PseudoLabelRecord> records;
    std::size_t graph_index = first_graph_index;
    for (const auto& inst : result.instances) {
        PseudoLabelRecord r;
        r.frame_id = result.frame_id;
        r.instance_id = inst.instance_id;
        r.class_id = inst.class_id;
        r.rect = inst.rect;
        r.samples = inst.labels.samples;
        if (inst.graph) r.graph_ref = graph_file + "#" + std::to_string(graph_index++);
        r.config = echo;
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<GraphRecord> make_graph_records(const FrameResult& result) {
    std::vector<GraphRecord> out;
    for (const auto& inst : result.instances) {
        if (inst.graph) out.push_back({result.frame_id, inst.instance_id, *inst.graph});
    }
    return out;
}

}  // namespace lidarseg
