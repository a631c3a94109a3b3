#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lidarseg/config.hpp"
#include "lidarseg/depth_refinement.hpp"
#include "lidarseg/graph.hpp"
#include "lidarseg/io_formats.hpp"
#include "lidarseg/label_assignment.hpp"
#include "lidarseg/losses.hpp"

namespace lidarseg {

/// Wall-clock time per stage, microseconds. Per-instance stages are summed over instances.
struct StageTimings {
    std::int64_t project_us = 0;
    std::int64_t refine_us = 0;
    std::int64_t assign_us = 0;
    std::int64_t sample_us = 0;
    std::int64_t propagate_us = 0;
    std::int64_t graph_us = 0;
    std::int64_t loss_us = 0;

    std::int64_t total_us() const {
        return project_us + refine_us + assign_us + sample_us + propagate_us + graph_us + loss_us;
    }
};

struct InstanceResult {
    std::int64_t instance_id = 0;
    std::int32_t class_id = 0;
    Rect2D rect;
    std::vector<LabeledPoint> assigned;  // in/out labels over the refined points
    InstancePseudoLabels labels;         // sampled, then propagated
    std::optional<SimilarityGraph> graph;
    std::optional<LossReport> loss;
};

struct FrameResult {
    std::string frame_id;
    ProjectedPointSet projected;
    RefinedPointSet refined;
    std::vector<InstanceResult> instances;
    std::size_t skipped_not_visible = 0;
    std::size_t skipped_unlabelable = 0;
    StageTimings timings;

    std::size_t skipped() const { return skipped_not_visible + skipped_unlabelable; }
};

struct RunOptions {
    bool refine = true;  // false: every projected point is kept (baseline comparisons)
    bool compute_losses = true;
};

/// project -> refine -> per instance: rect, split, assign, sample, propagate, graph, losses.
/// Propagation and graph need a feature map; losses need prediction maps.
FrameResult run_frame(const FrameBundle& frame, const PipelineConfig& cfg, const RunOptions& options = {});

/// Output records for a frame result. `graph_file` names the graph export that
/// accompanies the labels; each graph is referenced as "<graph_file>#<index>" starting
/// at `first_graph_index`.
std::vector<PseudoLabelRecord> make_records(const FrameResult& result, const PipelineConfig& cfg,
                                            const std::string& graph_file, std::size_t first_graph_index);

std::vector<GraphRecord> make_graph_records(const FrameResult& result);

}  // namespace lidarseg
