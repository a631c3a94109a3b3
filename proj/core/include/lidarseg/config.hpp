#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "lidarseg/depth_refinement.hpp"
#include "lidarseg/graph.hpp"
#include "lidarseg/label_assignment.hpp"
#include "lidarseg/losses.hpp"

namespace lidarseg {

struct PipelineConfig {
    RefinementConfig refine;
    SamplingConfig sampling;
    GraphConfig graph;
    LossWeights loss_weights;
    double loss_eps = kProbabilityEps;
    bool propagate = true;
    bool build_graph = true;
    std::uint64_t seed = 0;

    void validate() const;

    /// Flat key -> value view, e.g. "refine.tau_depth" -> "0.1". Used as the config echo.
    std::map<std::string, std::string> to_map() const;

    /// Overrides one key; throws ConfigError on unknown keys or unparsable values.
    void set(const std::string& key, const std::string& value);
};

/// Reads `key = value` lines; '#' starts a comment, blank lines are skipped, and
/// values may be quoted. Unknown keys are errors.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(const std::string& text);

}  // namespace lidarseg
