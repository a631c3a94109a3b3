#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

#include "lidarseg/overlay.hpp"

namespace lidarseg::app {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitDataError = 2,
    kExitCheckFailure = 3,
};

struct GenerateOptions {
    std::filesystem::path frames_dir;
    std::filesystem::path out;
    std::optional<std::filesystem::path> config;
    std::optional<std::uint64_t> seed;  // overrides the config file's seed
};

struct GenerateSummary {
    std::size_t frames = 0;
    std::size_t records = 0;
    std::size_t graphs = 0;
    std::size_t skipped = 0;
    std::filesystem::path labels_file;
    std::filesystem::path graphs_file;
};

/// "<dir>/<stem>.graphs.json" next to the labels file.
std::filesystem::path graphs_path_for(const std::filesystem::path& labels_file);

/// Runs the pipeline over every frame descriptor in frames_dir and writes the label
/// records plus the companion graph file.
GenerateSummary generate(const GenerateOptions& options, std::ostream& log);

struct SimulateOptions {
    std::filesystem::path scene;
    std::filesystem::path out;
    std::optional<std::uint64_t> seed;
    int feature_stride = 4;
    int feature_channels = 8;
    bool predictions = true;
};

/// Ray-casts a scene file and writes it as a frame (points, features, predictions, image)
/// plus "<frame_id>.groundtruth.json". Returns the descriptor path.
std::filesystem::path simulate(const SimulateOptions& options, std::ostream& log);

struct VisualizeOptions {
    std::filesystem::path frames_dir = ".";
    std::string frame_id;
    OverlayMode mode = OverlayMode::labels;
    std::filesystem::path out;  // default "<frame_id>.<mode>.ppm"
    std::optional<std::filesystem::path> config;
    std::optional<std::uint64_t> seed;
};

std::filesystem::path visualize(const VisualizeOptions& options, std::ostream& log);

struct GradCheckOptions {
    int trials = 100;
    double tol = 1e-4;
    double step = 1e-5;
    int probes = 20;  // cells checked per trial
    std::uint64_t seed = 0;
};

struct GradCheckResult {
    int trials = 0;
    double max_error_point = 0.0;
    double max_error_graph = 0.0;
    double max_error_total = 0.0;

    double max_error() const;
    bool passed(double tol) const { return max_error() < tol; }
};

/// |a - f| / max(|a|, |f|, 1e-3): relative error with a 1e-7 absolute floor at tol 1e-4.
double gradient_error(double analytic, double numeric);

/// Central finite differences against the analytic gradients of L_p, L_g and L on random
/// prediction grids (up to 64x64), label sets (up to 40) and graphs (up to 30 nodes).
GradCheckResult grad_check(const GradCheckOptions& options);

}  // namespace lidarseg::app
