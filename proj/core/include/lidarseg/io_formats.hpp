#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lidarseg/feature_map.hpp"
#include "lidarseg/geometry.hpp"
#include "lidarseg/graph.hpp"
#include "lidarseg/image.hpp"
#include "lidarseg/label_assignment.hpp"
#include "lidarseg/losses.hpp"
#include "lidarseg/simulator.hpp"

namespace lidarseg {

inline constexpr int kFormatVersion = 1;
inline constexpr char kTensorMagic[4] = {'L', 'W', 'F', 'M'};
inline constexpr std::size_t kTensorHeaderBytes = 16;

/// One synchronized sample. File names are relative to the descriptor's directory.
struct FrameBundle {
    std::string frame_id;
    PointCloud cloud;
    CalibratedCamera camera;
    std::vector<Box3D> boxes;
    std::optional<FeatureMap> features;
    /// One prediction grid per box, in box order.
    std::optional<std::vector<PredictionMap>> predictions;
    std::optional<RgbImage> image;

    std::string points_file;
    std::string features_file;
    std::string predictions_file;
    std::string image_file;

    /// Fills any empty file name with "<frame_id>.<kind>.<ext>".
    void assign_default_file_names();
};

/// Parses a frame descriptor and every file it references. Throws DataError with the
/// offending file and byte offset on any malformed input.
FrameBundle read_frame(const std::filesystem::path& descriptor);

/// Writes "<frame_id>.json" plus referenced files into `dir`; returns the descriptor path.
std::filesystem::path write_frame(const FrameBundle& frame, const std::filesystem::path& dir);

/// Frame descriptors (*.json) in `dir`, sorted by file name.
std::vector<std::filesystem::path> list_frames(const std::filesystem::path& dir);

/// Little-endian float32 N x 4 (x, y, z, intensity).
PointCloud read_point_file(const std::filesystem::path& path, std::size_t expected_count);
void write_point_file(const PointCloud& cloud, const std::filesystem::path& path);

/// "LWFM" + u32 H + u32 W + u32 C, then H*W*C little-endian float32, channel fastest.
FeatureMap read_tensor_file(const std::filesystem::path& path);
void write_tensor_file(const FeatureMap& tensor, const std::filesystem::path& path);

/// Prediction grids share the tensor layout; channel k belongs to box k.
std::vector<PredictionMap> read_prediction_file(const std::filesystem::path& path);
void write_prediction_file(const std::vector<PredictionMap>& maps, const std::filesystem::path& path);

struct PseudoLabelRecord {
    std::string frame_id;
    std::int64_t instance_id = 0;
    std::int32_t class_id = 0;
    Rect2D rect;
    std::vector<PseudoLabelSample> samples;
    std::string graph_ref;  // "<graph file>#<index>", empty when no graph was built
    std::map<std::string, std::string> config;

    friend bool operator==(const PseudoLabelRecord&, const PseudoLabelRecord&) = default;
};

/// Rounds to 9 significant digits; used for every float in label and graph JSON.
double round_sig9(double value);

/// Deterministic single JSON document: sorted keys, 9-significant-digit floats.
std::string labels_to_json(const std::vector<PseudoLabelRecord>& records);
std::vector<PseudoLabelRecord> labels_from_json(const std::string& text);
void write_labels(const std::vector<PseudoLabelRecord>& records, const std::filesystem::path& path);
std::vector<PseudoLabelRecord> read_labels(const std::filesystem::path& path);

struct GraphRecord {
    std::string frame_id;
    std::int64_t instance_id = 0;
    SimilarityGraph graph;
};

std::string graphs_to_json(const std::vector<GraphRecord>& graphs);
std::vector<GraphRecord> graphs_from_json(const std::string& text);
void write_graphs(const std::vector<GraphRecord>& graphs, const std::filesystem::path& path);
std::vector<GraphRecord> read_graphs(const std::filesystem::path& path);

/// Scene description for the simulator (angles in degrees in the file).
SceneSpec read_scene(const std::filesystem::path& path);
SceneSpec scene_from_json(const std::string& text);

/// Per-point owner / visibility arrays of a simulated frame.
void write_ground_truth(const GroundTruth& truth, const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::string& text, const std::filesystem::path& path);

}  // namespace lidarseg
