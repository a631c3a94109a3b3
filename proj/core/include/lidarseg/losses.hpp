#pragma once

#include <vector>

#include "lidarseg/geometry.hpp"
#include "lidarseg/grid_sampling.hpp"
#include "lidarseg/label_assignment.hpp"

namespace lidarseg {

class SimilarityGraph;

inline constexpr double kProbabilityEps = 1e-6;

/// Per-instance h x w grid of mask probabilities, row-major.
struct PredictionMap {
    int height = 0;
    int width = 0;
    std::vector<double> values;

    PredictionMap() = default;
    PredictionMap(int h, int w, double fill = 0.5);
    PredictionMap(int h, int w, std::vector<double> v);

    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }

    /// Throws DataError on non-finite values or values outside [0, 1].
    void validate() const;
    /// Copy with every cell clamped to [eps, 1 - eps].
    PredictionMap clamped(double eps = kProbabilityEps) const;
};

struct BilinearSample {
    double value = 0.0;
    GridTaps taps;
};

/// Interpolates `map` at full-image position (u, v). The map covers the whole image, so
/// the downsampling ratio is image / map size per axis.
BilinearSample bilinear_sample(const PredictionMap& map, double u, double v, ImageSize image);

/// Loss value plus d(loss)/d(cell) for every cell of the prediction map.
struct LossTerm {
    double value = 0.0;
    std::vector<double> grad;
    bool degenerate = false;
};

struct LossWeights {
    double point = 1.0;
    double graph = 1.0;
};

struct LossReport {
    double l_p = 0.0;
    double l_g = 0.0;
    double total = 0.0;
    std::vector<double> grad;  // d(total)/d(cell), row-major h x w
    bool point_degenerate = false;
    bool graph_degenerate = false;
};

/// Summed binary cross-entropy over samples labeled 0 or 1 (ignore excluded). Interpolated
/// probabilities are clamped to [eps, 1 - eps]. All-ignore input is degenerate: value 0.
LossTerm loss_point(const PredictionMap& map, const InstancePseudoLabels& labels, ImageSize image,
                    double eps = kProbabilityEps);

/// Consistency loss -(1/N) sum over ordered pairs i != j of e_ij log(m_i m_j + (1-m_i)(1-m_j)).
/// An empty graph yields 0 and is flagged degenerate.
LossTerm loss_graph(const PredictionMap& map, const SimilarityGraph& graph, ImageSize image,
                    double eps = kProbabilityEps);

/// weights.point * L_p + weights.graph * L_g with a single fused gradient.
LossReport loss_total(const PredictionMap& map, const InstancePseudoLabels& labels,
                      const SimilarityGraph& graph, ImageSize image, const LossWeights& weights = {},
                      double eps = kProbabilityEps);

}  // namespace lidarseg
