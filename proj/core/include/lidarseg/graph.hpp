#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "lidarseg/feature_map.hpp"
#include "lidarseg/geometry.hpp"

namespace lidarseg {

struct GraphConfig {
    double w1 = 0.5;  // image-feature similarity weight
    double w2 = 0.5;  // geometry similarity weight
    double m = 1.0;   // distance normalization, meters
    double tau = 1.0;
    std::size_t max_nodes = 256;
    std::uint64_t seed = 0;

    void validate() const;
};

struct GraphNode {
    std::size_t point_index = 0;  // index into the point list the graph was built from
    double u = 0.0;
    double v = 0.0;
    Vec3 position = Vec3::Zero();  // LiDAR frame
};

struct GraphEdge {
    std::size_t i = 0;
    std::size_t j = 0;  // i < j
    double weight = 0.0;
};

/// Undirected weighted graph with binarized edges e_ij = [W_ij > tau]. Weights are held
/// densely below kDenseLimit nodes and as a coordinate list of nonzero pairs above it.
class SimilarityGraph {
public:
    static constexpr std::size_t kDenseLimit = 512;

    SimilarityGraph() = default;

    /// `upper` holds W_ij for i < j in row-major upper-triangle order.
    SimilarityGraph(std::vector<GraphNode> nodes, GraphConfig params, std::vector<double> upper);

    /// Graph restored from an edge list (e.g. a graph export): weights of non-edges are unknown.
    static SimilarityGraph from_edges(std::vector<GraphNode> nodes, GraphConfig params,
                                      std::vector<GraphEdge> edges);

    std::size_t size() const noexcept { return nodes_.size(); }
    bool empty() const noexcept { return nodes_.empty(); }
    const std::vector<GraphNode>& nodes() const noexcept { return nodes_; }
    const std::vector<GraphEdge>& edges() const noexcept { return edges_; }
    const GraphConfig& params() const noexcept { return params_; }
    bool dense() const noexcept { return !dense_.empty() || nodes_.size() < 2; }
    bool has_full_weights() const noexcept { return full_weights_; }

    /// W_ij (symmetric). The diagonal is not stored; i == j throws.
    double weight(std::size_t i, std::size_t j) const;
    /// e_ij (symmetric); false on the diagonal.
    bool edge(std::size_t i, std::size_t j) const;

private:
    struct Entry {
        std::size_t i, j;
        double w;
    };

    std::vector<GraphNode> nodes_;
    GraphConfig params_;
    std::vector<GraphEdge> edges_;
    std::vector<double> dense_;    // N x N, zero diagonal
    std::vector<Entry> sparse_;    // sorted by (i, j), i < j
    bool full_weights_ = true;
};

/// Dot product of two feature vectors (expected L2-normalized).
double sim_image(const Eigen::VectorXd& f_i, const Eigen::VectorXd& f_j);

/// exp(-|p_i - p_j| / m + 1), in (0, e].
double sim_geometry(const Vec3& p_i, const Vec3& p_j, double m);

/// Builds the graph over `points` (uniformly subsampled to cfg.max_nodes with cfg.seed).
/// Node features are bilinear samples of `feat`, L2-normalized. Throws EmptyGraph when
/// fewer than two nodes remain.
SimilarityGraph build_graph(const ProjectedPointSet& points, const PointCloud& cloud,
                            const FeatureMap& feat, ImageSize image, const GraphConfig& cfg);

/// Same as build_graph with explicit node features (one normalized vector per node).
SimilarityGraph build_graph_from_features(std::vector<GraphNode> nodes,
                                          std::span<const Eigen::VectorXd> features,
                                          const GraphConfig& cfg);

}  // namespace lidarseg
