#include "lidarseg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lidarseg/errors.hpp"
#include "lidarseg/rng.hpp"

namespace lidarseg {

void GraphConfig::validate() const {
    if (!(w1 >= 0.0) || !(w2 >= 0.0) || !(w1 + w2 > 0.0)) {
        throw ConfigError("graph weights need w1, w2 >= 0 and w1 + w2 > 0");
    }
    if (!(m > 0.0) || !std::isfinite(m)) throw ConfigError("graph.m must be > 0");
    if (!std::isfinite(tau)) throw ConfigError("graph.tau must be finite");
    if (max_nodes < 2) throw ConfigError("graph.max_nodes must be >= 2");
}

SimilarityGraph::SimilarityGraph(std::vector<GraphNode> nodes, GraphConfig params,
                                 std::vector<double> upper)
    : nodes_(std::move(nodes)), params_(params) {
    const std::size_t n = nodes_.size();
    if (upper.size() != (n < 2 ? 0 : n * (n - 1) / 2)) {
        throw StructuralError("upper-triangle weight count does not match node count");
    }
    const bool use_dense = n < kDenseLimit;
    if (use_dense && n >= 2) dense_.assign(n * n, 0.0);

    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j, ++k) {
            const double w = upper[k];
            if (!std::isfinite(w)) throw DataError("non-finite graph weight");
            if (use_dense) {
                dense_[i * n + j] = w;
                dense_[j * n + i] = w;
            } else if (w != 0.0) {
                sparse_.push_back({i, j, w});
            }
            if (w > params_.tau) edges_.push_back({i, j, w});
        }
    }
}

SimilarityGraph SimilarityGraph::from_edges(std::vector<GraphNode> nodes, GraphConfig params,
                                            std::vector<GraphEdge> edges) {
    SimilarityGraph g;
    g.nodes_ = std::move(nodes);
    g.params_ = params;
    g.full_weights_ = false;
    for (auto& e : edges) {
        if (e.i == e.j || e.i >= g.nodes_.size() || e.j >= g.nodes_.size()) {
            throw DataError("graph edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) +
                            ") is invalid for " + std::to_string(g.nodes_.size()) + " nodes");
        }
        if (e.i > e.j) std::swap(e.i, e.j);
    }
    std::sort(edges.begin(), edges.end(),
              [](const GraphEdge& a, const GraphEdge& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
    for (std::size_t k = 1; k < edges.size(); ++k) {
        if (edges[k].i == edges[k - 1].i && edges[k].j == edges[k - 1].j) {
            throw DataError("duplicate graph edge");
        }
    }
    for (const auto& e : edges) g.sparse_.push_back({e.i, e.j, e.weight});
    g.edges_ = std::move(edges);
    return g;
}

double SimilarityGraph::weight(std::size_t i, std::size_t j) const {
    const std::size_t n = nodes_.size();
    if (i == j || i >= n || j >= n) throw StructuralError("graph weight index out of range");
    if (!dense_.empty()) return dense_[i * n + j];
    if (i > j) std::swap(i, j);
    auto it = std::lower_bound(sparse_.begin(), sparse_.end(), std::make_pair(i, j),
                               [](const Entry& e, const std::pair<std::size_t, std::size_t>& key) {
                                   return e.i != key.first ? e.i < key.first : e.j < key.second;
                               });
    if (it != sparse_.end() && it->i == i && it->j == j) return it->w;
    if (!full_weights_) throw StructuralError("weight of a non-edge is not stored in this graph");
    return 0.0;
}

bool SimilarityGraph::edge(std::size_t i, std::size_t j) const {
    if (i == j) return false;
    if (i > j) std::swap(i, j);
    return std::binary_search(edges_.begin(), edges_.end(), GraphEdge{i, j, 0.0},
                              [](const GraphEdge& a, const GraphEdge& b) {
                                  return a.i != b.i ? a.i < b.i : a.j < b.j;
                              });
}

double sim_image(const Eigen::VectorXd& f_i, const Eigen::VectorXd& f_j) {
    if (f_i.size() != f_j.size()) {
        throw StructuralError("feature dimensions differ: " + std::to_string(f_i.size()) + " vs " +
                              std::to_string(f_j.size()));
    }
    return f_i.dot(f_j);
}

double sim_geometry(const Vec3& p_i, const Vec3& p_j, double m) {
    return std::exp(-(p_i - p_j).norm() / m + 1.0);
}

SimilarityGraph build_graph_from_features(std::vector<GraphNode> nodes,
                                          std::span<const Eigen::VectorXd> features,
                                          const GraphConfig& cfg) {
    cfg.validate();
    const std::size_t n = nodes.size();
    if (features.size() != n) throw StructuralError("one feature vector per node is required");
    if (n < 2) throw EmptyGraph("similarity graph needs at least two nodes, got " + std::to_string(n));

    std::vector<double> upper;
    upper.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            upper.push_back(cfg.w1 * sim_image(features[i], features[j]) +
                            cfg.w2 * sim_geometry(nodes[i].position, nodes[j].position, cfg.m));
        }
    }
    return SimilarityGraph(std::move(nodes), cfg, std::move(upper));
}

SimilarityGraph build_graph(const ProjectedPointSet& points, const PointCloud& cloud,
                            const FeatureMap& feat, ImageSize image, const GraphConfig& cfg) {
    cfg.validate();
    std::vector<std::size_t> chosen(points.size());
    for (std::size_t i = 0; i < chosen.size(); ++i) chosen[i] = i;
    if (chosen.size() > cfg.max_nodes) {
        Rng rng(mix64(cfg.seed ^ 0x67726170685f7375ULL));
        for (std::size_t i = 0; i < cfg.max_nodes; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(chosen.size() - i));
            std::swap(chosen[i], chosen[j]);
        }
        chosen.resize(cfg.max_nodes);
        std::sort(chosen.begin(), chosen.end());
    }

    std::vector<GraphNode> nodes;
    std::vector<Eigen::VectorXd> features;
    nodes.reserve(chosen.size());
    features.reserve(chosen.size());
    for (std::size_t idx : chosen) {
        const ProjectedPoint& p = points[idx];
        if (p.source_index >= cloud.size()) throw StructuralError("graph node source index out of range");
        nodes.push_back({idx, p.u, p.v, cloud.points[p.source_index]});
        features.push_back(feat.sample_normalized(p.u, p.v, image));
    }
    return build_graph_from_features(std::move(nodes), features, cfg);
}

}  // namespace lidarseg
