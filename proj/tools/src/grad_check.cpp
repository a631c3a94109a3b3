#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "lidarseg/graph.hpp"
#include "lidarseg/losses.hpp"
#include "lidarseg/rng.hpp"
#include "lidarseg_app/commands.hpp"

namespace lidarseg::app {

namespace {

struct Trial {
    ImageSize image;
    PredictionMap map;
    InstancePseudoLabels labels;
    SimilarityGraph graph;
};

int uniform_int(Rng& rng, int lo, int hi) { return lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(hi - lo + 1))); }

Trial random_trial(Rng& rng) {
    Trial t;
    const int h = uniform_int(rng, 2, 64);
    const int w = uniform_int(rng, 2, 64);
    t.image = {h * uniform_int(rng, 1, 8), w * uniform_int(rng, 1, 8)};

    // Kept away from the clamp so every cell is differentiable.
    std::vector<double> values(static_cast<std::size_t>(h) * w);
    for (auto& v : values) v = 0.02 + 0.96 * rng.uniform();
    t.map = PredictionMap(h, w, std::move(values));

    const int n = uniform_int(rng, 1, 40);
    for (int k = 0; k < n; ++k) {
        PseudoLabelSample s;
        s.u = rng.uniform() * t.image.width;
        s.v = rng.uniform() * t.image.height;
        const double r = rng.uniform();
        s.label = r < 0.45 ? kPositive : (r < 0.9 ? kNegative : kIgnore);
        s.origin = SampleOrigin::lidar;
        t.labels.samples.push_back(s);
    }

    const int nodes = uniform_int(rng, 2, 30);
    std::vector<GraphNode> graph_nodes;
    for (int k = 0; k < nodes; ++k) {
        GraphNode node;
        node.point_index = static_cast<std::size_t>(k);
        node.u = rng.uniform() * t.image.width;
        node.v = rng.uniform() * t.image.height;
        graph_nodes.push_back(node);
    }
    std::vector<GraphEdge> edges;
    for (int i = 0; i < nodes; ++i)
        for (int j = i + 1; j < nodes; ++j)
            if (rng.uniform() < 0.4) edges.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), 1.5});
    t.graph = SimilarityGraph::from_edges(std::move(graph_nodes), GraphConfig{}, std::move(edges));
    return t;
}

double central_difference(const std::function<double(const PredictionMap&)>& f, PredictionMap map,
                          std::size_t cell, double step) {
    const double base = map.values[cell];
    map.values[cell] = base + step;
    const double plus = f(map);
    map.values[cell] = base - step;
    const double minus = f(map);
    return (plus - minus) / (2.0 * step);
}

}  // namespace

double GradCheckResult::max_error() const {
    return std::max({max_error_point, max_error_graph, max_error_total});
}

double gradient_error(double analytic, double numeric) {
    return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), 1e-3});
}

GradCheckResult grad_check(const GradCheckOptions& options) {
    GradCheckResult result;
    Rng rng(mix64(options.seed ^ 0x6772616463686bULL));
    for (int trial = 0; trial < options.trials; ++trial) {
        const Trial t = random_trial(rng);

        const auto lp = [&](const PredictionMap& m) { return loss_point(m, t.labels, t.image).value; };
        const auto lg = [&](const PredictionMap& m) { return loss_graph(m, t.graph, t.image).value; };
        const auto lt = [&](const PredictionMap& m) { return loss_total(m, t.labels, t.graph, t.image).total; };
        const auto g_point = loss_point(t.map, t.labels, t.image).grad;
        const auto g_graph = loss_graph(t.map, t.graph, t.image).grad;
        const auto g_total = loss_total(t.map, t.labels, t.graph, t.image).grad;

        // Half the probes on cells the losses actually touch, half anywhere.
        std::vector<std::size_t> touched;
        for (std::size_t c = 0; c < g_total.size(); ++c)
            if (g_point[c] != 0.0 || g_graph[c] != 0.0) touched.push_back(c);
        std::vector<std::size_t> probes;
        for (int k = 0; k < options.probes; ++k) {
            if (k % 2 == 0 && !touched.empty()) {
                probes.push_back(touched[rng.below(touched.size())]);
            } else {
                probes.push_back(rng.below(g_total.size()));
            }
        }

        for (std::size_t cell : probes) {
            result.max_error_point = std::max(result.max_error_point,
                                              gradient_error(g_point[cell], central_difference(lp, t.map, cell, options.step)));
            result.max_error_graph = std::max(result.max_error_graph,
                                              gradient_error(g_graph[cell], central_difference(lg, t.map, cell, options.step)));
            result.max_error_total = std::max(result.max_error_total,
                                              gradient_error(g_total[cell], central_difference(lt, t.map, cell, options.step)));
        }
        ++result.trials;
    }
    return result;
}

}  // namespace lidarseg::app
