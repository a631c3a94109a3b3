#include "lidarseg/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lidarseg/errors.hpp"
#include "lidarseg/graph.hpp"

namespace lidarseg {

PredictionMap::PredictionMap(int h, int w, double fill)
    : height(h), width(w), values(static_cast<std::size_t>(h) * w, fill) {
    if (h <= 0 || w <= 0) throw StructuralError("prediction map dimensions must be positive");
}

PredictionMap::PredictionMap(int h, int w, std::vector<double> v)
    : height(h), width(w), values(std::move(v)) {
    if (h <= 0 || w <= 0) throw StructuralError("prediction map dimensions must be positive");
    if (values.size() != static_cast<std::size_t>(h) * w) {
        throw StructuralError("prediction map expects " + std::to_string(h * w) + " values");
    }
}

void PredictionMap::validate() const {
    for (double x : values) {
        if (!std::isfinite(x) || x < 0.0 || x > 1.0) {
            throw DataError("prediction value outside [0, 1] or non-finite");
        }
    }
}

PredictionMap PredictionMap::clamped(double eps) const {
    PredictionMap out = *this;
    for (double& x : out.values) x = std::clamp(x, eps, 1.0 - eps);
    return out;
}

BilinearSample bilinear_sample(const PredictionMap& map, double u, double v, ImageSize image) {
    BilinearSample s;
    s.taps = bilinear_taps(map.height, map.width, u, v, image);
    for (const GridTap& t : s.taps) s.value += t.weight * map.values[t.cell];
    return s;
}

namespace {

// Clamped interpolated probability and its derivative w.r.t. the raw interpolation.
struct ClampedProb {
    double p;
    double dp;
};

ClampedProb clamp_prob(double raw, double eps) {
    if (raw < eps) return {eps, 0.0};
    if (raw > 1.0 - eps) return {1.0 - eps, 0.0};
    return {raw, 1.0};
}

void route(std::vector<double>& grad, const GridTaps& taps, double g) {
    for (const GridTap& t : taps) grad[t.cell] += t.weight * g;
}

}  // namespace

LossTerm loss_point(const PredictionMap& map, const InstancePseudoLabels& labels, ImageSize image,
                    double eps) {
    LossTerm term;
    term.grad.assign(map.values.size(), 0.0);
    std::size_t used = 0;
    for (const auto& s : labels.samples) {
        if (s.label != kPositive && s.label != kNegative) continue;
        ++used;
        const BilinearSample b = bilinear_sample(map, s.u, s.v, image);
        const ClampedProb m = clamp_prob(b.value, eps);
        if (s.label == kPositive) {
            term.value -= std::log(m.p);
            route(term.grad, b.taps, -m.dp / m.p);
        } else {
            term.value -= std::log(1.0 - m.p);
            route(term.grad, b.taps, m.dp / (1.0 - m.p));
        }
    }
    term.degenerate = used == 0;
    return term;
}

LossTerm loss_graph(const PredictionMap& map, const SimilarityGraph& graph, ImageSize image,
                    double eps) {
    LossTerm term;
    term.grad.assign(map.values.size(), 0.0);
    const std::size_t n = graph.size();
    if (n == 0) {
        term.degenerate = true;
        return term;
    }

    std::vector<BilinearSample> samples;
    std::vector<ClampedProb> probs;
    samples.reserve(n);
    probs.reserve(n);
    for (const auto& node : graph.nodes()) {
        samples.push_back(bilinear_sample(map, node.u, node.v, image));
        probs.push_back(clamp_prob(samples.back().value, eps));
    }

    // Each stored edge stands for the two ordered pairs (i, j) and (j, i).
    const double scale = 2.0 / static_cast<double>(n);
    std::vector<double> dnode(n, 0.0);
    for (const GraphEdge& e : graph.edges()) {
        const double mi = probs[e.i].p;
        const double mj = probs[e.j].p;
        const double agree = mi * mj + (1.0 - mi) * (1.0 - mj);
        term.value -= scale * std::log(agree);
        dnode[e.i] -= scale * (2.0 * mj - 1.0) / agree;
        dnode[e.j] -= scale * (2.0 * mi - 1.0) / agree;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (dnode[i] != 0.0) route(term.grad, samples[i].taps, dnode[i] * probs[i].dp);
    }
    term.degenerate = graph.edges().empty();
    return term;
}

LossReport loss_total(const PredictionMap& map, const InstancePseudoLabels& labels,
                      const SimilarityGraph& graph, ImageSize image, const LossWeights& weights,
                      double eps) {
    const LossTerm lp = loss_point(map, labels, image, eps);
    const LossTerm lg = loss_graph(map, graph, image, eps);

    LossReport report;
    report.l_p = lp.value;
    report.l_g = lg.value;
    report.total = weights.point * lp.value + weights.graph * lg.value;
    report.grad.resize(map.values.size());
    for (std::size_t k = 0; k < report.grad.size(); ++k) {
        report.grad[k] = weights.point * lp.grad[k] + weights.graph * lg.grad[k];
    }
    report.point_degenerate = lp.degenerate;
    report.graph_degenerate = lg.degenerate;
    return report;
}

}  // namespace lidarseg
