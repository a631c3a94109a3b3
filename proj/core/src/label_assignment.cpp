#include "lidarseg/label_assignment.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "lidarseg/errors.hpp"

namespace lidarseg {

std::string_view to_string(SampleOrigin origin) {
    switch (origin) {
        case SampleOrigin::lidar: return "lidar";
        case SampleOrigin::padded: return "padded";
        case SampleOrigin::propagated: return "propagated";
    }
    return "lidar";
}

SampleOrigin origin_from_string(std::string_view name) {
    if (name == "lidar") return SampleOrigin::lidar;
    if (name == "padded") return SampleOrigin::padded;
    if (name == "propagated") return SampleOrigin::propagated;
    throw DataError("unknown sample origin '" + std::string(name) + "'");
}

std::string_view to_string(PropagationKernel kernel) {
    return kernel == PropagationKernel::literal ? "literal" : "distance";
}

PropagationKernel kernel_from_string(std::string_view name) {
    if (name == "distance") return PropagationKernel::distance;
    if (name == "literal") return PropagationKernel::literal;
    throw ConfigError("unknown propagation kernel '" + std::string(name) + "'");
}

std::size_t InstancePseudoLabels::count(int label) const {
    return static_cast<std::size_t>(
        std::count_if(samples.begin(), samples.end(), [label](const auto& s) { return s.label == label; }));
}

std::size_t InstancePseudoLabels::count(SampleOrigin origin) const {
    return static_cast<std::size_t>(
        std::count_if(samples.begin(), samples.end(), [origin](const auto& s) { return s.origin == origin; }));
}

void SamplingConfig::validate() const {
    if (s < 2) throw ConfigError("sampling.s must be >= 2");
    if (!(pos_ratio > 0.0 && pos_ratio < 1.0)) throw ConfigError("sampling.pos_ratio must lie in (0, 1)");
    if (!(pad_sigma > 0.0) || !std::isfinite(pad_sigma)) throw ConfigError("sampling.pad_sigma must be > 0");
    if (!(tau_d > 0.0 && tau_d <= 1.0)) throw ConfigError("sampling.tau_d must lie in (0, 1]");
    if (neighbor_radius < 0) throw ConfigError("sampling.neighbor_radius must be >= 0");
}

int SamplingConfig::positive_quota() const {
    return static_cast<int>(std::lround(static_cast<double>(s) * pos_ratio));
}

InOutSplit split_in_out(const ProjectedPointSet& refined, const PointCloud& cloud, const Box3D& box) {
    InOutSplit split;
    for (const auto& p : refined) {
        if (p.source_index >= cloud.size()) {
            throw StructuralError("projected point refers to source " + std::to_string(p.source_index) +
                                  " of a cloud with " + std::to_string(cloud.size()) + " points");
        }
        (contains_point(box, cloud.points[p.source_index], kBoxSurfaceTolerance) ? split.in : split.out).push_back(p);
    }
    return split;
}

std::vector<LabeledPoint> assign_labels(const ProjectedPointSet& in, const ProjectedPointSet& out,
                                        const Rect2D& rect) {
    std::vector<LabeledPoint> labeled;
    labeled.reserve(in.size() + out.size());
    for (const auto& p : in) labeled.push_back({p, kPositive});
    for (const auto& p : out) labeled.push_back({p, rect.contains(p.u, p.v) ? kNegative : kIgnore});
    return labeled;
}

namespace {

void draw_from_pool(const std::vector<const ProjectedPoint*>& pool, int quota, int label,
                    const Rect2D& rect, const SamplingConfig& cfg, Rng& rng,
                    std::vector<PseudoLabelSample>& out) {
    if (quota <= 0 || pool.empty()) return;

    // Partial Fisher-Yates over pool indices.
    std::vector<std::size_t> order(pool.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(quota), pool.size());
    for (std::size_t i = 0; i < take; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(order.size() - i));
        std::swap(order[i], order[j]);
        const ProjectedPoint& p = *pool[order[i]];
        out.push_back({p.u, p.v, label, SampleOrigin::lidar, static_cast<std::int64_t>(p.source_index)});
    }

    for (int k = static_cast<int>(take); k < quota; ++k) {
        const ProjectedPoint& p = *pool[rng.below(pool.size())];
        const double du = cfg.pad_sigma * rng.normal();
        const double dv = cfg.pad_sigma * rng.normal();
        const double u = std::clamp(p.u + du, rect.x_min, rect.x_max);
        const double v = std::clamp(p.v + dv, rect.y_min, rect.y_max);
        out.push_back({u, v, label, SampleOrigin::padded, -1});
    }
}

}  // namespace

InstancePseudoLabels sample_budget(std::span<const LabeledPoint> labeled, const Rect2D& rect,
                                   const SamplingConfig& cfg, Rng& rng) {
    cfg.validate();
    std::vector<const ProjectedPoint*> positives;
    std::vector<const ProjectedPoint*> negatives;
    for (const auto& lp : labeled) {
        if (lp.label == kPositive) positives.push_back(&lp.point);
        if (lp.label == kNegative) negatives.push_back(&lp.point);
    }
    if (positives.empty() && negatives.empty()) {
        throw InstanceUnlabelable("no positive or negative point to sample from");
    }

    int n_pos = cfg.positive_quota();
    if (positives.empty()) n_pos = 0;
    if (negatives.empty()) n_pos = cfg.s;
    const int n_neg = cfg.s - n_pos;

    InstancePseudoLabels result;
    result.rect = rect;
    result.samples.reserve(static_cast<std::size_t>(cfg.s));
    draw_from_pool(positives, n_pos, kPositive, rect, cfg, rng, result.samples);
    draw_from_pool(negatives, n_neg, kNegative, rect, cfg, rng, result.samples);
    return result;
}

double propagation_similarity(const Eigen::VectorXd& f_i, const Eigen::VectorXd& f_c,
                              PropagationKernel kernel) {
    if (f_i.size() != f_c.size()) throw StructuralError("feature dimension mismatch");
    if (kernel == PropagationKernel::literal) return std::exp(-f_i.dot(f_c));
    return std::exp(-(f_i - f_c).norm());
}

InstancePseudoLabels propagate(const InstancePseudoLabels& labels, const FeatureMap& feat,
                               ImageSize image, const SamplingConfig& cfg) {
    InstancePseudoLabels out = labels;
    if (feat.empty()) return out;

    // Pixel (row-major) -> propagated label; conflicting labels collapse to kIgnore.
    std::map<std::size_t, int> reached;
    const int r = cfg.neighbor_radius;
    for (const auto& s : labels.samples) {
        if (s.label == kIgnore) continue;
        const Eigen::VectorXd f_c = feat.sample_normalized(s.u, s.v, image);
        const int cx = static_cast<int>(std::floor(s.u));
        const int cy = static_cast<int>(std::floor(s.v));
        for (int y = cy - r; y <= cy + r; ++y) {
            if (y < 0 || y >= image.height) continue;
            for (int x = cx - r; x <= cx + r; ++x) {
                if (x < 0 || x >= image.width || (x == cx && y == cy)) continue;
                const Eigen::VectorXd f_i = feat.sample_normalized(x + 0.5, y + 0.5, image);
                if (!(propagation_similarity(f_i, f_c, cfg.kernel) > cfg.tau_d)) continue;
                const std::size_t pix = static_cast<std::size_t>(y) * image.width + x;
                auto [it, inserted] = reached.emplace(pix, s.label);
                if (!inserted && it->second != s.label) it->second = kIgnore;
            }
        }
    }

    for (const auto& [pix, label] : reached) {
        const double x = static_cast<double>(pix % static_cast<std::size_t>(image.width));
        const double y = static_cast<double>(pix / static_cast<std::size_t>(image.width));
        out.samples.push_back({x + 0.5, y + 0.5, label, SampleOrigin::propagated, -1});
    }
    return out;
}

}  // namespace lidarseg
