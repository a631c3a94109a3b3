#include "lidarseg/depth_refinement.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lidarseg/errors.hpp"

namespace lidarseg {

SparseDepthMap::SparseDepthMap(ImageSize size)
    : size_(size),
      depth_(static_cast<std::size_t>(size.height) * static_cast<std::size_t>(size.width), 0.0),
      entry_(depth_.size(), kNoPoint) {}

void SparseDepthMap::splat(const ProjectedPoint& p, std::int64_t entry_index) {
    const int x = static_cast<int>(std::floor(p.u));
    const int y = static_cast<int>(std::floor(p.v));
    if (x < 0 || y < 0 || x >= size_.width || y >= size_.height) {
        throw DataError("projected point outside the depth map");
    }
    if (!(p.depth > 0.0)) throw DataError("projected point with non-positive depth");
    const std::size_t i = index(x, y);
    if (depth_[i] == 0.0) {
        ++occupied_;
    } else if (depth_[i] <= p.depth) {
        return;
    }
    depth_[i] = p.depth;
    entry_[i] = entry_index;
}

void RefinementConfig::validate() const {
    if (window_size < 2) throw ConfigError("refine.window_size must be >= 2");
    if (stride < 1 || stride > window_size) throw ConfigError("refine.stride must lie in [1, window_size]");
    if (!(tau_depth > 0.0) || !std::isfinite(tau_depth)) throw ConfigError("refine.tau_depth must be > 0");
}

SparseDepthMap build_depth_map(const ProjectedPointSet& points, ImageSize size) {
    SparseDepthMap map(size);
    for (std::size_t i = 0; i < points.size(); ++i) map.splat(points[i], static_cast<std::int64_t>(i));
    return map;
}

WindowPartition partition_window(const SparseDepthMap& depth_map, const PixelWindow& window,
                                 double tau_depth) {
    WindowPartition out;
    const int x0 = std::max(window.x, 0);
    const int y0 = std::max(window.y, 0);
    const int x1 = std::min(window.x + window.width, depth_map.size().width);
    const int y1 = std::min(window.y + window.height, depth_map.size().height);

    std::vector<DepthPixel> pixels;
    double d_min = std::numeric_limits<double>::infinity();
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            const double d = depth_map.depth(x, y);
            if (d == 0.0) continue;
            pixels.push_back({x, y, d, depth_map.entry(x, y)});
            d_min = std::min(d_min, d);
        }
    }
    if (pixels.empty()) return out;

    out.d_min = d_min;
    for (const auto& p : pixels) {
        if ((p.depth - d_min) / d_min < tau_depth) {
            out.near.push_back(p);
        } else {
            out.far.push_back(p);
        }
    }
    return out;
}

namespace {

struct PixelBox {
    int x_min = std::numeric_limits<int>::max();
    int x_max = std::numeric_limits<int>::min();
    int y_min = std::numeric_limits<int>::max();
    int y_max = std::numeric_limits<int>::min();

    bool empty() const { return x_min > x_max; }
    bool contains(int x, int y) const { return x >= x_min && x <= x_max && y >= y_min && y <= y_max; }
};

PixelBox enclosing_box(const std::vector<DepthPixel>& pixels) {
    PixelBox b;
    for (const auto& p : pixels) {
        b.x_min = std::min(b.x_min, p.x);
        b.x_max = std::max(b.x_max, p.x);
        b.y_min = std::min(b.y_min, p.y);
        b.y_max = std::max(b.y_max, p.y);
    }
    return b;
}

std::vector<int> window_starts(int extent, int window, int stride) {
    std::vector<int> starts;
    const int last = std::max(0, extent - window);
    for (int s = 0; s < last; s += stride) starts.push_back(s);
    starts.push_back(last);
    return starts;
}

}  // namespace

std::vector<DepthPixel> noise_in_window(const std::vector<DepthPixel>& near,
                                        const std::vector<DepthPixel>& far) {
    std::vector<DepthPixel> noise;
    if (near.empty()) return noise;
    const PixelBox box = enclosing_box(near);
    for (const auto& p : far) {
        if (box.contains(p.x, p.y)) noise.push_back(p);
    }
    return noise;
}

std::vector<PixelWindow> sliding_windows(ImageSize size, int window_size, int stride) {
    std::vector<PixelWindow> windows;
    if (size.width <= 0 || size.height <= 0) return windows;
    const auto xs = window_starts(size.width, window_size, stride);
    const auto ys = window_starts(size.height, window_size, stride);
    const int w = std::min(window_size, size.width);
    const int h = std::min(window_size, size.height);
    windows.reserve(xs.size() * ys.size());
    for (int y : ys) {
        for (int x : xs) windows.push_back({x, y, w, h});
    }
    return windows;
}

namespace {

// Occupied pixels in row-major order. Every pixel owns a run of `order`: the winner (nearest,
// lowest index on ties) first, then the points hidden behind it.
struct OccupiedPixels {
    std::vector<std::size_t> row_begin;  // height + 1 offsets into the cell arrays
    std::vector<int> x;
    std::vector<double> depth;
    std::vector<std::size_t> run_begin;  // offsets into order, one more than cells
    std::vector<std::size_t> order;
};

OccupiedPixels occupied_pixels(const ProjectedPointSet& points, ImageSize size) {
    std::vector<std::size_t> pixel(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const ProjectedPoint& p = points[i];
        const int x = static_cast<int>(std::floor(p.u));
        const int y = static_cast<int>(std::floor(p.v));
        if (x < 0 || y < 0 || x >= size.width || y >= size.height) {
            throw DataError("projected point outside the depth map");
        }
        if (!(p.depth > 0.0)) throw DataError("projected point with non-positive depth");
        pixel[i] = static_cast<std::size_t>(y) * size.width + x;
    }

    OccupiedPixels occ;
    occ.order.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) occ.order[i] = i;
    std::sort(occ.order.begin(), occ.order.end(), [&](std::size_t a, std::size_t b) {
        if (pixel[a] != pixel[b]) return pixel[a] < pixel[b];
        if (points[a].depth != points[b].depth) return points[a].depth < points[b].depth;
        return a < b;
    });

    occ.row_begin.assign(static_cast<std::size_t>(size.height) + 1, 0);
    for (std::size_t k = 0; k < occ.order.size(); ++k) {
        const std::size_t pix = pixel[occ.order[k]];
        if (k > 0 && pixel[occ.order[k - 1]] == pix) continue;
        occ.x.push_back(static_cast<int>(pix % size.width));
        occ.depth.push_back(points[occ.order[k]].depth);
        occ.run_begin.push_back(k);
        ++occ.row_begin[pix / size.width + 1];
    }
    occ.run_begin.push_back(occ.order.size());
    for (std::size_t y = 0; y < static_cast<std::size_t>(size.height); ++y) occ.row_begin[y + 1] += occ.row_begin[y];
    return occ;
}

}  // namespace

RefinedPointSet refine(const ProjectedPointSet& points, ImageSize size, const RefinementConfig& cfg) {
    cfg.validate();
    const OccupiedPixels occ = occupied_pixels(points, size);

    constexpr std::size_t kUnflagged = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> flagged_by(points.size(), kUnflagged);
    auto flag = [&](std::size_t entry, std::size_t window) {
        if (flagged_by[entry] == kUnflagged) flagged_by[entry] = window;
    };

    const auto windows = sliding_windows(size, cfg.window_size, cfg.stride);
    std::vector<std::pair<std::size_t, std::size_t>> rows;  // cell range per window row
    for (std::size_t wi = 0; wi < windows.size(); ++wi) {
        const PixelWindow& win = windows[wi];
        const int x1 = std::min(win.x + win.width, size.width);
        const int y1 = std::min(win.y + win.height, size.height);

        rows.clear();
        double d_min = std::numeric_limits<double>::infinity();
        for (int y = win.y; y < y1; ++y) {
            const auto first = occ.x.begin() + static_cast<std::ptrdiff_t>(occ.row_begin[y]);
            const auto last = occ.x.begin() + static_cast<std::ptrdiff_t>(occ.row_begin[y + 1]);
            const auto lo = std::lower_bound(first, last, win.x);
            const auto hi = std::lower_bound(lo, last, x1);
            const auto b = static_cast<std::size_t>(lo - occ.x.begin());
            const auto e = static_cast<std::size_t>(hi - occ.x.begin());
            rows.emplace_back(b, e);
            for (std::size_t c = b; c < e; ++c) d_min = std::min(d_min, occ.depth[c]);
        }
        if (!std::isfinite(d_min)) continue;

        PixelBox box;
        for (std::size_t r = 0; r < rows.size(); ++r) {
            for (std::size_t c = rows[r].first; c < rows[r].second; ++c) {
                if ((occ.depth[c] - d_min) / d_min < cfg.tau_depth) {
                    const int y = win.y + static_cast<int>(r);
                    box.x_min = std::min(box.x_min, occ.x[c]);
                    box.x_max = std::max(box.x_max, occ.x[c]);
                    box.y_min = std::min(box.y_min, y);
                    box.y_max = std::max(box.y_max, y);
                }
            }
        }

        for (int y = box.y_min; y <= box.y_max; ++y) {
            const auto& [b, e] = rows[static_cast<std::size_t>(y - win.y)];
            for (std::size_t c = b; c < e; ++c) {
                if (occ.x[c] < box.x_min || occ.x[c] > box.x_max) continue;
                for (std::size_t k = occ.run_begin[c]; k < occ.run_begin[c + 1]; ++k) {
                    const std::size_t i = occ.order[k];
                    if ((points[i].depth - d_min) / d_min >= cfg.tau_depth) flag(i, wi);
                }
            }
        }
    }

    RefinedPointSet out;
    out.kept.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (flagged_by[i] == kUnflagged) {
            out.kept.push_back(points[i]);
        } else {
            out.removed.push_back({points[i], flagged_by[i]});
        }
    }
    return out;
}

}  // namespace lidarseg
