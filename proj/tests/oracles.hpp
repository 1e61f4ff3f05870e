#pragma once

// Test-side reference implementations, deliberately naive and independent of
// the library's computation paths.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "handloc/geometry.hpp"

namespace oracle {

// Pixel rasterization of integer-coordinate boxes on a grid: cell (x,y) is
// covered by box b iff the unit cell [x,x+1)x[y,y+1) lies inside b.
inline std::vector<std::uint8_t> rasterize(const handloc::BoxSet& boxes, int grid) {
    std::vector<std::uint8_t> cells(static_cast<std::size_t>(grid) * grid, 0);
    for (const handloc::BBox& b : boxes) {
        const int x0 = std::max(0, static_cast<int>(std::ceil(b.x_min)));
        const int y0 = std::max(0, static_cast<int>(std::ceil(b.y_min)));
        const int x1 = std::min(grid, static_cast<int>(std::floor(b.x_max)));
        const int y1 = std::min(grid, static_cast<int>(std::floor(b.y_max)));
        for (int y = y0; y < y1; ++y)
            for (int x = x0; x < x1; ++x)
                cells[static_cast<std::size_t>(y) * grid + x] = 1;
    }
    return cells;
}

inline long count_cells(const std::vector<std::uint8_t>& cells) {
    long n = 0;
    for (std::uint8_t c : cells)
        n += c;
    return n;
}

inline double union_area(const handloc::BoxSet& boxes, int grid) {
    return static_cast<double>(count_cells(rasterize(boxes, grid)));
}

inline double iou(const handloc::BBox& a, const handloc::BBox& b, int grid) {
    const auto ca = rasterize({a}, grid);
    const auto cb = rasterize({b}, grid);
    long inter = 0, uni = 0;
    for (std::size_t i = 0; i < ca.size(); ++i) {
        inter += ca[i] && cb[i];
        uni += ca[i] || cb[i];
    }
    if (uni == 0)
        return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

inline double region_iou(const handloc::BoxSet& p, const handloc::BoxSet& g, int grid) {
    const auto cp = rasterize(p, grid);
    const auto cg = rasterize(g, grid);
    long inter = 0, uni = 0;
    for (std::size_t i = 0; i < cp.size(); ++i) {
        inter += cp[i] && cg[i];
        uni += cp[i] || cg[i];
    }
    if (count_cells(cp) == 0 || count_cells(cg) == 0 || uni == 0)
        return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

// Full IoU matrix first, then the set-builder match definition literally.
struct MatchOracle {
    std::vector<std::size_t> matched_gt;
    std::vector<std::size_t> matched_pred;
};

inline MatchOracle match_sets(const handloc::BoxSet& pred, const handloc::BoxSet& gt,
                              double threshold) {
    std::vector<std::vector<double>> m(pred.size(), std::vector<double>(gt.size(), 0.0));
    for (std::size_t pi = 0; pi < pred.size(); ++pi)
        for (std::size_t gi = 0; gi < gt.size(); ++gi)
            m[pi][gi] = handloc::iou(pred[pi], gt[gi]);
    MatchOracle r;
    for (std::size_t gi = 0; gi < gt.size(); ++gi) {
        bool any = false;
        for (std::size_t pi = 0; pi < pred.size(); ++pi)
            any = any || m[pi][gi] > threshold;
        if (any)
            r.matched_gt.push_back(gi);
    }
    for (std::size_t pi = 0; pi < pred.size(); ++pi) {
        bool any = false;
        for (std::size_t gi = 0; gi < gt.size(); ++gi)
            any = any || m[pi][gi] > threshold;
        if (any)
            r.matched_pred.push_back(pi);
    }
    return r;
}

// Random integer-coordinate box on [0, grid]^2, non-degenerate.
inline handloc::BBox random_box(std::mt19937_64& rng, int grid) {
    const auto pick = [&](int lo, int hi) {
        return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
    };
    const int x0 = pick(0, grid - 1);
    const int y0 = pick(0, grid - 1);
    const int x1 = pick(x0 + 1, grid);
    const int y1 = pick(y0 + 1, grid);
    return {static_cast<double>(x0), static_cast<double>(y0), static_cast<double>(x1),
            static_cast<double>(y1)};
}

inline handloc::BoxSet random_boxes(std::mt19937_64& rng, int grid, int max_boxes) {
    handloc::BoxSet boxes;
    const auto n = rng() % static_cast<std::uint64_t>(max_boxes + 1);
    for (std::uint64_t i = 0; i < n; ++i)
        boxes.push_back(random_box(rng, grid));
    return boxes;
}

} // namespace oracle
