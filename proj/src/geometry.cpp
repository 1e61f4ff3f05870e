#include "handloc/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace handloc {

bool BBox::valid() const {
    return std::isfinite(x_min) && std::isfinite(y_min) &&
           std::isfinite(x_max) && std::isfinite(y_max) &&
           x_min <= x_max && y_min <= y_max;
}

double area(const BBox& b) {
    return b.area();
}

std::optional<BBox> intersect(const BBox& a, const BBox& b) {
    BBox r{std::max(a.x_min, b.x_min), std::max(a.y_min, b.y_min),
           std::min(a.x_max, b.x_max), std::min(a.y_max, b.y_max)};
    if (r.x_min >= r.x_max || r.y_min >= r.y_max)
        return std::nullopt;
    return r;
}

double iou(const BBox& a, const BBox& b) {
    const auto inter = intersect(a, b);
    if (!inter)
        return 0.0;
    const double ai = inter->area();
    const double au = a.area() + b.area() - ai;
    if (au <= 0.0)
        return 0.0;
    return ai / au;
}

double union_area(std::span<const BBox> boxes) {
    std::vector<double> xs;
    xs.reserve(boxes.size() * 2);
    for (const BBox& b : boxes) {
        if (b.degenerate())
            continue;
        xs.push_back(b.x_min);
        xs.push_back(b.x_max);
    }
    if (xs.empty())
        return 0.0;
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

    double total = 0.0;
    std::vector<std::pair<double, double>> spans;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        const double x0 = xs[i], x1 = xs[i + 1];
        spans.clear();
        for (const BBox& b : boxes) {
            if (b.degenerate())
                continue;
            if (b.x_min <= x0 && b.x_max >= x1)
                spans.emplace_back(b.y_min, b.y_max);
        }
        if (spans.empty())
            continue;
        std::sort(spans.begin(), spans.end());
        double covered = 0.0;
        double cur_lo = spans[0].first, cur_hi = spans[0].second;
        for (std::size_t k = 1; k < spans.size(); ++k) {
            if (spans[k].first > cur_hi) {
                covered += cur_hi - cur_lo;
                cur_lo = spans[k].first;
                cur_hi = spans[k].second;
            } else {
                cur_hi = std::max(cur_hi, spans[k].second);
            }
        }
        covered += cur_hi - cur_lo;
        total += covered * (x1 - x0);
    }
    return total;
}

double region_iou(std::span<const BBox> p, std::span<const BBox> g) {
    const double ap = union_area(p);
    const double ag = union_area(g);
    if (ap <= 0.0 || ag <= 0.0)
        return 0.0;

    BoxSet both;
    both.reserve(p.size() + g.size());
    both.insert(both.end(), p.begin(), p.end());
    both.insert(both.end(), g.begin(), g.end());
    const double au = union_area(both);
    if (au <= 0.0)
        return 0.0;
    const double ai = ap + ag - au;
    if (ai <= 0.0)
        return 0.0;
    return std::min(ai / au, 1.0);
}

} // namespace handloc
