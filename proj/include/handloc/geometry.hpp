#pragma once

#include <optional>
#include <span>
#include <vector>

namespace handloc {

// Axis-aligned rectangle in continuous pixel coordinates, corner-based.
struct BBox {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }
    bool degenerate() const { return area() <= 0.0; }
    // Finite coordinates with x_min <= x_max and y_min <= y_max.
    bool valid() const;

    bool operator==(const BBox&) const = default;
};

// Order carries no meaning for region operations.
using BoxSet = std::vector<BBox>;

double area(const BBox& b);

// Overlap rectangle; empty when the overlap has zero area (incl. mere edge contact).
std::optional<BBox> intersect(const BBox& a, const BBox& b);

// Intersection over union. Two degenerate boxes yield 0 (never 0/0).
double iou(const BBox& a, const BBox& b);

// Exact area of the union region (coordinate-compressed column sweep).
double union_area(std::span<const BBox> boxes);

// IoU of the union regions of two box sets. 0 when either region is empty.
double region_iou(std::span<const BBox> p, std::span<const BBox> g);

} // namespace handloc
