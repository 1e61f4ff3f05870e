#pragma once

#include <vector>

#include "handloc/image.hpp"

namespace handloc {

// Straight line in Hesse normal form r = x*cos(theta) + y*sin(theta),
// with pixel coordinates (x = column, y = row) and theta in degrees [0,180).
struct HoughLine {
    double r = 0.0;
    double theta_deg = 0.0;
    int votes = 0;
};

enum class MorphOp { Dilate, Erode, Open, Close };

// out(x,y) = 1 - in(x,y)
GrayImage negate(const GrayImage& img);

// Median of the (2*radius+1)^2 neighborhood, replicate borders. radius >= 1.
GrayImage median_filter(const GrayImage& img, int radius = 1);

struct OtsuResult {
    double threshold = 0.0;
    GrayImage mask; // 1 where intensity > threshold
};

// Global threshold maximizing between-class variance over a 256-bin
// histogram. Constant images threshold at their own value (all-zero mask).
OtsuResult otsu_threshold(const GrayImage& img);

// Rectangular structuring element, dimensions odd; outside the image counts
// as background (0). ConfigError on even dimensions.
GrayImage morphology(const GrayImage& mask, MorphOp op, int se_width, int se_height);

// Gaussian(sigma 1.4, 5x5) -> Sobel -> direction-quantized non-maximum
// suppression -> double threshold with 8-connected hysteresis. low/high are
// fractions of the maximum representable Sobel magnitude; 0 <= low < high <= 1.
GrayImage canny(const GrayImage& img, double low, double high);

// Accumulator over (r, theta) with r in [-diag, +diag]; returns 8-neighborhood
// local maxima with votes >= vote_threshold, sorted by votes descending.
std::vector<HoughLine> hough_lines(const GrayImage& edges, int vote_threshold,
                                   double dtheta_deg = 1.0, double dr = 1.0);

// Paints white (1.0) over every pixel within thickness/2 of an infinite line.
GrayImage erase_lines(const GrayImage& img, const std::vector<HoughLine>& lines,
                      double thickness = 3.0);

struct ComponentLabels {
    std::vector<int> labels; // row-major; -1 = background, else component id
    int count = 0;
};

// 8-connected component labeling of a binary mask.
ComponentLabels label_components(const GrayImage& mask);

// Bilinear resampling (half-pixel-center convention, clamped at borders).
GrayImage resize_bilinear(const GrayImage& img, int out_width, int out_height);

} // namespace handloc
