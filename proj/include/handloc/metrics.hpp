#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "handloc/geometry.hpp"

namespace handloc {

// Indices of boxes having at least one counterpart with IoU strictly above
// the threshold. Matching is existence-based; many-to-one is allowed.
struct MatchResult {
    std::vector<std::size_t> matched_gt;   // indices into G, ascending
    std::vector<std::size_t> matched_pred; // indices into P, ascending
    double threshold = 0.0;
};

struct ImageScore {
    std::string image_id;
    double ap_fp_80 = 0.0;
    double ap_fp_50 = 0.0;
    double giou = 0.0;
    int n_pred = 0;
    int n_gt = 0;
    bool bad_quality = false;
};

struct AggregateReport {
    double ap_fp_80 = 0.0;
    double ap_fp_80_star = 0.0;                // bad-quality images scored as 0.35
    std::optional<double> ap_fp_80_plus;       // bad-quality images excluded; absent if all are
    double ap_fp_50 = 0.0;
    double giou = 0.0;
    int n_images = 0;
    int n_bad_quality = 0;
};

// Requires 0 < T < 1 (ConfigError otherwise).
MatchResult match_sets(const BoxSet& pred, const BoxSet& gt, double threshold);

// Recall fraction times 0.75^(unmatched prediction count); the |G| = 0 branch
// drops the recall factor. Always in [0,1].
double ap_fp(const BoxSet& pred, const BoxSet& gt, double threshold);

ImageScore evaluate_image(const std::string& image_id, const BoxSet& pred, const BoxSet& gt);

// Flags images with more than max_boxes predictions, then trims flags so at
// most floor(cap * n_images) remain, keeping the images with the most boxes
// (ties keep the lexicographically smaller image_id). cap must lie in (0,1].
std::vector<ImageScore> mark_bad_quality(std::vector<ImageScore> scores,
                                         int max_boxes = 3, double cap = 0.5);

// Plain/star/plus means over the per-image scores; list must be nonempty.
AggregateReport aggregate(const std::vector<ImageScore>& scores);

} // namespace handloc
