#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "handloc/dataset.hpp"
#include "handloc/image.hpp"
#include "handloc/metrics.hpp"

namespace handloc {

struct EvalOptions {
    int bq_max_boxes = 3;
    double bq_cap = 0.5;
    int jobs = 1; // per-image scoring fan-out; output is order-independent
};

struct EvalResult {
    std::vector<ImageScore> images; // manifest order
    AggregateReport aggregate;
};

// Scores every manifest entry against its predictions (missing image -> empty
// prediction set), applies the bad-quality policy, then aggregates.
EvalResult evaluate_dataset(const DatasetManifest& manifest, const PredictionFile& preds,
                            const EvalOptions& opts = {});

// Machine report; serialization is byte-stable for identical inputs.
std::string report_to_json(const EvalResult& result);

// Human-readable table, percentages to one decimal.
std::string format_table(const EvalResult& result);

void write_report(const EvalResult& result, const std::filesystem::path& path);

// Grayscale base replicated to RGB, 2px green ground-truth rectangles, then
// 2px red prediction rectangles (red wins on overlap).
RgbImage render_overlay(const GrayImage& img, const BoxSet& gt, const BoxSet& pred);

} // namespace handloc
