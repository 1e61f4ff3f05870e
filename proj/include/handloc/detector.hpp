#pragma once

#include <filesystem>
#include <vector>

#include "handloc/geometry.hpp"
#include "handloc/image.hpp"
#include "handloc/preprocess.hpp"

namespace handloc {

// One ink blob with the features the classifier looks at. bbox and
// pixel_count describe the raw ink; the column profile irregularity is
// measured on the merged (post-morphology) component.
struct RegionCandidate {
    BBox bbox;
    int pixel_count = 0;
    double fill_ratio = 0.0;
    int height = 0;
    int width = 0;
    double ocr_overlap = 0.0;   // max fraction of bbox covered by one high-conf word
    double irregularity = 0.0;  // clamp(peak deviation of column ink profile / mean, 0, 1)
};

struct Detection {
    BBox bbox;
    double confidence = 0.0;
};

struct DetectorConfig {
    int min_area = 80;             // candidates below this many ink pixels are dropped
    double ocr_overlap_max = 0.5;  // candidates mostly covered by OCR words are dropped
    double conf_threshold = 0.8;   // postprocess defaults
    double containment = 0.9;
    double ocr_conf_threshold = 0.7;
    // Morphology kernels that merge characters into word/region blobs,
    // given for ref_width-wide pages and scaled linearly with image width.
    int close_w = 5;
    int close_h = 1;
    int dilate_w = 9;
    int dilate_h = 3;
    int ref_width = 1000;
    // Narrow erase bands here: the median filter mops up any 1px rule left
    // between the bands, and the gaps stay narrow enough for the dilation to
    // re-bridge strokes the bands cut through.
    LineRemovalConfig line_removal{.thickness = 3.0};
};

DetectorConfig load_detector_config(const std::filesystem::path& path);
void save_detector_config(const DetectorConfig& cfg, const std::filesystem::path& path);

// erase lines -> median filter -> negate -> otsu -> close + dilate ->
// 8-connected components, one candidate each.
std::vector<RegionCandidate> extract_components(const GrayImage& img,
                                                const std::vector<OcrWord>& words,
                                                const DetectorConfig& cfg = {});

// Drops small or OCR-covered candidates; the rest score
// (1 - ocr_overlap) * irregularity.
std::vector<Detection> classify_candidates(const std::vector<RegionCandidate>& cands,
                                           const DetectorConfig& cfg = {});

// Confidence filter (>= threshold), then containment suppression: scanning
// surviving boxes from smallest area up, a box dies when its intersection
// with a larger surviving box exceeds `containment` of its own area.
// Survivors keep their relative input order; boxes are never modified.
std::vector<Detection> postprocess_detections(std::vector<Detection> dets,
                                              double conf_threshold = 0.8,
                                              double containment = 0.9);

} // namespace handloc
