#pragma once

#include <string>
#include <vector>

#include "handloc/geometry.hpp"
#include "handloc/image.hpp"
#include "handloc/imageops.hpp"

namespace handloc {

// One recognized word from the OCR sidecar, in original image coordinates.
struct OcrWord {
    BBox bbox;
    std::string text;
    double conf = 0.0;
};

// Parameters of the ruled-line removal step (canny -> hough -> erase).
// The canny thresholds sit low: a 1px rule at scan contrast peaks around
// 0.12 in normalized gradient units after the Gaussian blur.
struct LineRemovalConfig {
    double canny_low = 0.04;
    double canny_high = 0.09;
    int vote_threshold = 150;
    double dtheta_deg = 1.0;
    double dr = 1.0;
    double angle_tol_deg = 2.0; // only lines this close to 0 or 90 degrees are erased
    // Canny reports a stroke as its two boundary lines, so the band painted
    // around each detected line must reach back across the stroke itself.
    double thickness = 5.0;
};

// Whitens every pixel covered by a word box whose confidence exceeds the
// threshold. Never darkens anything.
GrayImage mask_ocr_words(const GrayImage& img, const std::vector<OcrWord>& words,
                         double conf_threshold = 0.7);

// Hough lines restricted to near-horizontal/near-vertical orientations.
std::vector<HoughLine> detect_ruled_lines(const GrayImage& img, const LineRemovalConfig& cfg);

// One painted stroke band: a ruled stroke shows up as its two boundary edge
// lines, which collapse into a single band between them.
struct ErasedBand {
    HoughLine line;
    double thickness = 0.0;
};

// Erases detected ruled lines, merging parallel edge pairs a few pixels
// apart; optionally reports the painted bands.
GrayImage remove_ruled_lines(const GrayImage& img, const LineRemovalConfig& cfg,
                             std::vector<ErasedBand>* erased = nullptr);

// The "pre" plane: high-confidence OCR words whitened, then table lines erased.
GrayImage make_pre_plane(const GrayImage& img, const std::vector<OcrWord>& words,
                         const LineRemovalConfig& cfg = {},
                         std::vector<ErasedBand>* erased = nullptr,
                         double conf_threshold = 0.7);

// Anisotropic bilinear resize to side x side.
GrayImage resize_to_model(const GrayImage& img, int side = 768);

// Coordinate companions to resize_to_model (independent axis scaling).
BBox box_to_model(const BBox& b, int orig_w, int orig_h, int side = 768);
BBox box_from_model(const BBox& b, int orig_w, int orig_h, int side = 768);

// Which planes are stacked as model input; "-" marks a negated plane.
enum class FusionVariant {
    O,          // o
    ONeg,       // o-
    Pre,        // pre
    PreNeg,     // pre-
    OPre,       // o/pre
    ONegPreNeg, // o-/pre-
    OONegPre,   // o/o-/pre
    OONegPreNeg // o/o-/pre-
};

FusionVariant parse_variant(const std::string& name); // ConfigError on unknown names
std::string to_string(FusionVariant v);
std::vector<std::string> variant_terms(FusionVariant v); // e.g. {"o","o-","pre-"}
bool variant_needs_pre(FusionVariant v);

struct ChannelStack {
    FusionVariant variant = FusionVariant::O;
    std::vector<GrayImage> planes;
};

// Assembles the variant's planes in listed order; img and pre must agree in size.
ChannelStack fuse_channels(const GrayImage& img, const GrayImage& pre, FusionVariant variant);

} // namespace handloc
