#include "handloc/preprocess.hpp"

#include <algorithm>
#include <cmath>

#include "handloc/errors.hpp"

namespace handloc {

GrayImage mask_ocr_words(const GrayImage& img, const std::vector<OcrWord>& words,
                         double conf_threshold) {
    GrayImage out = img;
    for (const OcrWord& w : words) {
        if (w.conf <= conf_threshold)
            continue;
        // A pixel cell [i,i+1) x [j,j+1) is covered when it meets the box.
        const int x0 = std::max(0, static_cast<int>(std::floor(w.bbox.x_min)));
        const int x1 = std::min(img.width, static_cast<int>(std::ceil(w.bbox.x_max)));
        const int y0 = std::max(0, static_cast<int>(std::floor(w.bbox.y_min)));
        const int y1 = std::min(img.height, static_cast<int>(std::ceil(w.bbox.y_max)));
        for (int y = y0; y < y1; ++y)
            for (int x = x0; x < x1; ++x)
                out.at(x, y) = 1.0f;
    }
    return out;
}

std::vector<HoughLine> detect_ruled_lines(const GrayImage& img, const LineRemovalConfig& cfg) {
    const GrayImage edges = canny(img, cfg.canny_low, cfg.canny_high);
    std::vector<HoughLine> lines =
        hough_lines(edges, cfg.vote_threshold, cfg.dtheta_deg, cfg.dr);
    std::erase_if(lines, [&](const HoughLine& l) {
        const double to_horizontal = std::abs(l.theta_deg - 90.0);
        const double to_vertical = std::min(l.theta_deg, 180.0 - l.theta_deg);
        return to_horizontal > cfg.angle_tol_deg && to_vertical > cfg.angle_tol_deg;
    });
    return lines;
}

GrayImage remove_ruled_lines(const GrayImage& img, const LineRemovalConfig& cfg,
                             std::vector<ErasedBand>* erased) {
    std::vector<HoughLine> lines = detect_ruled_lines(img, cfg);
    std::sort(lines.begin(), lines.end(), [](const HoughLine& a, const HoughLine& b) {
        if (a.theta_deg != b.theta_deg)
            return a.theta_deg < b.theta_deg;
        return a.r < b.r;
    });

    // A stroke arrives as its two boundary edges a few pixels apart; collapse
    // runs of close parallel lines into one band spanning the stroke.
    std::vector<ErasedBand> bands;
    std::size_t i = 0;
    while (i < lines.size()) {
        std::size_t j = i;
        int votes = lines[i].votes;
        while (j + 1 < lines.size() &&
               lines[j + 1].theta_deg - lines[j].theta_deg <= cfg.dtheta_deg &&
               std::abs(lines[j + 1].r - lines[j].r) <= 2.0 * cfg.dr + 3.0) {
            ++j;
            votes = std::max(votes, lines[j].votes);
        }
        const double span = lines[j].r - lines[i].r;
        ErasedBand band;
        band.line = {(lines[i].r + lines[j].r) / 2.0, lines[i].theta_deg, votes};
        band.thickness = std::max(cfg.thickness, span - 1.0);
        bands.push_back(band);
        i = j + 1;
    }
    if (erased)
        *erased = bands;

    GrayImage out = img;
    for (const ErasedBand& band : bands)
        out = erase_lines(out, {band.line}, band.thickness);
    return out;
}

GrayImage make_pre_plane(const GrayImage& img, const std::vector<OcrWord>& words,
                         const LineRemovalConfig& cfg, std::vector<ErasedBand>* erased,
                         double conf_threshold) {
    const GrayImage masked = mask_ocr_words(img, words, conf_threshold);
    return remove_ruled_lines(masked, cfg, erased);
}

GrayImage resize_to_model(const GrayImage& img, int side) {
    return resize_bilinear(img, side, side);
}

BBox box_to_model(const BBox& b, int orig_w, int orig_h, int side) {
    if (orig_w <= 0 || orig_h <= 0 || side <= 0)
        throw ConfigError("box_to_model: dimensions must be positive");
    const double sx = static_cast<double>(side) / orig_w;
    const double sy = static_cast<double>(side) / orig_h;
    return {b.x_min * sx, b.y_min * sy, b.x_max * sx, b.y_max * sy};
}

BBox box_from_model(const BBox& b, int orig_w, int orig_h, int side) {
    if (orig_w <= 0 || orig_h <= 0 || side <= 0)
        throw ConfigError("box_from_model: dimensions must be positive");
    const double sx = static_cast<double>(orig_w) / side;
    const double sy = static_cast<double>(orig_h) / side;
    return {b.x_min * sx, b.y_min * sy, b.x_max * sx, b.y_max * sy};
}

FusionVariant parse_variant(const std::string& name) {
    if (name == "o") return FusionVariant::O;
    if (name == "o-") return FusionVariant::ONeg;
    if (name == "pre") return FusionVariant::Pre;
    if (name == "pre-") return FusionVariant::PreNeg;
    if (name == "o/pre") return FusionVariant::OPre;
    if (name == "o-/pre-") return FusionVariant::ONegPreNeg;
    if (name == "o/o-/pre") return FusionVariant::OONegPre;
    if (name == "o/o-/pre-") return FusionVariant::OONegPreNeg;
    throw ConfigError("unknown fusion variant '" + name + "'");
}

std::string to_string(FusionVariant v) {
    switch (v) {
        case FusionVariant::O: return "o";
        case FusionVariant::ONeg: return "o-";
        case FusionVariant::Pre: return "pre";
        case FusionVariant::PreNeg: return "pre-";
        case FusionVariant::OPre: return "o/pre";
        case FusionVariant::ONegPreNeg: return "o-/pre-";
        case FusionVariant::OONegPre: return "o/o-/pre";
        case FusionVariant::OONegPreNeg: return "o/o-/pre-";
    }
    throw ConfigError("unknown fusion variant");
}

std::vector<std::string> variant_terms(FusionVariant v) {
    const std::string name = to_string(v);
    std::vector<std::string> terms;
    std::size_t start = 0;
    while (true) {
        const std::size_t slash = name.find('/', start);
        if (slash == std::string::npos) {
            terms.push_back(name.substr(start));
            break;
        }
        terms.push_back(name.substr(start, slash - start));
        start = slash + 1;
    }
    return terms;
}

bool variant_needs_pre(FusionVariant v) {
    return v != FusionVariant::O && v != FusionVariant::ONeg;
}

ChannelStack fuse_channels(const GrayImage& img, const GrayImage& pre, FusionVariant variant) {
    if (!img.same_size(pre))
        throw ValidationError("fuse_channels: plane dimensions differ");
    ChannelStack stack;
    stack.variant = variant;
    for (const std::string& term : variant_terms(variant)) {
        if (term == "o")
            stack.planes.push_back(img);
        else if (term == "o-")
            stack.planes.push_back(negate(img));
        else if (term == "pre")
            stack.planes.push_back(pre);
        else if (term == "pre-")
            stack.planes.push_back(negate(pre));
    }
    return stack;
}

} // namespace handloc
