#include "handloc/detector.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "handloc/errors.hpp"
#include "handloc/imageops.hpp"

namespace handloc {
namespace {

int scale_odd(int base, int img_width, int ref_width) {
    if (img_width <= 0 || ref_width <= 0)
        return base;
    const double scaled = static_cast<double>(base) * img_width / ref_width;
    int v = static_cast<int>(std::lround(scaled));
    if (v % 2 == 0)
        v += (scaled > v) ? 1 : -1;
    return std::max(1, v);
}

} // namespace

DetectorConfig load_detector_config(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot open detector config " + path.string());
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("detector config " + path.string() + ": " + e.what());
    }

    DetectorConfig cfg;
    try {
        cfg.min_area = j.value("min_area", cfg.min_area);
        cfg.ocr_overlap_max = j.value("ocr_overlap_max", cfg.ocr_overlap_max);
        cfg.conf_threshold = j.value("conf_threshold", cfg.conf_threshold);
        cfg.containment = j.value("containment", cfg.containment);
        cfg.ocr_conf_threshold = j.value("ocr_conf_threshold", cfg.ocr_conf_threshold);
        if (j.contains("morphology")) {
            const auto& m = j.at("morphology");
            cfg.close_w = m.value("close_w", cfg.close_w);
            cfg.close_h = m.value("close_h", cfg.close_h);
            cfg.dilate_w = m.value("dilate_w", cfg.dilate_w);
            cfg.dilate_h = m.value("dilate_h", cfg.dilate_h);
            cfg.ref_width = m.value("ref_width", cfg.ref_width);
        }
        if (j.contains("line_removal")) {
            const auto& l = j.at("line_removal");
            cfg.line_removal.canny_low = l.value("canny_low", cfg.line_removal.canny_low);
            cfg.line_removal.canny_high = l.value("canny_high", cfg.line_removal.canny_high);
            cfg.line_removal.vote_threshold =
                l.value("vote_threshold", cfg.line_removal.vote_threshold);
            cfg.line_removal.angle_tol_deg =
                l.value("angle_tol_deg", cfg.line_removal.angle_tol_deg);
            cfg.line_removal.thickness = l.value("thickness", cfg.line_removal.thickness);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("detector config " + path.string() + ": " + e.what());
    }
    if (cfg.min_area < 0 || cfg.ocr_overlap_max < 0.0 || cfg.ocr_overlap_max > 1.0)
        throw ConfigError("detector config: min_area or ocr_overlap_max out of range");
    return cfg;
}

void save_detector_config(const DetectorConfig& cfg, const std::filesystem::path& path) {
    nlohmann::json j;
    j["min_area"] = cfg.min_area;
    j["ocr_overlap_max"] = cfg.ocr_overlap_max;
    j["conf_threshold"] = cfg.conf_threshold;
    j["containment"] = cfg.containment;
    j["ocr_conf_threshold"] = cfg.ocr_conf_threshold;
    j["morphology"] = {{"close_w", cfg.close_w},
                       {"close_h", cfg.close_h},
                       {"dilate_w", cfg.dilate_w},
                       {"dilate_h", cfg.dilate_h},
                       {"ref_width", cfg.ref_width}};
    j["line_removal"] = {{"canny_low", cfg.line_removal.canny_low},
                         {"canny_high", cfg.line_removal.canny_high},
                         {"vote_threshold", cfg.line_removal.vote_threshold},
                         {"angle_tol_deg", cfg.line_removal.angle_tol_deg},
                         {"thickness", cfg.line_removal.thickness}};
    std::ofstream f(path);
    if (!f)
        throw IoError("cannot write detector config " + path.string());
    f << j.dump(2) << "\n";
}

std::vector<RegionCandidate> extract_components(const GrayImage& img,
                                                const std::vector<OcrWord>& words,
                                                const DetectorConfig& cfg) {
    const GrayImage no_lines = remove_ruled_lines(img, cfg.line_removal);
    const GrayImage filtered = median_filter(no_lines, 1);
    const GrayImage ink_bright = negate(filtered);
    const GrayImage ink = otsu_threshold(ink_bright).mask;

    const int close_w = scale_odd(cfg.close_w, img.width, cfg.ref_width);
    const int close_h = scale_odd(cfg.close_h, img.width, cfg.ref_width);
    const int dilate_w = scale_odd(cfg.dilate_w, img.width, cfg.ref_width);
    const int dilate_h = scale_odd(cfg.dilate_h, img.width, cfg.ref_width);
    GrayImage merged = morphology(ink, MorphOp::Close, close_w, close_h);
    merged = morphology(merged, MorphOp::Dilate, dilate_w, dilate_h);

    const ComponentLabels comps = label_components(merged);
    if (comps.count == 0)
        return {};

    struct Extent {
        int min_x = 1 << 30, min_y = 1 << 30, max_x = -1, max_y = -1;
        int ink_count = 0;
        int blob_min_x = 1 << 30, blob_max_x = -1;
    };
    std::vector<Extent> ext(comps.count);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const int label = comps.labels[static_cast<std::size_t>(y) * img.width + x];
            if (label < 0)
                continue;
            Extent& e = ext[label];
            e.blob_min_x = std::min(e.blob_min_x, x);
            e.blob_max_x = std::max(e.blob_max_x, x);
            if (ink.at(x, y) >= 0.5f) {
                e.min_x = std::min(e.min_x, x);
                e.min_y = std::min(e.min_y, y);
                e.max_x = std::max(e.max_x, x);
                e.max_y = std::max(e.max_y, y);
                ++e.ink_count;
            }
        }
    }

    // Column ink-height profile of the merged blob (vertical span per column),
    // for the irregularity feature.
    struct Span {
        int lo = 1 << 30, hi = -1;
    };
    std::vector<std::vector<Span>> profiles(comps.count);
    for (int c = 0; c < comps.count; ++c) {
        if (ext[c].blob_max_x >= ext[c].blob_min_x)
            profiles[c].assign(ext[c].blob_max_x - ext[c].blob_min_x + 1, Span{});
    }
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const int label = comps.labels[static_cast<std::size_t>(y) * img.width + x];
            if (label < 0)
                continue;
            Span& s = profiles[label][x - ext[label].blob_min_x];
            s.lo = std::min(s.lo, y);
            s.hi = std::max(s.hi, y);
        }
    }

    std::vector<RegionCandidate> out;
    for (int c = 0; c < comps.count; ++c) {
        const Extent& e = ext[c];
        if (e.ink_count == 0)
            continue;
        RegionCandidate cand;
        cand.bbox = {static_cast<double>(e.min_x), static_cast<double>(e.min_y),
                     static_cast<double>(e.max_x + 1), static_cast<double>(e.max_y + 1)};
        cand.pixel_count = e.ink_count;
        cand.width = e.max_x - e.min_x + 1;
        cand.height = e.max_y - e.min_y + 1;
        cand.fill_ratio = static_cast<double>(e.ink_count) / cand.bbox.area();

        std::vector<int> heights;
        heights.reserve(profiles[c].size());
        for (const Span& s : profiles[c])
            if (s.hi >= s.lo)
                heights.push_back(s.hi - s.lo + 1);
        const double mean = std::accumulate(heights.begin(), heights.end(), 0.0) /
                            static_cast<double>(heights.size());
        double peak_dev = 0.0;
        for (int hcol : heights)
            peak_dev = std::max(peak_dev, std::abs(hcol - mean));
        cand.irregularity = mean > 0.0 ? std::clamp(peak_dev / mean, 0.0, 1.0) : 0.0;

        for (const OcrWord& w : words) {
            if (w.conf <= cfg.ocr_conf_threshold)
                continue;
            if (const auto inter = intersect(cand.bbox, w.bbox))
                cand.ocr_overlap = std::max(cand.ocr_overlap, inter->area() / cand.bbox.area());
        }
        out.push_back(std::move(cand));
    }
    return out;
}

std::vector<Detection> classify_candidates(const std::vector<RegionCandidate>& cands,
                                           const DetectorConfig& cfg) {
    std::vector<Detection> dets;
    for (const RegionCandidate& c : cands) {
        if (c.pixel_count < cfg.min_area || c.ocr_overlap > cfg.ocr_overlap_max)
            continue;
        dets.push_back({c.bbox, (1.0 - c.ocr_overlap) * c.irregularity});
    }
    return dets;
}

std::vector<Detection> postprocess_detections(std::vector<Detection> dets,
                                              double conf_threshold, double containment) {
    std::vector<std::size_t> order; // surviving indices, ascending (area, input)
    for (std::size_t i = 0; i < dets.size(); ++i)
        if (dets[i].confidence >= conf_threshold)
            order.push_back(i);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return dets[a].bbox.area() < dets[b].bbox.area();
    });

    std::vector<bool> alive(dets.size(), false);
    for (std::size_t i : order)
        alive[i] = true;

    for (std::size_t ii = 0; ii < order.size(); ++ii) {
        const std::size_t i = order[ii];
        if (!alive[i])
            continue;
        const double ai = dets[i].bbox.area();
        if (ai <= 0.0)
            continue;
        for (std::size_t jj = ii + 1; jj < order.size() && alive[i]; ++jj) {
            const std::size_t j = order[jj];
            if (!alive[j])
                continue;
            const auto inter = intersect(dets[i].bbox, dets[j].bbox);
            if (!inter || inter->area() / ai <= containment)
                continue;
            if (dets[j].bbox.area() > ai)
                alive[i] = false; // the smaller box is omitted
            else
                alive[j] = false; // equal areas: the later record goes
        }
    }

    std::vector<Detection> out;
    for (std::size_t i = 0; i < dets.size(); ++i)
        if (alive[i])
            out.push_back(dets[i]);
    return out;
}

} // namespace handloc
