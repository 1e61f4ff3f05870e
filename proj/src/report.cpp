#include "handloc/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <unordered_map>

#include <json.hpp>

#include "handloc/errors.hpp"

namespace handloc {
namespace {

std::string percent1(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v * 100.0);
    return buf;
}

} // namespace

EvalResult evaluate_dataset(const DatasetManifest& manifest, const PredictionFile& preds,
                            const EvalOptions& opts) {
    if (manifest.entries.empty())
        throw ValidationError("evaluate: manifest has no images");
    validate_predictions(preds, manifest);

    std::unordered_map<std::string, BoxSet> by_image;
    for (const PredRecord& r : preds)
        by_image[r.image_id].push_back(r.bbox);

    const std::size_t n = manifest.entries.size();
    std::vector<ImageScore> scores(n);
    auto score_range = [&](std::size_t begin, std::size_t end) {
        static const BoxSet kNoBoxes;
        for (std::size_t i = begin; i < end; ++i) {
            const ManifestEntry& e = manifest.entries[i];
            const auto it = by_image.find(e.id);
            const BoxSet& p = it == by_image.end() ? kNoBoxes : it->second;
            scores[i] = evaluate_image(e.id, p, e.gt_boxes);
        }
    };

    const int jobs = std::max(1, opts.jobs);
    if (jobs == 1 || n < 2) {
        score_range(0, n);
    } else {
        std::vector<std::future<void>> futs;
        const std::size_t chunk = (n + jobs - 1) / jobs;
        for (std::size_t begin = 0; begin < n; begin += chunk) {
            const std::size_t end = std::min(n, begin + chunk);
            futs.push_back(std::async(std::launch::async, score_range, begin, end));
        }
        for (auto& f : futs)
            f.get();
    }

    EvalResult result;
    result.images = mark_bad_quality(std::move(scores), opts.bq_max_boxes, opts.bq_cap);
    result.aggregate = aggregate(result.images);
    return result;
}

std::string report_to_json(const EvalResult& result) {
    using nlohmann::json;
    json images = json::array();
    for (const ImageScore& s : result.images) {
        images.push_back({{"image_id", s.image_id},
                          {"ap_fp_80", s.ap_fp_80},
                          {"ap_fp_50", s.ap_fp_50},
                          {"giou", s.giou},
                          {"n_pred", s.n_pred},
                          {"n_gt", s.n_gt},
                          {"bad_quality", s.bad_quality}});
    }
    const AggregateReport& a = result.aggregate;
    json aggregate = {{"ap_fp_80", a.ap_fp_80},
                      {"ap_fp_80_star", a.ap_fp_80_star},
                      {"ap_fp_80_plus", a.ap_fp_80_plus ? json(*a.ap_fp_80_plus) : json(nullptr)},
                      {"ap_fp_50", a.ap_fp_50},
                      {"giou", a.giou},
                      {"n_images", a.n_images},
                      {"n_bad_quality", a.n_bad_quality}};
    json aggregate_percent = {
        {"ap_fp_80", percent1(a.ap_fp_80)},
        {"ap_fp_80_star", percent1(a.ap_fp_80_star)},
        {"ap_fp_80_plus", a.ap_fp_80_plus ? json(percent1(*a.ap_fp_80_plus)) : json(nullptr)},
        {"ap_fp_50", percent1(a.ap_fp_50)},
        {"giou", percent1(a.giou)}};
    const json report = {
        {"images", images}, {"aggregate", aggregate}, {"aggregate_percent", aggregate_percent}};
    return report.dump(2) + "\n";
}

std::string format_table(const EvalResult& result) {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof(line), "%-24s %8s %8s %8s %7s %7s %4s\n", "image",
                  "AP_80", "AP_50", "GIoU", "n_pred", "n_gt", "BQ");
    out += line;
    for (const ImageScore& s : result.images) {
        std::snprintf(line, sizeof(line), "%-24s %8s %8s %8s %7d %7d %4s\n",
                      s.image_id.c_str(), percent1(s.ap_fp_80).c_str(),
                      percent1(s.ap_fp_50).c_str(), percent1(s.giou).c_str(), s.n_pred,
                      s.n_gt, s.bad_quality ? "yes" : "no");
        out += line;
    }
    const AggregateReport& a = result.aggregate;
    std::snprintf(line, sizeof(line),
                  "\nAP_80 %s  AP_80* %s  AP_80+ %s  AP_50 %s  GIoU %s  (%d images, %d BQ)\n",
                  percent1(a.ap_fp_80).c_str(), percent1(a.ap_fp_80_star).c_str(),
                  a.ap_fp_80_plus ? percent1(*a.ap_fp_80_plus).c_str() : "-",
                  percent1(a.ap_fp_50).c_str(), percent1(a.giou).c_str(), a.n_images,
                  a.n_bad_quality);
    out += line;
    return out;
}

void write_report(const EvalResult& result, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open " + path.string() + " for writing");
    const std::string text = report_to_json(result);
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!f)
        throw IoError("write failed: " + path.string());
}

namespace {

void draw_rect(RgbImage& img, const BBox& b, std::uint8_t r, std::uint8_t g, std::uint8_t bl) {
    const int x0 = static_cast<int>(std::lround(b.x_min));
    const int y0 = static_cast<int>(std::lround(b.y_min));
    const int x1 = static_cast<int>(std::lround(b.x_max)); // exclusive
    const int y1 = static_cast<int>(std::lround(b.y_max));
    for (int y = std::max(0, y0); y < std::min(img.height, y1); ++y) {
        for (int x = std::max(0, x0); x < std::min(img.width, x1); ++x) {
            const bool border =
                x < x0 + 2 || x >= x1 - 2 || y < y0 + 2 || y >= y1 - 2;
            if (!border)
                continue;
            std::uint8_t* p = img.px(x, y);
            p[0] = r;
            p[1] = g;
            p[2] = bl;
        }
    }
}

} // namespace

RgbImage render_overlay(const GrayImage& img, const BoxSet& gt, const BoxSet& pred) {
    RgbImage out = RgbImage::filled(img.width, img.height, 0);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            float v = img.at(x, y);
            v = std::clamp(v, 0.0f, 1.0f);
            const auto b = static_cast<std::uint8_t>(std::lround(v * 255.0f));
            std::uint8_t* p = out.px(x, y);
            p[0] = p[1] = p[2] = b;
        }
    }
    for (const BBox& b : gt)
        draw_rect(out, b, 0, 255, 0);
    for (const BBox& b : pred)
        draw_rect(out, b, 255, 0, 0);
    return out;
}

} // namespace handloc
