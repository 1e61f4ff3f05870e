#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "handloc/dataset.hpp"
#include "handloc/detector.hpp"
#include "handloc/errors.hpp"
#include "handloc/image.hpp"
#include "handloc/preprocess.hpp"
#include "handloc/report.hpp"
#include "handloc/synthetic.hpp"

namespace fs = std::filesystem;
using namespace handloc;

namespace {

// Manifest file references are relative to the manifest location.
fs::path resolve(const fs::path& manifest_path, const std::string& rel) {
    const fs::path p(rel);
    return p.is_absolute() ? p : manifest_path.parent_path() / p;
}

std::vector<OcrWord> words_for(const fs::path& manifest_path, const ManifestEntry& e) {
    if (e.ocr_path.empty())
        return {};
    return load_ocr_words(resolve(manifest_path, e.ocr_path));
}

std::string plane_filename(const std::string& id, std::size_t k, const std::string& term) {
    return id + "." + std::to_string(k) + "." + term + ".png";
}

int run_preprocess(const fs::path& manifest_path, const std::string& variant_name,
                   const fs::path& out_dir, int side) {
    const FusionVariant variant = parse_variant(variant_name);
    const DatasetManifest manifest = load_manifest(manifest_path);
    fs::create_directories(out_dir);

    nlohmann::json index = nlohmann::json::array();
    for (const ManifestEntry& e : manifest.entries) {
        const GrayImage img = load_image(resolve(manifest_path, e.file));
        GrayImage pre;
        if (variant_needs_pre(variant))
            pre = make_pre_plane(img, words_for(manifest_path, e));
        else
            pre = img; // unused planes; keeps fuse_channels size check meaningful
        const ChannelStack stack = fuse_channels(img, pre, variant);

        nlohmann::json planes = nlohmann::json::array();
        const auto terms = variant_terms(variant);
        for (std::size_t k = 0; k < stack.planes.size(); ++k) {
            const std::string fname = plane_filename(e.id, k, terms[k]);
            save_png(resize_to_model(stack.planes[k], side), out_dir / fname);
            planes.push_back(fname);
        }

        nlohmann::json boxes = nlohmann::json::array();
        for (const BBox& b : e.gt_boxes) {
            const BBox m = box_to_model(b, e.width, e.height, side);
            boxes.push_back({m.x_min, m.y_min, m.x_max - m.x_min, m.y_max - m.y_min});
        }
        index.push_back({{"id", e.id}, {"planes", planes}, {"gt_boxes_model", boxes}});
    }

    std::ofstream f(out_dir / "index.json");
    f << nlohmann::json({{"variant", variant_name}, {"size", side}, {"images", index}}).dump(2)
      << "\n";
    return 0;
}

int run_detect(const fs::path& manifest_path, const fs::path& config_path,
               const fs::path& out_path, int jobs) {
    const DatasetManifest manifest = load_manifest(manifest_path);
    const DetectorConfig cfg =
        config_path.empty() ? DetectorConfig{} : load_detector_config(config_path);

    const std::size_t n = manifest.entries.size();
    std::vector<std::vector<Detection>> dets(n);
    auto detect_range = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const ManifestEntry& e = manifest.entries[i];
            const GrayImage img = load_image(resolve(manifest_path, e.file));
            const auto words = words_for(manifest_path, e);
            dets[i] = classify_candidates(extract_components(img, words, cfg), cfg);
        }
    };
    if (jobs <= 1 || n < 2) {
        detect_range(0, n);
    } else {
        std::vector<std::future<void>> futs;
        const std::size_t chunk = (n + jobs - 1) / jobs;
        for (std::size_t begin = 0; begin < n; begin += chunk)
            futs.push_back(std::async(std::launch::async, detect_range, begin,
                                      std::min(n, begin + chunk)));
        for (auto& f : futs)
            f.get();
    }

    PredictionFile preds;
    for (std::size_t i = 0; i < n; ++i)
        for (const Detection& d : dets[i])
            preds.push_back({manifest.entries[i].id, d.bbox, d.confidence});
    save_predictions(preds, out_path);
    return 0;
}

int run_postprocess(const fs::path& in_path, const fs::path& out_path, double conf,
                    double containment) {
    const PredictionFile preds = load_predictions(in_path);

    // Group per image, keep first-seen image order and input order inside.
    std::vector<std::string> order;
    std::vector<std::vector<Detection>> groups;
    for (const PredRecord& r : preds) {
        std::size_t g = 0;
        for (; g < order.size(); ++g)
            if (order[g] == r.image_id)
                break;
        if (g == order.size()) {
            order.push_back(r.image_id);
            groups.emplace_back();
        }
        groups[g].push_back({r.bbox, r.score});
    }

    PredictionFile out;
    for (std::size_t g = 0; g < order.size(); ++g)
        for (const Detection& d : postprocess_detections(groups[g], conf, containment))
            out.push_back({order[g], d.bbox, d.confidence});
    save_predictions(out, out_path);
    return 0;
}

int run_evaluate(const fs::path& manifest_path, const fs::path& pred_path,
                 const fs::path& out_path, const EvalOptions& opts, bool table) {
    const DatasetManifest manifest = load_manifest(manifest_path);
    const PredictionFile preds = load_predictions(pred_path);
    const EvalResult result = evaluate_dataset(manifest, preds, opts);
    write_report(result, out_path);
    if (table)
        std::cout << format_table(result);
    return 0;
}

int run_visualize(const fs::path& manifest_path, const fs::path& pred_path,
                  const fs::path& out_dir) {
    const DatasetManifest manifest = load_manifest(manifest_path);
    const PredictionFile preds = load_predictions(pred_path);
    validate_predictions(preds, manifest);
    fs::create_directories(out_dir);

    for (const ManifestEntry& e : manifest.entries) {
        const GrayImage img = load_image(resolve(manifest_path, e.file));
        BoxSet p;
        for (const PredRecord& r : preds)
            if (r.image_id == e.id)
                p.push_back(r.bbox);
        save_png(render_overlay(img, e.gt_boxes, p), out_dir / (e.id + ".png"));
    }
    return 0;
}

int run_split(const fs::path& manifest_path, std::uint64_t seed,
              const std::string& counts_str, const fs::path& out_path) {
    std::array<int, 3> counts{};
    if (std::sscanf(counts_str.c_str(), "%d,%d,%d", &counts[0], &counts[1], &counts[2]) != 3)
        throw ConfigError("--counts must be three comma-separated integers, got '" +
                          counts_str + "'");
    const DatasetManifest manifest = load_manifest(manifest_path);
    save_manifest(split_dataset(manifest, seed, counts), out_path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"handloc: handwriting localization toolkit"};
    app.require_subcommand(1);

    std::string manifest_s, pred_s, out_s, in_s, config_s;
    std::string variant = "o/o-/pre-";
    std::string counts = "600,198,200";
    int side = 768, n_images = 20, jobs = 1, bq_max_boxes = 3;
    double conf = 0.8, containment = 0.9, bq_cap = 0.5;
    std::uint64_t seed = 1;
    bool table = false;

    auto* prep = app.add_subcommand("preprocess", "write fused model-input planes");
    prep->add_option("--variant", variant, "o|o-|pre|pre-|o/pre|o-/pre-|o/o-/pre|o/o-/pre-");
    prep->add_option("--manifest", manifest_s)->required();
    prep->add_option("--out", out_s)->required();
    prep->add_option("--size", side);

    auto* det = app.add_subcommand("detect", "run the heuristic handwriting detector");
    det->add_option("--manifest", manifest_s)->required();
    det->add_option("--config", config_s);
    det->add_option("--out", out_s)->required();
    det->add_option("--jobs", jobs);

    auto* post = app.add_subcommand("postprocess", "confidence filter + containment suppression");
    post->add_option("--in", in_s)->required();
    post->add_option("--conf", conf);
    post->add_option("--containment", containment);
    post->add_option("--out", out_s)->required();

    auto* eval = app.add_subcommand("evaluate", "score predictions against ground truth");
    eval->add_option("--manifest", manifest_s)->required();
    eval->add_option("--pred", pred_s)->required();
    eval->add_option("--bq-max-boxes", bq_max_boxes);
    eval->add_option("--bq-cap", bq_cap);
    eval->add_option("--jobs", jobs);
    eval->add_option("--out", out_s)->required();
    eval->add_flag("--table", table, "print a per-image table to stdout");

    auto* vis = app.add_subcommand("visualize", "render ground truth and predictions");
    vis->add_option("--manifest", manifest_s)->required();
    vis->add_option("--pred", pred_s)->required();
    vis->add_option("--out", out_s)->required();

    auto* spl = app.add_subcommand("split", "assign train/val/test splits");
    spl->add_option("--manifest", manifest_s)->required();
    spl->add_option("--seed", seed);
    spl->add_option("--counts", counts);
    spl->add_option("--out", out_s)->required();

    auto* gen = app.add_subcommand("gen-synthetic", "generate a synthetic test corpus");
    gen->add_option("--out", out_s)->required();
    gen->add_option("--n", n_images);
    gen->add_option("--seed", seed);

    CLI11_PARSE(app, argc, argv);

    try {
        if (prep->parsed())
            return run_preprocess(manifest_s, variant, out_s, side);
        if (det->parsed())
            return run_detect(manifest_s, config_s, out_s, jobs);
        if (post->parsed())
            return run_postprocess(in_s, out_s, conf, containment);
        if (eval->parsed()) {
            EvalOptions opts;
            opts.bq_max_boxes = bq_max_boxes;
            opts.bq_cap = bq_cap;
            opts.jobs = jobs;
            return run_evaluate(manifest_s, pred_s, out_s, opts, table);
        }
        if (vis->parsed())
            return run_visualize(manifest_s, pred_s, out_s);
        if (spl->parsed())
            return run_split(manifest_s, seed, counts, out_s);
        if (gen->parsed()) {
            SyntheticOptions opts;
            opts.n_images = n_images;
            opts.seed = seed;
            generate_corpus(out_s, opts);
            return 0;
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
