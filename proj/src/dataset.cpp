#include "handloc/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <unordered_set>

#include <json.hpp>

#include "handloc/errors.hpp"

namespace handloc {
namespace {

using nlohmann::json;

json parse_json_file(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f)
        throw IoError("cannot open " + path.string());
    try {
        json j;
        f >> j;
        return j;
    } catch (const json::exception& e) {
        throw ValidationError(path.string() + ": malformed JSON: " + e.what());
    }
}

void write_json_file(const json& j, const std::filesystem::path& path) {
    std::ofstream f(path);
    if (!f)
        throw IoError("cannot open " + path.string() + " for writing");
    f << j.dump(2) << "\n";
    if (!f)
        throw IoError("write failed: " + path.string());
}

// [x, y, w, h] -> corner box; degenerate or malformed boxes are rejected.
BBox parse_xywh(const json& arr, const std::string& where) {
    if (!arr.is_array() || arr.size() != 4)
        throw ValidationError(where + ": bbox must be [x, y, w, h]");
    double v[4];
    for (int i = 0; i < 4; ++i) {
        if (!arr[i].is_number())
            throw ValidationError(where + ": bbox must be numeric");
        v[i] = arr[i].get<double>();
    }
    if (!(v[2] > 0.0) || !(v[3] > 0.0))
        throw ValidationError(where + ": degenerate bbox (w=" + std::to_string(v[2]) +
                              ", h=" + std::to_string(v[3]) + ")");
    BBox b{v[0], v[1], v[0] + v[2], v[1] + v[3]};
    if (!b.valid())
        throw ValidationError(where + ": non-finite bbox");
    return b;
}

json to_xywh(const BBox& b) {
    return json::array({b.x_min, b.y_min, b.width(), b.height()});
}

} // namespace

const ManifestEntry* DatasetManifest::find(const std::string& id) const {
    for (const ManifestEntry& e : entries)
        if (e.id == id)
            return &e;
    return nullptr;
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
    const json j = parse_json_file(path);
    if (!j.is_object() || !j.contains("images") || !j["images"].is_array())
        throw ValidationError(path.string() + ": manifest needs an \"images\" array");

    DatasetManifest m;
    std::unordered_set<std::string> seen;
    std::size_t idx = 0;
    for (const json& ji : j["images"]) {
        const std::string where = "images[" + std::to_string(idx) + "]";
        ManifestEntry e;
        try {
            e.id = ji.at("id").get<std::string>();
            e.file = ji.at("file").get<std::string>();
            e.width = ji.at("width").get<int>();
            e.height = ji.at("height").get<int>();
        } catch (const json::exception& ex) {
            throw ValidationError(where + ": " + ex.what());
        }
        if (e.id.empty())
            throw ValidationError(where + ": empty image id");
        if (!seen.insert(e.id).second)
            throw ValidationError(where + ": duplicate image id '" + e.id + "'");
        if (e.width <= 0 || e.height <= 0)
            throw ValidationError(where + ": non-positive image dimensions");
        if (ji.contains("split")) {
            e.split = ji["split"].get<std::string>();
            if (e.split != "train" && e.split != "val" && e.split != "test")
                throw ValidationError(where + ": unknown split '" + e.split + "'");
        }
        if (ji.contains("ocr"))
            e.ocr_path = ji["ocr"].get<std::string>();
        m.entries.push_back(std::move(e));
        ++idx;
    }

    if (j.contains("annotations")) {
        if (!j["annotations"].is_array())
            throw ValidationError(path.string() + ": \"annotations\" must be an array");
        idx = 0;
        for (const json& ja : j["annotations"]) {
            const std::string where = "annotations[" + std::to_string(idx) + "]";
            std::string image_id;
            try {
                image_id = ja.at("image_id").get<std::string>();
            } catch (const json::exception& ex) {
                throw ValidationError(where + ": " + ex.what());
            }
            bool found = false;
            for (ManifestEntry& e : m.entries) {
                if (e.id == image_id) {
                    e.gt_boxes.push_back(parse_xywh(ja.at("bbox"), where));
                    found = true;
                    break;
                }
            }
            if (!found)
                throw ValidationError(where + ": unknown image_id '" + image_id + "'");
            ++idx;
        }
    }
    return m;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
    json images = json::array();
    json annotations = json::array();
    for (const ManifestEntry& e : manifest.entries) {
        json ji = {{"id", e.id}, {"file", e.file}, {"width", e.width}, {"height", e.height}};
        if (!e.split.empty())
            ji["split"] = e.split;
        if (!e.ocr_path.empty())
            ji["ocr"] = e.ocr_path;
        images.push_back(std::move(ji));
        for (const BBox& b : e.gt_boxes)
            annotations.push_back({{"image_id", e.id}, {"bbox", to_xywh(b)}});
    }
    write_json_file({{"images", images}, {"annotations", annotations}}, path);
}

PredictionFile load_predictions(const std::filesystem::path& path) {
    const json j = parse_json_file(path);
    if (!j.is_array())
        throw ValidationError(path.string() + ": predictions must be a JSON array");
    PredictionFile preds;
    std::size_t idx = 0;
    for (const json& jp : j) {
        const std::string where = "predictions[" + std::to_string(idx) + "]";
        PredRecord r;
        try {
            r.image_id = jp.at("image_id").get<std::string>();
            r.score = jp.at("score").get<double>();
        } catch (const json::exception& ex) {
            throw ValidationError(where + ": " + ex.what());
        }
        if (!(r.score >= 0.0 && r.score <= 1.0))
            throw ValidationError(where + ": score out of [0,1]: " + std::to_string(r.score));
        r.bbox = parse_xywh(jp.at("bbox"), where);
        preds.push_back(std::move(r));
        ++idx;
    }
    return preds;
}

void save_predictions(const PredictionFile& preds, const std::filesystem::path& path) {
    json j = json::array();
    for (const PredRecord& r : preds)
        j.push_back({{"image_id", r.image_id}, {"bbox", to_xywh(r.bbox)}, {"score", r.score}});
    write_json_file(j, path);
}

void validate_predictions(const PredictionFile& preds, const DatasetManifest& manifest) {
    std::unordered_set<std::string> ids;
    for (const ManifestEntry& e : manifest.entries)
        ids.insert(e.id);
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (!ids.contains(preds[i].image_id))
            throw ValidationError("predictions[" + std::to_string(i) + "]: unknown image_id '" +
                                  preds[i].image_id + "'");
    }
}

std::vector<OcrWord> load_ocr_words(const std::filesystem::path& path) {
    const json j = parse_json_file(path);
    if (!j.is_object() || !j.contains("words") || !j["words"].is_array())
        throw ValidationError(path.string() + ": OCR sidecar needs a \"words\" array");
    std::vector<OcrWord> words;
    std::size_t idx = 0;
    for (const json& jw : j["words"]) {
        const std::string where = path.string() + ": words[" + std::to_string(idx) + "]";
        OcrWord w;
        try {
            w.text = jw.value("text", std::string{});
            w.conf = jw.at("conf").get<double>();
        } catch (const json::exception& ex) {
            throw ValidationError(where + ": " + ex.what());
        }
        if (!(w.conf >= 0.0 && w.conf <= 1.0))
            throw ValidationError(where + ": conf out of [0,1]");
        w.bbox = parse_xywh(jw.at("bbox"), where);
        words.push_back(std::move(w));
        ++idx;
    }
    return words;
}

void save_ocr_words(const std::string& image_id, const std::vector<OcrWord>& words,
                    const std::filesystem::path& path) {
    json jwords = json::array();
    for (const OcrWord& w : words)
        jwords.push_back({{"bbox", to_xywh(w.bbox)}, {"text", w.text}, {"conf", w.conf}});
    write_json_file({{"image_id", image_id}, {"words", jwords}}, path);
}

DatasetManifest split_dataset(const DatasetManifest& manifest, std::uint64_t seed,
                              std::array<int, 3> counts) {
    const std::size_t n = manifest.entries.size();
    const long long want =
        static_cast<long long>(counts[0]) + counts[1] + counts[2];
    if (counts[0] < 0 || counts[1] < 0 || counts[2] < 0)
        throw ConfigError("split counts must be non-negative");
    if (want > static_cast<long long>(n))
        throw ValidationError("split counts (" + std::to_string(want) +
                              ") exceed corpus size (" + std::to_string(n) + ")");

    // Fisher-Yates with mt19937_64; documented so the split is reproducible.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(order[i - 1], order[j]);
    }

    DatasetManifest out = manifest;
    for (ManifestEntry& e : out.entries)
        e.split.clear();
    std::size_t pos = 0;
    const char* names[3] = {"train", "val", "test"};
    for (int s = 0; s < 3; ++s)
        for (int k = 0; k < counts[s]; ++k)
            out.entries[order[pos++]].split = names[s];
    return out;
}

} // namespace handloc
