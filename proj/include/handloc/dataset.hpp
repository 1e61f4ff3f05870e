#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "handloc/geometry.hpp"
#include "handloc/preprocess.hpp"

namespace handloc {

struct ManifestEntry {
    std::string id;
    std::string file;
    int width = 0;
    int height = 0;
    std::string split;    // "train" | "val" | "test" | "" (unassigned)
    BoxSet gt_boxes;      // corner form, original image coordinates
    std::string ocr_path; // optional sidecar, empty if none
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;

    const ManifestEntry* find(const std::string& id) const;
};

struct PredRecord {
    std::string image_id;
    BBox bbox;
    double score = 0.0;
};

using PredictionFile = std::vector<PredRecord>;

// Manifest JSON: { "images": [ {id,file,width,height,split?,ocr?} ],
//                  "annotations": [ {image_id, bbox:[x,y,w,h]} ] }.
// Boxes are converted to corner form; degenerate boxes, duplicate ids and
// dangling image_ids are ValidationErrors naming the record index.
DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

// Predictions JSON: [ {image_id, bbox:[x,y,w,h], score} ].
PredictionFile load_predictions(const std::filesystem::path& path);
void save_predictions(const PredictionFile& preds, const std::filesystem::path& path);

// Every prediction must reference a manifest image.
void validate_predictions(const PredictionFile& preds, const DatasetManifest& manifest);

// OCR sidecar: { "image_id": str, "words": [ {bbox:[x,y,w,h], text, conf} ] }.
std::vector<OcrWord> load_ocr_words(const std::filesystem::path& path);
void save_ocr_words(const std::string& image_id, const std::vector<OcrWord>& words,
                    const std::filesystem::path& path);

// Deterministic split assignment: mt19937_64(seed) drives a Fisher-Yates
// shuffle (j = next() % (i+1)); the shuffled order is then assigned
// train/val/test in the given counts. Entries beyond the counts stay
// unassigned. Counts exceeding the corpus size are a ValidationError.
DatasetManifest split_dataset(const DatasetManifest& manifest, std::uint64_t seed,
                              std::array<int, 3> counts = {600, 198, 200});

} // namespace handloc
