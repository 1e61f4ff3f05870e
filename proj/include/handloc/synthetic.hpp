#pragma once

#include <cstdint>
#include <filesystem>

#include "handloc/dataset.hpp"

namespace handloc {

struct SyntheticOptions {
    int n_images = 20;
    std::uint64_t seed = 1;
    int width = 768;
    int height = 768;
};

// Writes a seeded test corpus under out_dir: images/ (grayscale PNGs mixing a
// ruled table, printed-like glyph rows and scribble strokes), ocr/ (one
// sidecar per image covering the printed rows) and manifest.json with the
// scribble boxes as ground truth. Same options -> byte-identical output.
DatasetManifest generate_corpus(const std::filesystem::path& out_dir,
                                const SyntheticOptions& opts = {});

} // namespace handloc
