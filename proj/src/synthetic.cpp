#include "handloc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "handloc/errors.hpp"
#include "handloc/image.hpp"

namespace handloc {
namespace {

// All randomness goes through these two helpers so the byte stream only
// depends on the seed, not on library distribution internals.
std::uint64_t rnd_int(std::mt19937_64& rng, std::uint64_t lo, std::uint64_t hi) {
    return lo + rng() % (hi - lo + 1);
}

double rnd01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct InkExtent {
    int min_x = 1 << 30, min_y = 1 << 30, max_x = -1, max_y = -1;

    void add(int x, int y) {
        min_x = std::min(min_x, x);
        min_y = std::min(min_y, y);
        max_x = std::max(max_x, x);
        max_y = std::max(max_y, y);
    }
    bool any() const { return max_x >= 0; }
    BBox bbox() const {
        return {static_cast<double>(min_x), static_cast<double>(min_y),
                static_cast<double>(max_x + 1), static_cast<double>(max_y + 1)};
    }
};

void fill_rect(GrayImage& img, int x0, int y0, int x1, int y1, float v,
               InkExtent* extent = nullptr) {
    x0 = std::max(0, x0);
    y0 = std::max(0, y0);
    x1 = std::min(img.width, x1);
    y1 = std::min(img.height, y1);
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            img.at(x, y) = std::min(img.at(x, y), v);
            if (extent)
                extent->add(x, y);
        }
    }
}

void stamp_brush(GrayImage& img, double cx, double cy, int thickness, float v,
                 InkExtent& extent) {
    const int r = thickness / 2;
    const int x0 = static_cast<int>(std::lround(cx)) - r;
    const int y0 = static_cast<int>(std::lround(cy)) - r;
    fill_rect(img, x0, y0, x0 + thickness, y0 + thickness, v, &extent);
}

// One table spanning [x0,x1) x [y0,y1): boundary plus inner rules.
void draw_table(GrayImage& img, std::mt19937_64& rng, int x0, int y0, int x1, int y1) {
    const float v = static_cast<float>(0.20 + 0.15 * rnd01(rng));
    const int t = static_cast<int>(rnd_int(rng, 1, 2));
    const int n_inner_h = static_cast<int>(rnd_int(rng, 1, 2));
    const int n_inner_v = static_cast<int>(rnd_int(rng, 1, 3));

    std::vector<int> ys = {y0, y1 - t};
    for (int i = 1; i <= n_inner_h; ++i)
        ys.push_back(y0 + (y1 - y0) * i / (n_inner_h + 1));
    for (int y : ys)
        fill_rect(img, x0, y, x1, y + t, v);

    std::vector<int> xs = {x0, x1 - t};
    for (int i = 1; i <= n_inner_v; ++i)
        xs.push_back(x0 + (x1 - x0) * i / (n_inner_v + 1));
    for (int x : xs)
        fill_rect(img, x, y0, x + t, y1, v);
}

// A row of boxy glyph groups; each group becomes one OCR word.
void draw_print_row(GrayImage& img, std::mt19937_64& rng, int row_x, int row_y,
                    int max_x, double conf_lo, double conf_hi,
                    std::vector<OcrWord>& words) {
    const float v = static_cast<float>(0.05 + 0.18 * rnd01(rng));
    const int n_words = static_cast<int>(rnd_int(rng, 3, 6));
    int x = row_x;
    for (int w = 0; w < n_words; ++w) {
        const int n_glyphs = static_cast<int>(rnd_int(rng, 3, 7));
        InkExtent extent;
        std::string text;
        for (int g = 0; g < n_glyphs; ++g) {
            const int gw = static_cast<int>(rnd_int(rng, 4, 8));
            const int gh = static_cast<int>(rnd_int(rng, 9, 12));
            const int jitter = static_cast<int>(rnd_int(rng, 0, 2));
            if (x + gw >= max_x)
                break;
            fill_rect(img, x, row_y + jitter, x + gw, row_y + jitter + gh, v, &extent);
            text.push_back(static_cast<char>('a' + rnd_int(rng, 0, 25)));
            x += gw + static_cast<int>(rnd_int(rng, 2, 3));
        }
        if (extent.any()) {
            OcrWord word;
            const BBox b = extent.bbox();
            word.bbox = {b.x_min - 1, b.y_min - 1, b.x_max + 1, b.y_max + 1};
            word.text = text;
            word.conf = conf_lo + (conf_hi - conf_lo) * rnd01(rng);
            words.push_back(std::move(word));
        }
        x += static_cast<int>(rnd_int(rng, 7, 10));
        if (x >= max_x - 20)
            break;
    }
}

// A wavy stroke plus a slanted dash crossing it; returns the painted extent.
InkExtent draw_scribble(GrayImage& img, std::mt19937_64& rng, int band_y, int band_h,
                        int page_w) {
    InkExtent extent;
    const float v = static_cast<float>(0.08 + 0.20 * rnd01(rng));
    const int len = static_cast<int>(rnd_int(rng, 110, 240));
    const int x0 = static_cast<int>(rnd_int(rng, 60, std::max(61, page_w - 60 - len)));
    const int yc = band_y + band_h / 2 + static_cast<int>(rnd_int(rng, 0, 10)) - 5;

    const double a1 = 14.0 + 10.0 * rnd01(rng);
    const double a2 = 4.0 + 6.0 * rnd01(rng);
    const double f1 = 1.5 + 1.5 * rnd01(rng);
    const double f2 = 3.0 + 2.0 * rnd01(rng);
    const double p1 = 2.0 * std::numbers::pi * rnd01(rng);
    const double p2 = 2.0 * std::numbers::pi * rnd01(rng);

    const int steps = len * 3;
    for (int i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) / steps;
        const double x = x0 + t * len;
        const double y = yc + a1 * std::sin(2.0 * std::numbers::pi * f1 * t + p1) +
                         a2 * std::sin(2.0 * std::numbers::pi * f2 * t + p2);
        stamp_brush(img, x, y, 3, v, extent);
    }

    // Crossing dash, like a struck-through signature flourish.
    const double dash_y0 = yc - a1 - 2.0;
    const double dash_y1 = yc + a1 * (0.5 + 0.5 * rnd01(rng));
    const double dash_x0 = x0 + 0.15 * len;
    const double dash_x1 = x0 + (0.70 + 0.25 * rnd01(rng)) * len;
    for (int i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) / steps;
        stamp_brush(img, dash_x0 + t * (dash_x1 - dash_x0), dash_y0 + t * (dash_y1 - dash_y0),
                    3, v, extent);
    }
    return extent;
}

} // namespace

DatasetManifest generate_corpus(const std::filesystem::path& out_dir,
                                const SyntheticOptions& opts) {
    if (opts.n_images <= 0 || opts.width < 300 || opts.height < 300)
        throw ConfigError("generate_corpus: need n >= 1 and page size >= 300");

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir / "images", ec);
    fs::create_directories(out_dir / "ocr", ec);
    if (ec)
        throw IoError("cannot create output directories under " + out_dir.string());

    std::mt19937_64 rng(opts.seed);
    DatasetManifest manifest;

    const int n_bands = 6;
    const int top = 40;
    const int band_h = (opts.height - 2 * top) / n_bands;

    for (int idx = 0; idx < opts.n_images; ++idx) {
        char name[32];
        std::snprintf(name, sizeof(name), "synth_%04d", idx);

        GrayImage page = GrayImage::filled(opts.width, opts.height, 1.0f);
        std::vector<OcrWord> words;
        BoxSet gt;

        // Band plan: two adjacent bands of table, 1-2 scribble bands, print elsewhere.
        const int table_band = static_cast<int>(rnd_int(rng, 0, n_bands - 2));
        const int n_scribbles = static_cast<int>(rnd_int(rng, 1, 2));
        std::vector<int> free_bands;
        for (int b = 0; b < n_bands; ++b)
            if (b != table_band && b != table_band + 1)
                free_bands.push_back(b);
        for (std::size_t i = free_bands.size(); i > 1; --i)
            std::swap(free_bands[i - 1], free_bands[rnd_int(rng, 0, i - 1)]);

        const int table_y0 = top + table_band * band_h + 6;
        const int table_y1 = top + (table_band + 2) * band_h - 6;
        draw_table(page, rng, 50, table_y0, opts.width - 50, table_y1);
        // One printed row inside the top table cell.
        draw_print_row(page, rng, 70, table_y0 + 12, opts.width - 70, 0.75, 0.98, words);

        for (std::size_t i = 0; i < free_bands.size(); ++i) {
            const int band_y = top + free_bands[i] * band_h;
            if (static_cast<int>(i) < n_scribbles) {
                const InkExtent extent = draw_scribble(page, rng, band_y, band_h, opts.width);
                if (extent.any())
                    gt.push_back(extent.bbox());
            } else {
                const int n_rows = static_cast<int>(rnd_int(rng, 2, 3));
                for (int r = 0; r < n_rows; ++r) {
                    const int row_y = band_y + 10 + r * (band_h - 16) / n_rows;
                    const int row_x = 60 + static_cast<int>(rnd_int(rng, 0, 80));
                    // Most rows carry confident OCR; some fall below the 0.7 gate.
                    const bool low_conf = rnd01(rng) < 0.15;
                    draw_print_row(page, rng, row_x, row_y, opts.width - 60,
                                   low_conf ? 0.40 : 0.75, low_conf ? 0.65 : 0.98, words);
                }
            }
        }

        // Light pepper noise; the detector's median filter has to eat this.
        const int n_noise = opts.width * opts.height / 500;
        for (int i = 0; i < n_noise; ++i) {
            const int x = static_cast<int>(rnd_int(rng, 0, opts.width - 1));
            const int y = static_cast<int>(rnd_int(rng, 0, opts.height - 1));
            page.at(x, y) = static_cast<float>(0.15 * rnd01(rng));
        }

        const std::string img_rel = std::string("images/") + name + ".png";
        const std::string ocr_rel = std::string("ocr/") + name + ".json";
        save_png(page, out_dir / img_rel);
        save_ocr_words(name, words, out_dir / ocr_rel);

        ManifestEntry entry;
        entry.id = name;
        entry.file = img_rel;
        entry.width = opts.width;
        entry.height = opts.height;
        entry.gt_boxes = std::move(gt);
        entry.ocr_path = ocr_rel;
        manifest.entries.push_back(std::move(entry));
    }

    save_manifest(manifest, out_dir / "manifest.json");
    return manifest;
}

} // namespace handloc
