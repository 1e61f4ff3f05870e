#include <doctest.h>

#include <cmath>
#include <random>

#include "handloc/errors.hpp"
#include "handloc/preprocess.hpp"

using namespace handloc;

namespace {

std::vector<OcrWord> one_word(double conf, BBox box = {4, 4, 12, 10}) {
    return {OcrWord{box, "word", conf}};
}

} // namespace

TEST_CASE("mask_ocr_words honors the confidence gate") {
    GrayImage img = GrayImage::filled(20, 20, 0.2f);

    const GrayImage hi = mask_ocr_words(img, one_word(0.9));
    for (int y = 0; y < 20; ++y)
        for (int x = 0; x < 20; ++x)
            CHECK(hi.at(x, y) == ((x >= 4 && x < 12 && y >= 4 && y < 10) ? 1.0f : 0.2f));

    const GrayImage lo = mask_ocr_words(img, one_word(0.5));
    CHECK(lo.pixels == img.pixels);

    const GrayImage none = mask_ocr_words(img, {});
    CHECK(none.pixels == img.pixels);
}

TEST_CASE("mask_ocr_words never darkens") {
    std::mt19937_64 rng(51);
    GrayImage img = GrayImage::filled(30, 30, 0.0f);
    for (float& v : img.pixels)
        v = static_cast<float>(rng() % 256) / 255.0f;
    std::vector<OcrWord> words;
    for (int i = 0; i < 5; ++i) {
        const double x = static_cast<double>(rng() % 20);
        const double y = static_cast<double>(rng() % 20);
        words.push_back({{x, y, x + 1 + static_cast<double>(rng() % 8),
                          y + 1 + static_cast<double>(rng() % 8)},
                         "w",
                         static_cast<double>(rng() % 100) / 100.0});
    }
    const GrayImage out = mask_ocr_words(img, words);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        CHECK(out.pixels[i] >= img.pixels[i]);
}

namespace {

// A page with a ruled table band, a printed word and a scribble-like zigzag.
struct SyntheticDoc {
    GrayImage page = GrayImage::filled(240, 240, 1.0f);
    std::vector<OcrWord> words;
    std::vector<std::pair<int, int>> scribble_pixels;

    SyntheticDoc() {
        for (int x = 10; x < 230; ++x) { // two full-width rules
            page.at(x, 40) = 0.2f;
            page.at(x, 90) = 0.2f;
        }
        for (int y = 40; y < 91; ++y) { // verticals joining them
            page.at(10, y) = 0.2f;
            page.at(229, y) = 0.2f;
        }
        for (int y = 60; y < 70; ++y) // printed word inside the table
            for (int x = 30; x < 70; ++x)
                page.at(x, y) = 0.15f;
        words.push_back({{29, 59, 71, 71}, "printed", 0.95});

        for (int x = 40; x < 200; ++x) { // zigzag stroke well below the table
            const int y = 170 + static_cast<int>(18.0 * std::sin(x * 0.12));
            for (int t = 0; t < 3; ++t) {
                page.at(x, y + t) = 0.1f;
                scribble_pixels.emplace_back(x, y + t);
            }
        }
    }
};

LineRemovalConfig doc_line_cfg() {
    LineRemovalConfig cfg;
    cfg.canny_low = 0.04;
    cfg.canny_high = 0.10;
    cfg.vote_threshold = 60;
    return cfg;
}

} // namespace

TEST_CASE("make_pre_plane keeps the scribble, drops table and printed word") {
    const SyntheticDoc doc;
    std::vector<ErasedBand> erased;
    const GrayImage pre = make_pre_plane(doc.page, doc.words, doc_line_cfg(), &erased);

    CHECK_FALSE(erased.empty());
    // Printed word region is whitened.
    for (int y = 60; y < 70; ++y)
        for (int x = 30; x < 70; ++x)
            CHECK(pre.at(x, y) == 1.0f);
    // The scribble band is untouched.
    for (auto [x, y] : doc.scribble_pixels)
        CHECK(pre.at(x, y) == doc.page.at(x, y));
    // The long rules are gone.
    int dark_on_rules = 0;
    for (int x = 10; x < 230; ++x)
        dark_on_rules += (pre.at(x, 40) < 0.9f) + (pre.at(x, 90) < 0.9f);
    CHECK(dark_on_rules == 0);
}

TEST_CASE("make_pre_plane on a blank page is identity") {
    const GrayImage page = GrayImage::filled(120, 120, 1.0f);
    const GrayImage pre = make_pre_plane(page, {}, doc_line_cfg());
    CHECK(pre.pixels == page.pixels);
}

TEST_CASE("make_pre_plane preserves a lone scribble bit-identically") {
    GrayImage page = GrayImage::filled(160, 160, 1.0f);
    for (int x = 20; x < 140; ++x) {
        const int y = 80 + static_cast<int>(15.0 * std::sin(x * 0.15));
        page.at(x, y) = 0.1f;
        page.at(x, y + 1) = 0.1f;
        page.at(x, y + 2) = 0.1f;
    }
    const GrayImage pre = make_pre_plane(page, {}, doc_line_cfg());
    CHECK(pre.pixels == page.pixels);
}

TEST_CASE("make_pre_plane changes stay inside word boxes and erased bands") {
    const SyntheticDoc doc;
    std::vector<ErasedBand> erased;
    const LineRemovalConfig cfg = doc_line_cfg();
    const GrayImage pre = make_pre_plane(doc.page, doc.words, cfg, &erased);

    for (int y = 0; y < doc.page.height; ++y) {
        for (int x = 0; x < doc.page.width; ++x) {
            if (pre.at(x, y) == doc.page.at(x, y))
                continue;
            bool allowed = false;
            for (const OcrWord& w : doc.words) {
                if (w.conf > 0.7 && x >= std::floor(w.bbox.x_min) && x < std::ceil(w.bbox.x_max) &&
                    y >= std::floor(w.bbox.y_min) && y < std::ceil(w.bbox.y_max))
                    allowed = true;
            }
            for (const ErasedBand& b : erased) {
                const double c = std::cos(b.line.theta_deg * std::numbers::pi / 180.0);
                const double s = std::sin(b.line.theta_deg * std::numbers::pi / 180.0);
                if (std::abs(x * c + y * s - b.line.r) <= b.thickness / 2.0)
                    allowed = true;
            }
            CHECK(allowed);
        }
    }
}

TEST_CASE("resize_to_model identity and dimensions") {
    std::mt19937_64 rng(53);
    GrayImage img = GrayImage::filled(768, 768, 0.0f);
    for (float& v : img.pixels)
        v = static_cast<float>(rng() % 256) / 255.0f;
    CHECK(resize_to_model(img).pixels == img.pixels);

    const GrayImage tall = GrayImage::filled(700, 1000, 0.5f);
    const GrayImage out = resize_to_model(tall);
    CHECK(out.width == 768);
    CHECK(out.height == 768);
}

TEST_CASE("bilinear upscale keeps corner samples") {
    GrayImage img = GrayImage::filled(2, 2, 0.0f);
    img.at(1, 0) = 1.0f;
    img.at(0, 1) = 1.0f;
    const GrayImage out = resize_bilinear(img, 4, 4);
    CHECK(out.at(0, 0) == 0.0f);
    CHECK(out.at(3, 0) == 1.0f);
    CHECK(out.at(0, 3) == 1.0f);
    CHECK(out.at(3, 3) == 0.0f);
}

TEST_CASE("box transforms") {
    const BBox b{70, 100, 140, 200};
    const BBox m = box_to_model(b, 700, 1000);
    CHECK(m.x_min == doctest::Approx(76.8).epsilon(1e-12));
    CHECK(m.y_min == doctest::Approx(76.8).epsilon(1e-12));
    CHECK(m.x_max == doctest::Approx(153.6).epsilon(1e-12));
    CHECK(m.y_max == doctest::Approx(153.6).epsilon(1e-12));

    CHECK(box_to_model({0, 0, 700, 1000}, 700, 1000) == BBox{0, 0, 768, 768});
    CHECK(box_to_model(b, 768, 768) == b);

    std::mt19937_64 rng(59);
    for (int i = 0; i < 200; ++i) {
        const double x0 = static_cast<double>(rng() % 700);
        const double y0 = static_cast<double>(rng() % 1000);
        const BBox r{x0, y0, x0 + 1 + static_cast<double>(rng() % 50),
                     y0 + 1 + static_cast<double>(rng() % 50)};
        const BBox back = box_from_model(box_to_model(r, 701, 997), 701, 997);
        CHECK(std::abs(back.x_min - r.x_min) < 1e-9);
        CHECK(std::abs(back.y_min - r.y_min) < 1e-9);
        CHECK(std::abs(back.x_max - r.x_max) < 1e-9);
        CHECK(std::abs(back.y_max - r.y_max) < 1e-9);
    }
}

TEST_CASE("variant parsing round-trips") {
    for (const char* name :
         {"o", "o-", "pre", "pre-", "o/pre", "o-/pre-", "o/o-/pre", "o/o-/pre-"}) {
        const FusionVariant v = parse_variant(name);
        CHECK(to_string(v) == name);
        const std::string s(name);
        CHECK(variant_terms(v).size() ==
              1 + static_cast<std::size_t>(std::count(s.begin(), s.end(), '/')));
    }
    CHECK_THROWS_AS(parse_variant("o/x"), ConfigError);
}

TEST_CASE("fuse_channels assembles planes in variant order") {
    GrayImage img = GrayImage::filled(4, 4, 0.25f);
    GrayImage pre = GrayImage::filled(4, 4, 0.75f);

    const ChannelStack single = fuse_channels(img, pre, FusionVariant::O);
    REQUIRE(single.planes.size() == 1);
    CHECK(single.planes[0].pixels == img.pixels);

    const ChannelStack full = fuse_channels(img, pre, FusionVariant::OONegPreNeg);
    REQUIRE(full.planes.size() == 3);
    CHECK(full.planes[0].at(0, 0) == 0.25f);
    CHECK(full.planes[1].at(0, 0) == 0.75f);  // 1 - o
    CHECK(full.planes[2].at(0, 0) == 0.25f);  // 1 - pre

    const ChannelStack negs = fuse_channels(img, pre, FusionVariant::ONegPreNeg);
    REQUIRE(negs.planes.size() == 2);
    CHECK(negs.planes[0].at(1, 1) == 0.75f);
    CHECK(negs.planes[1].at(1, 1) == 0.25f);

    const GrayImage wrong = GrayImage::filled(5, 4, 0.0f);
    CHECK_THROWS_AS(fuse_channels(img, wrong, FusionVariant::OPre), ValidationError);
}

TEST_CASE("plane count matches the variant term count") {
    const GrayImage img = GrayImage::filled(3, 3, 0.5f);
    for (FusionVariant v : {FusionVariant::O, FusionVariant::ONeg, FusionVariant::Pre,
                            FusionVariant::PreNeg, FusionVariant::OPre, FusionVariant::ONegPreNeg,
                            FusionVariant::OONegPre, FusionVariant::OONegPreNeg}) {
        CHECK(fuse_channels(img, img, v).planes.size() == variant_terms(v).size());
    }
}
