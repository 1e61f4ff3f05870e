#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace handloc {

// Single-channel raster, row-major, intensities in [0,1].
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<float> pixels;

    static GrayImage filled(int w, int h, float v = 0.0f) {
        GrayImage img;
        img.width = w;
        img.height = h;
        img.pixels.assign(static_cast<std::size_t>(w) * h, v);
        return img;
    }

    float& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    float at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

    // Replicate-border access.
    float at_clamped(int x, int y) const {
        if (x < 0) x = 0;
        if (x >= width) x = width - 1;
        if (y < 0) y = 0;
        if (y >= height) y = height - 1;
        return at(x, y);
    }

    bool same_size(const GrayImage& o) const { return width == o.width && height == o.height; }
    bool empty() const { return width <= 0 || height <= 0; }
};

// Interleaved RGB, 8-bit.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels; // 3 * width * height

    static RgbImage filled(int w, int h, std::uint8_t v = 0) {
        RgbImage img;
        img.width = w;
        img.height = h;
        img.pixels.assign(static_cast<std::size_t>(w) * h * 3, v);
        return img;
    }

    std::uint8_t* px(int x, int y) { return &pixels[(static_cast<std::size_t>(y) * width + x) * 3]; }
};

// 8-bit grayscale PNG or binary PGM (P5), picked by file magic. Intensities
// map as v/255 on load and round(v*255) on save.
GrayImage load_image(const std::filesystem::path& path);

void save_png(const GrayImage& img, const std::filesystem::path& path);
void save_png(const RgbImage& img, const std::filesystem::path& path);
void save_pgm(const GrayImage& img, const std::filesystem::path& path);

} // namespace handloc
