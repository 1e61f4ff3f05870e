#include "handloc/imageops.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "handloc/errors.hpp"

namespace handloc {
namespace {

constexpr double kPi = std::numbers::pi;

void require_nonempty(const GrayImage& img, const char* what) {
    if (img.empty())
        throw ValidationError(std::string(what) + ": empty image");
}

} // namespace

GrayImage negate(const GrayImage& img) {
    GrayImage out = img;
    for (float& v : out.pixels)
        v = 1.0f - v;
    return out;
}

GrayImage median_filter(const GrayImage& img, int radius) {
    if (radius < 1)
        throw ConfigError("median_filter: radius must be >= 1");
    GrayImage out = GrayImage::filled(img.width, img.height, 0.0f);
    const int k = 2 * radius + 1;
    std::vector<float> window;
    window.reserve(static_cast<std::size_t>(k) * k);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            window.clear();
            for (int dy = -radius; dy <= radius; ++dy)
                for (int dx = -radius; dx <= radius; ++dx)
                    window.push_back(img.at_clamped(x + dx, y + dy));
            auto mid = window.begin() + window.size() / 2;
            std::nth_element(window.begin(), mid, window.end());
            out.at(x, y) = *mid;
        }
    }
    return out;
}

OtsuResult otsu_threshold(const GrayImage& img) {
    require_nonempty(img, "otsu_threshold");

    // Right-closed bins: bin k holds v in ((k)/256, (k+1)/256], bin 0 also
    // takes v = 0, so "bin(v) <= k" is exactly "v <= (k+1)/256".
    std::array<double, 256> hist{};
    float max_pixel = 0.0f;
    for (float v : img.pixels) {
        int bin = static_cast<int>(std::ceil(static_cast<double>(v) * 256.0)) - 1;
        bin = std::clamp(bin, 0, 255);
        hist[bin] += 1.0;
        max_pixel = std::max(max_pixel, v);
    }
    const double total = static_cast<double>(img.pixels.size());

    double sum_all = 0.0;
    for (int k = 0; k < 256; ++k)
        sum_all += hist[k] * k;

    int best_k = -1;
    double best_var = 0.0;
    double w0 = 0.0, sum0 = 0.0;
    for (int k = 0; k < 256; ++k) {
        w0 += hist[k];
        sum0 += hist[k] * k;
        const double w1 = total - w0;
        if (w0 <= 0.0 || w1 <= 0.0)
            continue;
        const double mu0 = sum0 / w0;
        const double mu1 = (sum_all - sum0) / w1;
        const double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (var > best_var) {
            best_var = var;
            best_k = k;
        }
    }

    OtsuResult res;
    if (best_k < 0) {
        // Single occupied bin: no split exists.
        res.threshold = static_cast<double>(max_pixel);
        res.mask = GrayImage::filled(img.width, img.height, 0.0f);
        return res;
    }
    res.threshold = static_cast<double>(best_k + 1) / 256.0;
    res.mask = GrayImage::filled(img.width, img.height, 0.0f);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        res.mask.pixels[i] = static_cast<double>(img.pixels[i]) > res.threshold ? 1.0f : 0.0f;
    return res;
}

namespace {

GrayImage dilate_rect(const GrayImage& mask, int half_w, int half_h) {
    // Separable: horizontal max run, then vertical.
    GrayImage tmp = GrayImage::filled(mask.width, mask.height, 0.0f);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            float v = 0.0f;
            for (int dx = -half_w; dx <= half_w && v == 0.0f; ++dx) {
                const int xx = x + dx;
                if (xx >= 0 && xx < mask.width && mask.at(xx, y) > 0.5f)
                    v = 1.0f;
            }
            tmp.at(x, y) = v;
        }
    }
    GrayImage out = GrayImage::filled(mask.width, mask.height, 0.0f);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            float v = 0.0f;
            for (int dy = -half_h; dy <= half_h && v == 0.0f; ++dy) {
                const int yy = y + dy;
                if (yy >= 0 && yy < mask.height && tmp.at(x, yy) > 0.5f)
                    v = 1.0f;
            }
            out.at(x, y) = v;
        }
    }
    return out;
}

GrayImage erode_rect(const GrayImage& mask, int half_w, int half_h) {
    // Outside the image is background, so border windows erode to 0.
    GrayImage tmp = GrayImage::filled(mask.width, mask.height, 0.0f);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            float v = 1.0f;
            for (int dx = -half_w; dx <= half_w && v == 1.0f; ++dx) {
                const int xx = x + dx;
                if (xx < 0 || xx >= mask.width || mask.at(xx, y) < 0.5f)
                    v = 0.0f;
            }
            tmp.at(x, y) = v;
        }
    }
    GrayImage out = GrayImage::filled(mask.width, mask.height, 0.0f);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            float v = 1.0f;
            for (int dy = -half_h; dy <= half_h && v == 1.0f; ++dy) {
                const int yy = y + dy;
                if (yy < 0 || yy >= mask.height || tmp.at(x, yy) < 0.5f)
                    v = 0.0f;
            }
            out.at(x, y) = v;
        }
    }
    return out;
}

} // namespace

GrayImage morphology(const GrayImage& mask, MorphOp op, int se_width, int se_height) {
    if (se_width < 1 || se_height < 1 || se_width % 2 == 0 || se_height % 2 == 0)
        throw ConfigError("morphology: structuring element dimensions must be odd and >= 1");
    const int hw = se_width / 2, hh = se_height / 2;
    switch (op) {
        case MorphOp::Dilate: return dilate_rect(mask, hw, hh);
        case MorphOp::Erode: return erode_rect(mask, hw, hh);
        case MorphOp::Open: return dilate_rect(erode_rect(mask, hw, hh), hw, hh);
        case MorphOp::Close: return erode_rect(dilate_rect(mask, hw, hh), hw, hh);
    }
    throw ConfigError("morphology: unknown operation");
}

namespace {

// 5x5 Gaussian, sigma 1.4, normalized.
std::array<float, 25> gaussian_kernel_5x5() {
    std::array<float, 25> k{};
    const double sigma = 1.4;
    double sum = 0.0;
    for (int y = -2; y <= 2; ++y) {
        for (int x = -2; x <= 2; ++x) {
            const double v = std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
            k[(y + 2) * 5 + (x + 2)] = static_cast<float>(v);
            sum += v;
        }
    }
    for (float& v : k)
        v = static_cast<float>(v / sum);
    return k;
}

GrayImage gaussian_smooth(const GrayImage& img) {
    static const std::array<float, 25> kernel = gaussian_kernel_5x5();
    GrayImage out = GrayImage::filled(img.width, img.height, 0.0f);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            float acc = 0.0f;
            for (int dy = -2; dy <= 2; ++dy)
                for (int dx = -2; dx <= 2; ++dx)
                    acc += kernel[(dy + 2) * 5 + (dx + 2)] * img.at_clamped(x + dx, y + dy);
            out.at(x, y) = acc;
        }
    }
    return out;
}

} // namespace

GrayImage canny(const GrayImage& img, double low, double high) {
    if (!(low >= 0.0 && low < high && high <= 1.0))
        throw ConfigError("canny: need 0 <= low < high <= 1");
    require_nonempty(img, "canny");

    const GrayImage smooth = gaussian_smooth(img);

    // Sobel, replicate borders so flat images stay gradient-free.
    const int w = img.width, h = img.height;
    std::vector<float> gx(static_cast<std::size_t>(w) * h), gy(gx.size()), mag(gx.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const float p00 = smooth.at_clamped(x - 1, y - 1), p10 = smooth.at_clamped(x, y - 1),
                        p20 = smooth.at_clamped(x + 1, y - 1);
            const float p01 = smooth.at_clamped(x - 1, y), p21 = smooth.at_clamped(x + 1, y);
            const float p02 = smooth.at_clamped(x - 1, y + 1), p12 = smooth.at_clamped(x, y + 1),
                        p22 = smooth.at_clamped(x + 1, y + 1);
            const float sx = (p20 + 2.0f * p21 + p22) - (p00 + 2.0f * p01 + p02);
            const float sy = (p02 + 2.0f * p12 + p22) - (p00 + 2.0f * p10 + p20);
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            gx[i] = sx;
            gy[i] = sy;
            // Max |sobel| on [0,1] inputs is 4 per axis -> 4*sqrt(2) overall.
            mag[i] = std::sqrt(sx * sx + sy * sy) / static_cast<float>(4.0 * std::sqrt(2.0));
        }
    }

    // Non-maximum suppression along the quantized gradient direction.
    // 0 = maybe-edge, 1 = no, 2 = strong edge.
    std::vector<std::uint8_t> map(mag.size(), 1);
    auto mag_at = [&](int x, int y) -> float {
        if (x < 0 || x >= w || y < 0 || y >= h)
            return 0.0f;
        return mag[static_cast<std::size_t>(y) * w + x];
    };
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const float m = mag[i];
            if (m < static_cast<float>(low))
                continue;
            const float ax = std::abs(gx[i]), ay = std::abs(gy[i]);
            bool keep;
            if (ay <= 0.4142f * ax) { // within 22.5 deg of horizontal gradient
                keep = m > mag_at(x - 1, y) && m >= mag_at(x + 1, y);
            } else if (ax <= 0.4142f * ay) {
                keep = m > mag_at(x, y - 1) && m >= mag_at(x, y + 1);
            } else if ((gx[i] > 0) == (gy[i] > 0)) { // 45 deg diagonal
                keep = m > mag_at(x - 1, y - 1) && m >= mag_at(x + 1, y + 1);
            } else { // 135 deg diagonal
                keep = m > mag_at(x + 1, y - 1) && m >= mag_at(x - 1, y + 1);
            }
            if (keep)
                map[i] = m >= static_cast<float>(high) ? 2 : 0;
        }
    }

    // Hysteresis: grow strong edges through maybe-edges, 8-connected.
    std::vector<std::size_t> stack;
    for (std::size_t i = 0; i < map.size(); ++i)
        if (map[i] == 2)
            stack.push_back(i);
    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int xx = x + dx, yy = y + dy;
                if (xx < 0 || xx >= w || yy < 0 || yy >= h)
                    continue;
                const std::size_t j = static_cast<std::size_t>(yy) * w + xx;
                if (map[j] == 0) {
                    map[j] = 2;
                    stack.push_back(j);
                }
            }
        }
    }

    GrayImage out = GrayImage::filled(w, h, 0.0f);
    for (std::size_t i = 0; i < map.size(); ++i)
        out.pixels[i] = map[i] == 2 ? 1.0f : 0.0f;
    return out;
}

std::vector<HoughLine> hough_lines(const GrayImage& edges, int vote_threshold,
                                   double dtheta_deg, double dr) {
    if (dtheta_deg <= 0.0 || dr <= 0.0)
        throw ConfigError("hough_lines: bin sizes must be positive");
    require_nonempty(edges, "hough_lines");

    const int n_theta = std::max(1, static_cast<int>(std::lround(180.0 / dtheta_deg)));
    const double diag = std::hypot(edges.width - 1.0, edges.height - 1.0);
    const int n_r = static_cast<int>(std::floor(2.0 * diag / dr)) + 1;

    std::vector<double> cos_t(n_theta), sin_t(n_theta);
    for (int t = 0; t < n_theta; ++t) {
        const double rad = t * dtheta_deg * kPi / 180.0;
        cos_t[t] = std::cos(rad);
        sin_t[t] = std::sin(rad);
    }

    std::vector<int> acc(static_cast<std::size_t>(n_theta) * n_r, 0);
    for (int y = 0; y < edges.height; ++y) {
        for (int x = 0; x < edges.width; ++x) {
            if (edges.at(x, y) < 0.5f)
                continue;
            for (int t = 0; t < n_theta; ++t) {
                const double r = x * cos_t[t] + y * sin_t[t];
                const int ri = static_cast<int>(std::lround((r + diag) / dr));
                if (ri >= 0 && ri < n_r)
                    ++acc[static_cast<std::size_t>(t) * n_r + ri];
            }
        }
    }

    auto acc_at = [&](int t, int ri) -> int {
        if (t < 0 || t >= n_theta || ri < 0 || ri >= n_r)
            return -1;
        return acc[static_cast<std::size_t>(t) * n_r + ri];
    };

    // Local maxima over the 8-neighborhood; ties resolve to the first bin in
    // scan order (strict against earlier neighbors, non-strict against later).
    std::vector<HoughLine> peaks;
    for (int t = 0; t < n_theta; ++t) {
        for (int ri = 0; ri < n_r; ++ri) {
            const int v = acc_at(t, ri);
            if (v < vote_threshold || v <= 0)
                continue;
            bool is_peak = true;
            for (int dt = -1; dt <= 1 && is_peak; ++dt) {
                for (int dri = -1; dri <= 1 && is_peak; ++dri) {
                    if (dt == 0 && dri == 0)
                        continue;
                    const int nv = acc_at(t + dt, ri + dri);
                    const bool earlier = dt < 0 || (dt == 0 && dri < 0);
                    if (earlier ? nv >= v : nv > v)
                        is_peak = false;
                }
            }
            if (is_peak)
                peaks.push_back({ri * dr - diag, t * dtheta_deg, v});
        }
    }

    std::sort(peaks.begin(), peaks.end(), [](const HoughLine& a, const HoughLine& b) {
        if (a.votes != b.votes)
            return a.votes > b.votes;
        if (a.theta_deg != b.theta_deg)
            return a.theta_deg < b.theta_deg;
        return a.r < b.r;
    });
    return peaks;
}

GrayImage erase_lines(const GrayImage& img, const std::vector<HoughLine>& lines,
                      double thickness) {
    GrayImage out = img;
    if (lines.empty() || thickness <= 0.0)
        return out;
    const double half = thickness / 2.0;
    for (const HoughLine& line : lines) {
        const double c = std::cos(line.theta_deg * kPi / 180.0);
        const double s = std::sin(line.theta_deg * kPi / 180.0);
        for (int y = 0; y < img.height; ++y) {
            for (int x = 0; x < img.width; ++x) {
                if (std::abs(x * c + y * s - line.r) <= half)
                    out.at(x, y) = 1.0f;
            }
        }
    }
    return out;
}

ComponentLabels label_components(const GrayImage& mask) {
    ComponentLabels res;
    res.labels.assign(mask.pixels.size(), -1);
    const int w = mask.width, h = mask.height;
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < mask.pixels.size(); ++start) {
        if (mask.pixels[start] < 0.5f || res.labels[start] >= 0)
            continue;
        const int label = res.count++;
        res.labels[start] = label;
        stack.assign(1, start);
        while (!stack.empty()) {
            const std::size_t i = stack.back();
            stack.pop_back();
            const int x = static_cast<int>(i % w), y = static_cast<int>(i / w);
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int xx = x + dx, yy = y + dy;
                    if (xx < 0 || xx >= w || yy < 0 || yy >= h)
                        continue;
                    const std::size_t j = static_cast<std::size_t>(yy) * w + xx;
                    if (mask.pixels[j] >= 0.5f && res.labels[j] < 0) {
                        res.labels[j] = label;
                        stack.push_back(j);
                    }
                }
            }
        }
    }
    return res;
}

GrayImage resize_bilinear(const GrayImage& img, int out_width, int out_height) {
    if (img.empty())
        throw ValidationError("resize_bilinear: empty image");
    if (out_width <= 0 || out_height <= 0)
        throw ConfigError("resize_bilinear: output dimensions must be positive");
    if (out_width == img.width && out_height == img.height)
        return img;

    GrayImage out = GrayImage::filled(out_width, out_height, 0.0f);
    const double sx = static_cast<double>(img.width) / out_width;
    const double sy = static_cast<double>(img.height) / out_height;
    for (int y = 0; y < out_height; ++y) {
        double src_y = (y + 0.5) * sy - 0.5;
        src_y = std::clamp(src_y, 0.0, static_cast<double>(img.height - 1));
        const int y0 = static_cast<int>(src_y);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double fy = src_y - y0;
        for (int x = 0; x < out_width; ++x) {
            double src_x = (x + 0.5) * sx - 0.5;
            src_x = std::clamp(src_x, 0.0, static_cast<double>(img.width - 1));
            const int x0 = static_cast<int>(src_x);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double fx = src_x - x0;
            const double top = img.at(x0, y0) * (1.0 - fx) + img.at(x1, y0) * fx;
            const double bot = img.at(x0, y1) * (1.0 - fx) + img.at(x1, y1) * fx;
            out.at(x, y) = static_cast<float>(top * (1.0 - fy) + bot * fy);
        }
    }
    return out;
}

} // namespace handloc
