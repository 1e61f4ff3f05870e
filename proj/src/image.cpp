#include "handloc/image.hpp"

#include <zlib.h>

#include <array>
#include <cmath>
#include <cstring>
#include <fstream>

#include "handloc/errors.hpp"

namespace handloc {
namespace {

constexpr std::array<std::uint8_t, 8> kPngSignature = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open " + path.string());
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
    return data;
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& data) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw IoError("cannot open " + path.string() + " for writing");
    f.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
    if (!f)
        throw IoError("write failed: " + path.string());
}

std::uint32_t be32(const std::uint8_t* p) {
    return (std::uint32_t(p[0]) << 24) | (std::uint32_t(p[1]) << 16) |
           (std::uint32_t(p[2]) << 8) | std::uint32_t(p[3]);
}

void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

void append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                  const std::uint8_t* data, std::size_t len) {
    put_be32(out, static_cast<std::uint32_t>(len));
    const std::size_t crc_start = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), data, data + len);
    const uLong crc = ::crc32(::crc32(0L, nullptr, 0), out.data() + crc_start,
                              static_cast<uInt>(4 + len));
    put_be32(out, static_cast<std::uint32_t>(crc));
}

int paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return a;
    if (pb <= pc) return b;
    return c;
}

// Reverses the per-row PNG filters in place; bpp is bytes per pixel.
void unfilter(std::vector<std::uint8_t>& raw, std::vector<std::uint8_t>& out,
              int width, int height, int bpp) {
    const std::size_t stride = static_cast<std::size_t>(width) * bpp;
    out.resize(stride * height);
    for (int y = 0; y < height; ++y) {
        const std::uint8_t filter = raw[y * (stride + 1)];
        const std::uint8_t* src = &raw[y * (stride + 1) + 1];
        std::uint8_t* dst = &out[y * stride];
        const std::uint8_t* up = y > 0 ? &out[(y - 1) * stride] : nullptr;
        for (std::size_t x = 0; x < stride; ++x) {
            const int a = x >= static_cast<std::size_t>(bpp) ? dst[x - bpp] : 0;
            const int b = up ? up[x] : 0;
            const int c = (up && x >= static_cast<std::size_t>(bpp)) ? up[x - bpp] : 0;
            int v = src[x];
            switch (filter) {
                case 0: break;
                case 1: v += a; break;
                case 2: v += b; break;
                case 3: v += (a + b) / 2; break;
                case 4: v += paeth(a, b, c); break;
                default: throw IoError("png: unknown filter type " + std::to_string(filter));
            }
            dst[x] = static_cast<std::uint8_t>(v & 0xff);
        }
    }
}

GrayImage decode_png(const std::vector<std::uint8_t>& data, const std::string& name) {
    if (data.size() < 8 || std::memcmp(data.data(), kPngSignature.data(), 8) != 0)
        throw IoError("png: bad signature: " + name);

    int width = 0, height = 0, bit_depth = 0, color_type = 0, interlace = 0;
    std::vector<std::uint8_t> idat;
    std::size_t pos = 8;
    bool saw_ihdr = false, saw_iend = false;
    while (pos + 8 <= data.size() && !saw_iend) {
        const std::uint32_t len = be32(&data[pos]);
        if (pos + 12 + len > data.size())
            throw IoError("png: truncated chunk: " + name);
        const char* type = reinterpret_cast<const char*>(&data[pos + 4]);
        const std::uint8_t* payload = &data[pos + 8];
        if (std::memcmp(type, "IHDR", 4) == 0) {
            if (len != 13)
                throw IoError("png: bad IHDR: " + name);
            width = static_cast<int>(be32(payload));
            height = static_cast<int>(be32(payload + 4));
            bit_depth = payload[8];
            color_type = payload[9];
            interlace = payload[12];
            saw_ihdr = true;
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), payload, payload + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            saw_iend = true;
        }
        pos += 12 + len;
    }
    if (!saw_ihdr || width <= 0 || height <= 0)
        throw IoError("png: missing or bad IHDR: " + name);
    if (bit_depth != 8 || color_type != 0)
        throw IoError("png: expected 8-bit grayscale (bit depth 8, color type 0): " + name);
    if (interlace != 0)
        throw IoError("png: interlaced images not supported: " + name);

    const std::size_t stride = static_cast<std::size_t>(width) + 1;
    std::vector<std::uint8_t> raw(stride * height);
    uLongf raw_len = static_cast<uLongf>(raw.size());
    const int rc = ::uncompress(raw.data(), &raw_len, idat.data(),
                                static_cast<uLong>(idat.size()));
    if (rc != Z_OK || raw_len != raw.size())
        throw IoError("png: IDAT inflate failed: " + name);

    std::vector<std::uint8_t> bytes;
    unfilter(raw, bytes, width, height, 1);

    GrayImage img = GrayImage::filled(width, height, 0.0f);
    for (std::size_t i = 0; i < bytes.size(); ++i)
        img.pixels[i] = static_cast<float>(bytes[i]) / 255.0f;
    return img;
}

void encode_png(std::vector<std::uint8_t>& out, int width, int height,
                int color_type, const std::vector<std::uint8_t>& bytes) {
    out.insert(out.end(), kPngSignature.begin(), kPngSignature.end());

    std::uint8_t ihdr[13];
    ihdr[0] = static_cast<std::uint8_t>(width >> 24);
    ihdr[1] = static_cast<std::uint8_t>(width >> 16);
    ihdr[2] = static_cast<std::uint8_t>(width >> 8);
    ihdr[3] = static_cast<std::uint8_t>(width);
    ihdr[4] = static_cast<std::uint8_t>(height >> 24);
    ihdr[5] = static_cast<std::uint8_t>(height >> 16);
    ihdr[6] = static_cast<std::uint8_t>(height >> 8);
    ihdr[7] = static_cast<std::uint8_t>(height);
    ihdr[8] = 8;
    ihdr[9] = static_cast<std::uint8_t>(color_type);
    ihdr[10] = ihdr[11] = ihdr[12] = 0;
    append_chunk(out, "IHDR", ihdr, 13);

    const int bpp = color_type == 2 ? 3 : 1;
    const std::size_t stride = static_cast<std::size_t>(width) * bpp;
    std::vector<std::uint8_t> raw;
    raw.reserve((stride + 1) * height);
    for (int y = 0; y < height; ++y) {
        raw.push_back(0); // filter: none
        raw.insert(raw.end(), bytes.begin() + y * stride, bytes.begin() + (y + 1) * stride);
    }

    uLongf comp_len = ::compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> comp(comp_len);
    const int rc = ::compress2(comp.data(), &comp_len, raw.data(),
                               static_cast<uLong>(raw.size()), Z_BEST_SPEED);
    if (rc != Z_OK)
        throw IoError("png: deflate failed");
    append_chunk(out, "IDAT", comp.data(), comp_len);
    append_chunk(out, "IEND", nullptr, 0);
}

std::uint8_t to_byte(float v) {
    if (v < 0.0f) v = 0.0f;
    if (v > 1.0f) v = 1.0f;
    return static_cast<std::uint8_t>(std::lround(v * 255.0f));
}

GrayImage decode_pgm(const std::vector<std::uint8_t>& data, const std::string& name) {
    // P5, ASCII header with optional '#' comments, 8-bit payload.
    std::size_t pos = 2;
    auto next_token = [&]() -> long {
        while (pos < data.size()) {
            if (std::isspace(data[pos])) {
                ++pos;
            } else if (data[pos] == '#') {
                while (pos < data.size() && data[pos] != '\n') ++pos;
            } else {
                break;
            }
        }
        long v = 0;
        bool any = false;
        while (pos < data.size() && std::isdigit(data[pos])) {
            v = v * 10 + (data[pos] - '0');
            ++pos;
            any = true;
        }
        if (!any)
            throw IoError("pgm: malformed header: " + name);
        return v;
    };
    const long w = next_token();
    const long h = next_token();
    const long maxval = next_token();
    if (w <= 0 || h <= 0 || maxval != 255)
        throw IoError("pgm: expected 8-bit P5 (maxval 255): " + name);
    ++pos; // single whitespace after maxval
    if (pos + static_cast<std::size_t>(w) * h > data.size())
        throw IoError("pgm: truncated payload: " + name);

    GrayImage img = GrayImage::filled(static_cast<int>(w), static_cast<int>(h), 0.0f);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        img.pixels[i] = static_cast<float>(data[pos + i]) / 255.0f;
    return img;
}

} // namespace

GrayImage load_image(const std::filesystem::path& path) {
    const auto data = read_file(path);
    if (data.size() >= 8 && std::memcmp(data.data(), kPngSignature.data(), 8) == 0)
        return decode_png(data, path.string());
    if (data.size() >= 2 && data[0] == 'P' && data[1] == '5')
        return decode_pgm(data, path.string());
    throw IoError("unrecognized image format (expect PNG or P5 PGM): " + path.string());
}

void save_png(const GrayImage& img, const std::filesystem::path& path) {
    std::vector<std::uint8_t> bytes(img.pixels.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        bytes[i] = to_byte(img.pixels[i]);
    std::vector<std::uint8_t> out;
    encode_png(out, img.width, img.height, 0, bytes);
    write_file(path, out);
}

void save_png(const RgbImage& img, const std::filesystem::path& path) {
    std::vector<std::uint8_t> out;
    encode_png(out, img.width, img.height, 2, img.pixels);
    write_file(path, out);
}

void save_pgm(const GrayImage& img, const std::filesystem::path& path) {
    std::vector<std::uint8_t> out;
    const std::string header =
        "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    out.insert(out.end(), header.begin(), header.end());
    for (float v : img.pixels)
        out.push_back(to_byte(v));
    write_file(path, out);
}

} // namespace handloc
