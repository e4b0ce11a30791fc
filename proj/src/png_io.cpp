#include "rgs/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

namespace rgs {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

void save_png(const std::string& path, const Image& img) {
    if (img.channels != 1 && img.channels != 3)
        throw ImageIoError("png supports 1 or 3 channels, got " + std::to_string(img.channels));
    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw ImageIoError("cannot open for writing: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw ImageIoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw ImageIoError("libpng write failed: " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, img.width, img.height, 8,
                 img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);

    std::vector<unsigned char> bytes((size_t)img.width * img.height * img.channels);
    for (size_t i = 0; i < bytes.size(); ++i) {
        Scalar v = std::clamp(img.data[i], Scalar(0), Scalar(1));
        bytes[i] = (unsigned char)std::floor(v * 255.0 + 0.5);  // round half-up
    }
    std::vector<png_bytep> rows(img.height);
    for (int y = 0; y < img.height; ++y)
        rows[y] = bytes.data() + (size_t)y * img.width * img.channels;
    png_set_rows(png, info, rows.data());
    png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
    png_destroy_write_struct(&png, &info);
}

Image load_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw ImageIoError("cannot open: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ImageIoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ImageIoError("libpng read failed: " + path);
    }
    png_init_io(png, fp.get());
    // Normalize everything to 8-bit RGB (strip alpha against black? keep alpha out).
    png_read_png(png, info,
                 PNG_TRANSFORM_STRIP_16 | PNG_TRANSFORM_STRIP_ALPHA | PNG_TRANSFORM_EXPAND |
                     PNG_TRANSFORM_GRAY_TO_RGB,
                 nullptr);
    int w = png_get_image_width(png, info);
    int h = png_get_image_height(png, info);
    png_bytepp rows = png_get_rows(png, info);

    Image img(w, h, 3);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w * 3; ++x)
            img.data[(size_t)y * w * 3 + x] = rows[y][x] / Scalar(255);
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void save_pfm(const std::string& path, const Image& img) {
    if (img.channels != 1 && img.channels != 3)
        throw ImageIoError("pfm supports 1 or 3 channels");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ImageIoError("cannot open for writing: " + path);
    out << (img.channels == 3 ? "PF" : "Pf") << "\n"
        << img.width << " " << img.height << "\n"
        << "-1.0\n";  // negative scale = little-endian
    // PFM rows run bottom-to-top.
    std::vector<float> row((size_t)img.width * img.channels);
    for (int y = img.height - 1; y >= 0; --y) {
        for (int x = 0; x < img.width * img.channels; ++x)
            row[x] = (float)img.data[(size_t)y * img.width * img.channels + x];
        out.write(reinterpret_cast<const char*>(row.data()), row.size() * sizeof(float));
    }
    if (!out) throw ImageIoError("write failed: " + path);
}

Image load_pfm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ImageIoError("cannot open: " + path);
    std::string magic;
    int w = 0, h = 0;
    double scale = 0;
    in >> magic >> w >> h >> scale;
    if ((magic != "PF" && magic != "Pf") || w <= 0 || h <= 0 || scale == 0 || !in)
        throw ImageIoError("malformed pfm header: " + path);
    in.get();  // single whitespace after the header
    if (scale > 0) throw ImageIoError("big-endian pfm not supported: " + path);
    int c = magic == "PF" ? 3 : 1;

    Image img(w, h, c);
    std::vector<float> row((size_t)w * c);
    for (int y = h - 1; y >= 0; --y) {
        in.read(reinterpret_cast<char*>(row.data()), row.size() * sizeof(float));
        if (!in) throw ImageIoError("truncated pfm: " + path);
        for (int x = 0; x < w * c; ++x) img.data[(size_t)y * w * c + x] = row[x];
    }
    return img;
}

Image flow_to_color(const Image& flow, Scalar max_magnitude) {
    if (flow.channels < 2) throw ImageIoError("flow image needs at least 2 channels");
    Scalar max_mag = max_magnitude;
    if (max_mag <= 0) {
        for (int y = 0; y < flow.height; ++y)
            for (int x = 0; x < flow.width; ++x)
                max_mag = std::max(max_mag, std::hypot(flow.at(x, y, 0), flow.at(x, y, 1)));
        if (max_mag == 0) max_mag = 1;
    }
    Image rgb(flow.width, flow.height, 3);
    for (int y = 0; y < flow.height; ++y)
        for (int x = 0; x < flow.width; ++x) {
            Scalar u = flow.at(x, y, 0), v = flow.at(x, y, 1);
            Scalar mag = std::min(std::hypot(u, v) / max_mag, Scalar(1));
            Scalar hue = (std::atan2(-v, -u) / (2 * M_PI) + 0.5);  // [0, 1)
            Scalar h6 = hue * 6;
            int sector = std::min(5, (int)h6);
            Scalar f = h6 - sector;
            // HSV -> RGB with s = mag, v = 1.
            Scalar p = 1 - mag, q = 1 - mag * f, t = 1 - mag * (1 - f);
            Scalar r, g, b;
            switch (sector) {
                case 0: r = 1; g = t; b = p; break;
                case 1: r = q; g = 1; b = p; break;
                case 2: r = p; g = 1; b = t; break;
                case 3: r = p; g = q; b = 1; break;
                case 4: r = t; g = p; b = 1; break;
                default: r = 1; g = p; b = q; break;
            }
            rgb.at(x, y, 0) = r;
            rgb.at(x, y, 1) = g;
            rgb.at(x, y, 2) = b;
        }
    return rgb;
}

}  // namespace rgs
