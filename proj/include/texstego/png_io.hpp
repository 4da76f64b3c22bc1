#ifndef TEXSTEGO_PNG_IO_HPP
#define TEXSTEGO_PNG_IO_HPP

// PNG import/export through libpng. Link against PNG::PNG.
//
// Export quantises, so a stego image written as PNG generally no longer
// carries a recoverable payload; keep the STG1 container for extraction.

#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <png.h>

#include "image.hpp"

namespace texstego::io {

namespace detail {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) {
            std::fclose(f);
        }
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

inline FilePtr open_file(const std::filesystem::path& path, const char* mode) {
    if (path.empty()) {
        throw Error(Errc::io, "empty path");
    }
    FilePtr f(std::fopen(path.c_str(), mode));
    if (!f) {
        throw Error(Errc::io, std::string("cannot open ") + path.string());
    }
    return f;
}

inline void png_error_handler(png_structp png, png_const_charp msg) {
    auto* message = static_cast<std::string*>(png_get_error_ptr(png));
    if (message) {
        *message = msg;
    }
    png_longjmp(png, 1);
}

inline void png_warning_handler(png_structp, png_const_charp) {}

}  // namespace detail

/// Round half away from zero, then clamp to [0, max_value].
inline double quantize_sample(double v, double max_value) {
    const double r = std::round(v);
    return r < 0.0 ? 0.0 : (r > max_value ? max_value : r);
}

/**
 * Load a PNG as a FloatImage with peak 2^depth - 1. Grey images are
 * replicated into three channels, palettes expanded, alpha dropped.
 */
inline FloatImage import_png(const std::filesystem::path& path) {
    auto file = detail::open_file(path, "rb");
    unsigned char sig[8] = {};
    if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
        throw Error(Errc::bad_magic, path.string() + ": not a PNG file");
    }

    std::string message;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message,
                                             detail::png_error_handler, detail::png_warning_handler);
    if (!png) {
        throw Error(Errc::io, "png_create_read_struct failed");
    }
    png_infop info = png_create_info_struct(png);
    std::vector<png_byte> pixels;
    std::vector<png_bytep> rows;
    png_uint_32 width = 0;
    png_uint_32 height = 0;
    int depth = 0;
    int channels = 0;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw Error(Errc::io, path.string() + ": libpng: " + message);
    }
    png_init_io(png, file.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    const int color = png_get_color_type(png, info);
    if (color == PNG_COLOR_TYPE_PALETTE) {
        png_set_palette_to_rgb(png);
    }
    if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) {
        png_set_expand_gray_1_2_4_to_8(png);
    }
    if (png_get_valid(png, info, PNG_INFO_tRNS)) {
        png_set_tRNS_to_alpha(png);
    }
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) {
        png_set_gray_to_rgb(png);
    }
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    width = png_get_image_width(png, info);
    height = png_get_image_height(png, info);
    depth = png_get_bit_depth(png, info);
    channels = png_get_channels(png, info);
    const std::size_t stride = png_get_rowbytes(png, info);
    pixels.resize(stride * height);
    rows.resize(height);
    for (png_uint_32 y = 0; y < height; ++y) {
        rows[y] = pixels.data() + y * stride;
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    if (channels != 3) {
        throw Error(Errc::dimension, path.string() + ": unsupported channel count " + std::to_string(channels));
    }
    if (depth != 8 && depth != 16) {
        throw Error(Errc::dimension, path.string() + ": unsupported bit depth " + std::to_string(depth));
    }
    const double peak = depth == 8 ? 255.0 : 65535.0;
    FloatImage img(static_cast<Eigen::Index>(height), static_cast<Eigen::Index>(width), peak);
    for (png_uint_32 y = 0; y < height; ++y) {
        const png_byte* row = rows[y];
        for (png_uint_32 x = 0; x < width; ++x) {
            for (std::size_t c = 0; c < kChannels; ++c) {
                const std::size_t idx = x * kChannels + c;
                const double v = depth == 8 ? row[idx]
                                            : static_cast<double>((row[2 * idx] << 8) | row[2 * idx + 1]);
                img.at(y, x, c) = v;
            }
        }
    }
    return img;
}

/**
 * Write an RGB PNG at 8 or 16 bits. Samples are rescaled from the image's
 * peak to 2^depth - 1 when the two differ, then rounded half away from
 * zero and clamped.
 */
inline void export_png(const FloatImage& img, int depth, const std::filesystem::path& path) {
    if (depth != 8 && depth != 16) {
        throw Error(Errc::parameter, "PNG export depth must be 8 or 16");
    }
    if (img.empty()) {
        throw Error(Errc::dimension, "cannot export an empty image");
    }
    const double max_value = depth == 8 ? 255.0 : 65535.0;
    const double scale = img.peak() == max_value ? 1.0 : max_value / img.peak();
    const auto width = static_cast<std::size_t>(img.width());
    const auto height = static_cast<std::size_t>(img.height());
    const std::size_t bytes_per_sample = depth / 8;
    const std::size_t stride = width * kChannels * bytes_per_sample;
    std::vector<png_byte> pixels(stride * height);
    std::vector<png_bytep> rows(height);
    for (std::size_t y = 0; y < height; ++y) {
        png_byte* row = pixels.data() + y * stride;
        rows[y] = row;
        for (std::size_t x = 0; x < width; ++x) {
            for (std::size_t c = 0; c < kChannels; ++c) {
                const double raw = img.at(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x), c);
                const auto q = static_cast<unsigned>(quantize_sample(raw * scale, max_value));
                const std::size_t idx = x * kChannels + c;
                if (depth == 8) {
                    row[idx] = static_cast<png_byte>(q);
                } else {
                    row[2 * idx] = static_cast<png_byte>(q >> 8);
                    row[2 * idx + 1] = static_cast<png_byte>(q & 0xffu);
                }
            }
        }
    }

    auto file = detail::open_file(path, "wb");
    std::string message;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message,
                                              detail::png_error_handler, detail::png_warning_handler);
    if (!png) {
        throw Error(Errc::io, "png_create_write_struct failed");
    }
    png_infop info = png_create_info_struct(png);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw Error(Errc::io, path.string() + ": libpng: " + message);
    }
    png_init_io(png, file.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), depth,
                 PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace texstego::io

#endif  // TEXSTEGO_PNG_IO_HPP
