#pragma once

#include "strokeflow/error.hpp"
#include "strokeflow/raster.hpp"

#include <png.h>

#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

namespace strokeflow::png {

namespace detail {

struct ImageGuard {
    png_image image{};
    ImageGuard() {
        image.version = PNG_IMAGE_VERSION;
    }
    ~ImageGuard() { png_image_free(&image); }
    ImageGuard(const ImageGuard&) = delete;
    ImageGuard& operator=(const ImageGuard&) = delete;
};

inline RasterImage finish_read(ImageGuard& g) {
    g.image.format = PNG_FORMAT_RGB;
    // Transparent areas are composited over white.
    png_color background{255, 255, 255};
    RasterImage out(static_cast<int>(g.image.width), static_cast<int>(g.image.height));
    static_assert(sizeof(Color) == 3);
    if (!png_image_finish_read(&g.image, &background, out.pixels.data(), 0, nullptr))
        fail(ErrorCode::Io, std::string("PNG decode failed: ") + g.image.message);
    return out;
}

} // namespace detail

inline RasterImage read(const std::filesystem::path& path) {
    detail::ImageGuard g;
    if (!png_image_begin_read_from_file(&g.image, path.string().c_str()))
        fail(ErrorCode::Io, "cannot read PNG '" + path.string() + "': " + g.image.message);
    return detail::finish_read(g);
}

inline RasterImage decode(const std::vector<std::uint8_t>& bytes) {
    detail::ImageGuard g;
    if (!png_image_begin_read_from_memory(&g.image, bytes.data(), bytes.size()))
        fail(ErrorCode::Io, std::string("cannot decode PNG: ") + g.image.message);
    return detail::finish_read(g);
}

inline void write(const std::filesystem::path& path, const RasterImage& img) {
    require(!img.empty(), ErrorCode::EmptyImage, "cannot write an empty PNG");
    detail::ImageGuard g;
    g.image.width = static_cast<png_uint_32>(img.width);
    g.image.height = static_cast<png_uint_32>(img.height);
    g.image.format = PNG_FORMAT_RGB;
    if (!png_image_write_to_file(&g.image, path.string().c_str(), 0, img.pixels.data(), 0, nullptr))
        fail(ErrorCode::Io, "cannot write PNG '" + path.string() + "': " + g.image.message);
}

inline void write(const std::filesystem::path& path, const GrayImage& img) {
    require(!img.empty(), ErrorCode::EmptyImage, "cannot write an empty PNG");
    detail::ImageGuard g;
    g.image.width = static_cast<png_uint_32>(img.width);
    g.image.height = static_cast<png_uint_32>(img.height);
    g.image.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&g.image, path.string().c_str(), 0, img.pixels.data(), 0, nullptr))
        fail(ErrorCode::Io, "cannot write PNG '" + path.string() + "': " + g.image.message);
}

} // namespace strokeflow::png
