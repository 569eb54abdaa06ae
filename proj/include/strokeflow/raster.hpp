#pragma once

#include "strokeflow/error.hpp"
#include "strokeflow/stroke.hpp"

#include <cstdint>
#include <vector>

namespace strokeflow {

/// Row-major 8-bit RGB image.
struct RasterImage {
    int width = 0;
    int height = 0;
    std::vector<Color> pixels;

    RasterImage() = default;
    RasterImage(int w, int h, Color fill = Color::white())
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {
        require(w >= 0 && h >= 0, ErrorCode::InvalidArgument, "negative image size");
    }

    bool empty() const noexcept { return width == 0 || height == 0; }
    Color& at(int x, int y) noexcept { return pixels[static_cast<std::size_t>(y) * width + x]; }
    Color at(int x, int y) const noexcept { return pixels[static_cast<std::size_t>(y) * width + x]; }

    friend bool operator==(const RasterImage&, const RasterImage&) = default;
};

/// Row-major 8-bit grayscale image.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 255)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill) {
        require(w >= 0 && h >= 0, ErrorCode::InvalidArgument, "negative image size");
    }

    bool empty() const noexcept { return width == 0 || height == 0; }
    std::uint8_t& at(int x, int y) noexcept { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::uint8_t at(int x, int y) const noexcept { return pixels[static_cast<std::size_t>(y) * width + x]; }

    friend bool operator==(const GrayImage&, const GrayImage&) = default;
};

inline RasterImage to_rgb(const GrayImage& g) {
    RasterImage out(g.width, g.height);
    for (std::size_t i = 0; i < g.pixels.size(); ++i) out.pixels[i] = {g.pixels[i], g.pixels[i], g.pixels[i]};
    return out;
}

inline GrayImage to_gray(const RasterImage& img) {
    GrayImage out(img.width, img.height);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) out.pixels[i] = img.pixels[i].to_gray().r;
    return out;
}

} // namespace strokeflow
