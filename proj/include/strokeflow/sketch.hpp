#pragma once

#include "strokeflow/error.hpp"
#include "strokeflow/parallel.hpp"
#include "strokeflow/raster.hpp"

#include <cmath>
#include <vector>

namespace strokeflow {

struct EdgeParams {
    double sigma = 1.0;
    double k = 1.6;
    double threshold = 0.1;

    void validate() const {
        require(sigma > 0.0 && std::isfinite(sigma), ErrorCode::InvalidArgument, "sigma must be positive");
        require(k > 1.0 && std::isfinite(k), ErrorCode::InvalidArgument, "k must exceed 1");
        require(threshold > 0.0 && threshold < 1.0, ErrorCode::InvalidArgument, "threshold must be in (0,1)");
    }
};

namespace detail {

/// Normalized Gaussian taps for offsets -r..r with r = ceil(3 sigma).
inline std::vector<double> gaussian_kernel(double sigma) {
    int r = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> w(2 * r + 1);
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) sum += w[i + r] = std::exp(-0.5 * i * i / (sigma * sigma));
    for (double& v : w) v /= sum;
    return w;
}

/// Separable blur with clamp-to-edge borders.
inline std::vector<double> blur(const std::vector<double>& src, int w, int h, double sigma) {
    auto kernel = gaussian_kernel(sigma);
    int r = static_cast<int>(kernel.size() / 2);
    std::vector<double> tmp(src.size()), out(src.size());
    parallel_for(static_cast<std::size_t>(h), [&](std::size_t yy) {
        int y = static_cast<int>(yy);
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) acc += kernel[i + r] * src[std::size_t(y) * w + std::clamp(x + i, 0, w - 1)];
            tmp[std::size_t(y) * w + x] = acc;
        }
    });
    parallel_for(static_cast<std::size_t>(h), [&](std::size_t yy) {
        int y = static_cast<int>(yy);
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) acc += kernel[i + r] * tmp[std::size_t(std::clamp(y + i, 0, h - 1)) * w + x];
            out[std::size_t(y) * w + x] = acc;
        }
    });
    return out;
}

inline std::vector<double> luminance_plane(const RasterImage& img) {
    std::vector<double> lum(img.pixels.size());
    for (std::size_t i = 0; i < lum.size(); ++i) lum[i] = img.pixels[i].luminance() / 255.0;
    return lum;
}

/// Crossings weaker than this are floating-point noise in flat regions.
inline constexpr double kMinCrossing = 1e-6;

/// Marks the darker pixel of every sign change of the DoG response between
/// horizontal or vertical neighbours whose jump exceeds threshold * max jump.
inline GrayImage zero_crossings(const std::vector<double>& dog, int w, int h, double threshold) {
    auto idx = [w](int x, int y) { return std::size_t(y) * w + x; };
    double max_jump = 0.0;
    auto for_each_crossing = [&](auto&& visit) {
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                double a = dog[idx(x, y)];
                auto check = [&](int qx, int qy) {
                    double b = dog[idx(qx, qy)];
                    if ((a < 0.0) == (b < 0.0)) return;
                    double jump = std::abs(a - b);
                    if (jump <= kMinCrossing) return;
                    visit(a < 0.0 ? idx(x, y) : idx(qx, qy), jump);
                };
                if (x + 1 < w) check(x + 1, y);
                if (y + 1 < h) check(x, y + 1);
            }
    };
    for_each_crossing([&](std::size_t, double jump) { max_jump = std::max(max_jump, jump); });
    GrayImage out(w, h, 255);
    for_each_crossing([&](std::size_t dark, double jump) {
        if (jump > threshold * max_jump) out.pixels[dark] = 0;
    });
    return out;
}

} // namespace detail

/// Classical line-drawing extraction: difference of Gaussians (sigma, k*sigma)
/// on luminance, with lines drawn at the response's zero crossings. Output is
/// black lines on white.
inline GrayImage extract_sketch(const RasterImage& image, const EdgeParams& params = {}) {
    require(!image.empty(), ErrorCode::EmptyImage, "input image has no pixels");
    params.validate();
    auto lum = detail::luminance_plane(image);
    auto narrow = detail::blur(lum, image.width, image.height, params.sigma);
    auto wide = detail::blur(lum, image.width, image.height, params.k * params.sigma);
    for (std::size_t i = 0; i < narrow.size(); ++i) narrow[i] -= wide[i];
    return detail::zero_crossings(narrow, image.width, image.height, params.threshold);
}

} // namespace strokeflow
