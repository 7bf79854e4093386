#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <fuzzmat/error.hpp>

namespace fuzzmat {

struct PixelCoord {
    int row = 0;
    int col = 0;

    friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
    friend auto operator<=>(const PixelCoord&, const PixelCoord&) = default;
};

/// Discrete-valued 2D raster with an optional region-of-interest mask.
///
/// Pixels are stored row-major; every value lies in [0, levels-1]. A mask,
/// when attached, marks which pixels belong to the region of interest
/// (nonzero = inside); all descriptors skip outside pixels, pair statistics
/// skip pairs with either endpoint outside, and runs/zones break at the
/// mask boundary.
class GrayImage {
public:
    GrayImage(int width, int height, int levels, std::vector<int> pixels)
        : width_(width), height_(height), levels_(levels), pixels_(std::move(pixels)) {
        if (width_ < 1 || height_ < 1)
            throw Error("image dimensions must be at least 1x1");
        if (levels_ < 1)
            throw Error("image must have at least one gray level");
        if (static_cast<long long>(width_) * height_ != static_cast<long long>(pixels_.size()))
            throw Error("pixel count does not match image dimensions");
        for (int v : pixels_)
            if (v < 0 || v >= levels_)
                throw Error("pixel value outside [0, levels-1]");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    int levels() const { return levels_; }
    long long pixelCount() const { return static_cast<long long>(width_) * height_; }

    int at(int row, int col) const { return pixels_[static_cast<size_t>(row) * width_ + col]; }
    int atIndex(size_t idx) const { return pixels_[idx]; }
    const std::vector<int>& pixels() const { return pixels_; }

    bool hasMask() const { return !mask_.empty(); }

    /// True when the pixel participates in descriptors (no mask, or inside it).
    bool inside(int row, int col) const {
        return mask_.empty() || mask_[static_cast<size_t>(row) * width_ + col] != 0;
    }
    bool insideIndex(size_t idx) const { return mask_.empty() || mask_[idx] != 0; }

    long long insideCount() const {
        if (mask_.empty()) return pixelCount();
        long long n = 0;
        for (std::uint8_t m : mask_) n += (m != 0);
        return n;
    }

    /// Returns a copy carrying `maskImage` as region of interest (nonzero = inside).
    GrayImage withMask(const GrayImage& maskImage) const {
        if (maskImage.width() != width_ || maskImage.height() != height_)
            throw Error("mask dimensions do not match image dimensions");
        GrayImage out = *this;
        out.mask_.assign(pixels_.size(), 0);
        for (size_t i = 0; i < pixels_.size(); ++i)
            out.mask_[i] = maskImage.pixels()[i] != 0 ? 1 : 0;
        return out;
    }

    GrayImage withoutMask() const {
        GrayImage out = *this;
        out.mask_.clear();
        return out;
    }

    /// Replaces the pixel values, keeping dimensions and mask. `levels` is the
    /// new gray-level count; values are validated against it.
    GrayImage withPixels(std::vector<int> pixels, int levels) const {
        GrayImage out(width_, height_, levels, std::move(pixels));
        out.mask_ = mask_;
        return out;
    }

private:
    int width_;
    int height_;
    int levels_;
    std::vector<int> pixels_;
    std::vector<std::uint8_t> mask_;  // empty = no mask
};

/// Counterclockwise quarter-turn; the mask rotates with the image.
inline GrayImage rotate90(const GrayImage& img) {
    const int w = img.width(), h = img.height();
    std::vector<int> px(static_cast<size_t>(w) * h);
    for (int r = 0; r < w; ++r)
        for (int c = 0; c < h; ++c)
            px[static_cast<size_t>(r) * h + c] = img.at(c, w - 1 - r);
    GrayImage out(h, w, img.levels(), std::move(px));
    if (img.hasMask()) {
        std::vector<int> mk(static_cast<size_t>(w) * h);
        for (int r = 0; r < w; ++r)
            for (int c = 0; c < h; ++c)
                mk[static_cast<size_t>(r) * h + c] = img.inside(c, w - 1 - r) ? 1 : 0;
        out = out.withMask(GrayImage(h, w, 2, std::move(mk)));
    }
    return out;
}

inline GrayImage transpose(const GrayImage& img) {
    const int w = img.width(), h = img.height();
    std::vector<int> px(static_cast<size_t>(w) * h);
    for (int r = 0; r < w; ++r)
        for (int c = 0; c < h; ++c)
            px[static_cast<size_t>(r) * h + c] = img.at(c, r);
    GrayImage out(h, w, img.levels(), std::move(px));
    if (img.hasMask()) {
        std::vector<int> mk(static_cast<size_t>(w) * h);
        for (int r = 0; r < w; ++r)
            for (int c = 0; c < h; ++c)
                mk[static_cast<size_t>(r) * h + c] = img.inside(c, r) ? 1 : 0;
        out = out.withMask(GrayImage(h, w, 2, std::move(mk)));
    }
    return out;
}

}  // namespace fuzzmat
