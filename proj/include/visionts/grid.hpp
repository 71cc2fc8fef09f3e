#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace visionts {

/// Dense row-major 2-D array.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Grid(std::size_t rows, std::size_t cols, std::vector<T> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        assert(data_.size() == rows_ * cols_);
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<T> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const T> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    std::span<T> values() noexcept { return data_; }
    std::span<const T> values() const noexcept { return data_; }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

/// Single-channel image; the three identical RGB channels are implicit.
using GrayImage = Grid<float>;

/// Planar three-channel image (channel, row, col).
struct RgbImage {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<float> pixels;  // 3 * height * width, planar

    RgbImage() = default;
    RgbImage(std::size_t h, std::size_t w, float fill = 0.0f)
        : height(h), width(w), pixels(3 * h * w, fill) {}

    float& at(std::size_t c, std::size_t r, std::size_t col) noexcept {
        return pixels[(c * height + r) * width + col];
    }
    float at(std::size_t c, std::size_t r, std::size_t col) const noexcept {
        return pixels[(c * height + r) * width + col];
    }

    static RgbImage replicate(const GrayImage& gray);
    /// Per-pixel mean over the three channels.
    GrayImage average_channels() const;

    friend bool operator==(const RgbImage&, const RgbImage&) = default;
};

inline RgbImage RgbImage::replicate(const GrayImage& gray) {
    RgbImage out(gray.rows(), gray.cols());
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t r = 0; r < gray.rows(); ++r)
            for (std::size_t x = 0; x < gray.cols(); ++x) out.at(c, r, x) = gray(r, x);
    return out;
}

inline GrayImage RgbImage::average_channels() const {
    GrayImage out(height, width);
    for (std::size_t r = 0; r < height; ++r)
        for (std::size_t x = 0; x < width; ++x)
            out(r, x) = (at(0, r, x) + at(1, r, x) + at(2, r, x)) / 3.0f;
    return out;
}

/// Byte grid (avoids the vector<bool> specialisation).
using MaskGrid = Grid<unsigned char>;

/// N x N patch visibility grid, nonzero = visible.
class PatchMask {
public:
    /// Throws ShapeError unless at least one patch is visible and one masked.
    explicit PatchMask(MaskGrid grid);

    /// Left-visible layout: patch (i, j) is visible iff j < visible_cols.
    static PatchMask left_visible(std::size_t grid_side, std::size_t visible_cols);

    std::size_t side() const noexcept { return grid_.rows(); }
    bool visible(std::size_t row, std::size_t col) const noexcept { return grid_(row, col) != 0; }
    bool visible(std::size_t patch_index) const noexcept {
        return grid_.values()[patch_index] != 0;
    }
    std::size_t visible_count() const noexcept;
    std::size_t masked_count() const noexcept { return grid_.size() - visible_count(); }
    /// Row-major indices of visible patches.
    std::vector<std::size_t> visible_indices() const;
    const MaskGrid& grid() const noexcept { return grid_; }

private:
    MaskGrid grid_;
};

}  // namespace visionts
