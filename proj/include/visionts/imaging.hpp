#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "visionts/grid.hpp"

namespace visionts {

/// Side of the square image the backbone was pre-trained on.
inline constexpr std::size_t kImageSide = 224;

/// Geometry of one context-to-image encoding.
struct ImagePlan {
    std::size_t period = 1;          // P: rows of the segmented matrix
    std::size_t periods = 1;         // m = floor(L / P): retained context columns
    std::size_t context_length = 1;  // L
    std::size_t horizon = 1;         // H
    std::size_t grid_side = 14;      // N: patches per image side
    std::size_t patch_size = 16;     // S: pixels per patch side
    std::size_t visible_cols = 1;    // n: visible patch columns
    double r = 0.4;                  // normalisation constant
    double c = 0.4;                  // alignment constant

    std::size_t image_side() const noexcept { return grid_side * patch_size; }
    std::size_t visible_width() const noexcept { return visible_cols * patch_size; }
    /// Width W = round(m * N / n) of the segmented matrix that the full
    /// reconstructed image maps back onto.
    std::size_t output_periods() const noexcept;
    /// Number of future values the masked region can express: (W - m) * P.
    std::size_t capacity() const noexcept;
};

/// n = max(1, floor(c * N * L / (L + H))).
std::size_t visible_columns(std::size_t context_length, std::size_t horizon, double c,
                            std::size_t grid_side);

/// Validates inputs (L >= P >= 1, H >= 1, r and c in (0, 1], N * S = 224)
/// and derives m and n. Throws SegmentError / ConfigError / ShapeError.
ImagePlan make_plan(std::size_t context_length, std::size_t horizon, std::size_t period, double r,
                    double c, std::size_t grid_side = 14, std::size_t patch_size = 16);

/// P x m matrix of the most recent m * P values; column j is the j-th
/// retained period and the oldest L - m * P values are dropped.
Grid<double> segment(std::span<const double> context, std::size_t period);

/// Population mean and standard deviation of the segmented matrix.
struct NormStats {
    double mean = 0.0;
    double std = 1.0;
};

struct Normalized {
    Grid<float> image;
    NormStats stats;
};

/// Affine map to mean 0, standard deviation r. A constant matrix maps to
/// zeros with std recorded as 1.
Normalized normalize(const Grid<double>& raw, double r);

double denormalize(double value, const NormStats& stats, double r) noexcept;
std::vector<double> denormalize(std::span<const float> values, const NormStats& stats, double r);
Grid<double> denormalize(const Grid<float>& values, const NormStats& stats, double r);

struct Aligned {
    GrayImage visible;  // image_side x visible_width
    PatchMask mask;
};

Aligned align(const Grid<float>& normalized, const ImagePlan& plan);

/// Full-size canvas with the visible image on the left and zeros in the
/// masked region; this is the input handed to a reconstructor.
GrayImage compose_canvas(const GrayImage& visible, const ImagePlan& plan);

/// Inverse mapping: resize the full image to P x W, denormalise, flatten
/// column-major and return entries [m * P, m * P + H).
/// Throws CapacityError when (W - m) * P < H.
std::vector<double> reconstruct_to_forecast(const GrayImage& full_image, const ImagePlan& plan,
                                            const NormStats& stats);
std::vector<double> reconstruct_to_forecast(const RgbImage& full_image, const ImagePlan& plan,
                                            const NormStats& stats);

}  // namespace visionts
