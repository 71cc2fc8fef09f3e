#pragma once

#include <cstddef>

#include "visionts/grid.hpp"

namespace visionts {

struct ResizeSpec {
    std::size_t in_h = 1;
    std::size_t in_w = 1;
    std::size_t out_h = 1;
    std::size_t out_w = 1;
};

/// Bilinear resize with half-pixel centres: output pixel i samples source
/// coordinate (i + 0.5) * in / out - 0.5, clamped to [0, in - 1]. No
/// antialias prefilter. Same-size resizes return the input unchanged and
/// constant images stay exactly constant.
///
/// Throws ShapeError if `src` does not have the shape in `spec` or any
/// extent is zero.
Grid<float> bilinear_resize(const Grid<float>& src, const ResizeSpec& spec);

inline Grid<float> bilinear_resize(const Grid<float>& src, std::size_t out_h, std::size_t out_w) {
    return bilinear_resize(src, {src.rows(), src.cols(), out_h, out_w});
}

/// Human-readable tag for the convention above, echoed into reports.
inline constexpr const char* kResizeConvention = "bilinear/half-pixel/clamp/no-antialias";

}  // namespace visionts
