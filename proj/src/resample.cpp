#include "visionts/resample.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "visionts/errors.hpp"

namespace visionts {

namespace {

struct Tap {
    std::size_t lo;
    std::size_t hi;
    float weight;  // blend factor toward `hi`
};

std::vector<Tap> taps(std::size_t in, std::size_t out) {
    std::vector<Tap> t(out);
    const double scale = static_cast<double>(in) / static_cast<double>(out);
    const double max_coord = static_cast<double>(in - 1);
    for (std::size_t i = 0; i < out; ++i) {
        double src = (static_cast<double>(i) + 0.5) * scale - 0.5;
        src = std::clamp(src, 0.0, max_coord);
        const auto lo = static_cast<std::size_t>(src);
        t[i] = {lo, std::min(lo + 1, in - 1), static_cast<float>(src - static_cast<double>(lo))};
    }
    return t;
}

}  // namespace

Grid<float> bilinear_resize(const Grid<float>& src, const ResizeSpec& spec) {
    if (spec.in_h == 0 || spec.in_w == 0 || spec.out_h == 0 || spec.out_w == 0)
        throw ShapeError("resize extents must be >= 1");
    if (src.rows() != spec.in_h || src.cols() != spec.in_w)
        throw ShapeError("resize source is " + std::to_string(src.rows()) + "x" +
                         std::to_string(src.cols()) + ", spec says " + std::to_string(spec.in_h) +
                         "x" + std::to_string(spec.in_w));
    if (spec.in_h == spec.out_h && spec.in_w == spec.out_w) return src;

    const auto ty = taps(spec.in_h, spec.out_h);
    const auto tx = taps(spec.in_w, spec.out_w);
    Grid<float> out(spec.out_h, spec.out_w);
    for (std::size_t i = 0; i < spec.out_h; ++i) {
        const auto top = src.row(ty[i].lo);
        const auto bottom = src.row(ty[i].hi);
        const float wy = ty[i].weight;
        auto dst = out.row(i);
        for (std::size_t j = 0; j < spec.out_w; ++j) {
            const Tap& x = tx[j];
            const float upper = std::lerp(top[x.lo], top[x.hi], x.weight);
            const float lower = std::lerp(bottom[x.lo], bottom[x.hi], x.weight);
            dst[j] = std::lerp(upper, lower, wy);
        }
    }
    return out;
}

}  // namespace visionts
