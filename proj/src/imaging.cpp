#include "visionts/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "visionts/errors.hpp"
#include "visionts/resample.hpp"

namespace visionts {

PatchMask::PatchMask(MaskGrid grid) : grid_(std::move(grid)) {
    if (grid_.rows() == 0 || grid_.rows() != grid_.cols())
        throw ShapeError("patch mask must be a non-empty square grid");
    const std::size_t vis = visible_count();
    if (vis == 0) throw ShapeError("patch mask has no visible patch");
    if (vis == grid_.size()) throw ShapeError("patch mask has no masked patch");
}

PatchMask PatchMask::left_visible(std::size_t grid_side, std::size_t visible_cols) {
    MaskGrid g(grid_side, grid_side, 0);
    for (std::size_t i = 0; i < grid_side; ++i)
        for (std::size_t j = 0; j < std::min(visible_cols, grid_side); ++j) g(i, j) = 1;
    return PatchMask(std::move(g));
}

std::size_t PatchMask::visible_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(grid_.values().begin(), grid_.values().end(), [](unsigned char v) { return v != 0; }));
}

std::vector<std::size_t> PatchMask::visible_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < grid_.size(); ++k)
        if (grid_.values()[k]) out.push_back(k);
    return out;
}

std::size_t ImagePlan::output_periods() const noexcept {
    // round-half-up of m * N / n in integers
    return (2 * periods * grid_side + visible_cols) / (2 * visible_cols);
}

std::size_t ImagePlan::capacity() const noexcept {
    const std::size_t w = output_periods();
    return w > periods ? (w - periods) * period : 0;
}

std::size_t visible_columns(std::size_t context_length, std::size_t horizon, double c,
                            std::size_t grid_side) {
    const double ratio = static_cast<double>(context_length) /
                         static_cast<double>(context_length + horizon);
    // The epsilon keeps exact integer products (e.g. 14 * 1/2) from
    // flooring one below because of binary rounding in c.
    const double n = std::floor(c * static_cast<double>(grid_side) * ratio + 1e-9);
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(n, 0.0)), 1, grid_side);
}

ImagePlan make_plan(std::size_t context_length, std::size_t horizon, std::size_t period, double r,
                    double c, std::size_t grid_side, std::size_t patch_size) {
    if (period == 0) throw SegmentError("period must be >= 1");
    if (context_length < period)
        throw SegmentError("context length " + std::to_string(context_length) +
                           " is shorter than period " + std::to_string(period));
    if (horizon == 0) throw ConfigError("horizon must be >= 1");
    if (!(r > 0.0 && r <= 1.0)) throw ConfigError("r must lie in (0, 1]");
    if (!(c > 0.0 && c <= 1.0)) throw ConfigError("c must lie in (0, 1]");
    if (grid_side * patch_size != kImageSide)
        throw ShapeError("grid side * patch size must equal " + std::to_string(kImageSide));
    ImagePlan plan;
    plan.period = period;
    plan.periods = context_length / period;
    plan.context_length = context_length;
    plan.horizon = horizon;
    plan.grid_side = grid_side;
    plan.patch_size = patch_size;
    plan.visible_cols = visible_columns(context_length, horizon, c, grid_side);
    plan.r = r;
    plan.c = c;
    return plan;
}

Grid<double> segment(std::span<const double> context, std::size_t period) {
    if (period == 0) throw SegmentError("period must be >= 1");
    if (context.size() < period)
        throw SegmentError("context length " + std::to_string(context.size()) +
                           " is shorter than period " + std::to_string(period));
    const std::size_t m = context.size() / period;
    const std::size_t skip = context.size() - m * period;
    Grid<double> out(period, m);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t p = 0; p < period; ++p) out(p, j) = context[skip + j * period + p];
    return out;
}

Normalized normalize(const Grid<double>& raw, double r) {
    if (raw.empty()) throw ShapeError("cannot normalise an empty matrix");
    const auto v = raw.values();
    Normalized out{Grid<float>(raw.rows(), raw.cols()), {}};
    if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); })) {
        out.stats = {v.front(), 1.0};
        return out;
    }
    const double count = static_cast<double>(v.size());
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = sum / count;
    double sq = 0.0;
    for (double x : v) sq += (x - mean) * (x - mean);
    const double sd = std::sqrt(sq / count);
    out.stats = {mean, sd};
    auto dst = out.image.values();
    const double scale = r / sd;
    for (std::size_t k = 0; k < v.size(); ++k) dst[k] = static_cast<float>((v[k] - mean) * scale);
    return out;
}

double denormalize(double value, const NormStats& stats, double r) noexcept {
    return value * stats.std / r + stats.mean;
}

std::vector<double> denormalize(std::span<const float> values, const NormStats& stats, double r) {
    std::vector<double> out(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) out[k] = denormalize(values[k], stats, r);
    return out;
}

Grid<double> denormalize(const Grid<float>& values, const NormStats& stats, double r) {
    Grid<double> out(values.rows(), values.cols());
    auto src = values.values();
    auto dst = out.values();
    for (std::size_t k = 0; k < src.size(); ++k) dst[k] = denormalize(src[k], stats, r);
    return out;
}

Aligned align(const Grid<float>& normalized, const ImagePlan& plan) {
    if (normalized.rows() != plan.period || normalized.cols() != plan.periods)
        throw ShapeError("normalised matrix is " + std::to_string(normalized.rows()) + "x" +
                         std::to_string(normalized.cols()) + ", plan expects " +
                         std::to_string(plan.period) + "x" + std::to_string(plan.periods));
    return {bilinear_resize(normalized, plan.image_side(), plan.visible_width()),
            PatchMask::left_visible(plan.grid_side, plan.visible_cols)};
}

GrayImage compose_canvas(const GrayImage& visible, const ImagePlan& plan) {
    const std::size_t side = plan.image_side();
    if (visible.rows() != side || visible.cols() != plan.visible_width())
        throw ShapeError("visible image does not match the plan geometry");
    GrayImage canvas(side, side, 0.0f);
    for (std::size_t i = 0; i < side; ++i)
        std::copy(visible.row(i).begin(), visible.row(i).end(), canvas.row(i).begin());
    return canvas;
}

std::vector<double> reconstruct_to_forecast(const GrayImage& full_image, const ImagePlan& plan,
                                            const NormStats& stats) {
    const std::size_t side = plan.image_side();
    if (full_image.rows() != side || full_image.cols() != side)
        throw ShapeError("reconstructed image must be " + std::to_string(side) + "x" +
                         std::to_string(side));
    const std::size_t width = plan.output_periods();
    if (plan.capacity() < plan.horizon)
        throw CapacityError("plan expresses " + std::to_string(plan.capacity()) +
                            " future values, horizon needs " + std::to_string(plan.horizon));
    const Grid<float> segments = bilinear_resize(full_image, plan.period, width);
    const std::size_t begin = plan.periods * plan.period;
    std::vector<double> forecast;
    forecast.reserve(plan.horizon);
    for (std::size_t k = begin; k < begin + plan.horizon; ++k) {
        // column-major position k -> (phase, period column)
        forecast.push_back(denormalize(segments(k % plan.period, k / plan.period), stats, plan.r));
    }
    return forecast;
}

std::vector<double> reconstruct_to_forecast(const RgbImage& full_image, const ImagePlan& plan,
                                            const NormStats& stats) {
    return reconstruct_to_forecast(full_image.average_channels(), plan, stats);
}

}  // namespace visionts
