#include "visionts/pipeline.hpp"

#include <string>

#include "visionts/errors.hpp"

namespace visionts {

GrayImage RowMeanReconstructor::reconstruct(const GrayImage& canvas, const PatchMask& mask) const {
    const std::size_t side = canvas.rows();
    if (canvas.cols() != side || side % mask.side() != 0)
        throw ShapeError("canvas must be square and divisible by the mask grid");
    const std::size_t patch = side / mask.side();
    GrayImage out = canvas;
    for (std::size_t y = 0; y < side; ++y) {
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t x = 0; x < side; ++x) {
            if (mask.visible(y / patch, x / patch)) {
                sum += canvas(y, x);
                ++count;
            }
        }
        const float fill = count ? static_cast<float>(sum / static_cast<double>(count)) : 0.0f;
        for (std::size_t x = 0; x < side; ++x)
            if (!mask.visible(y / patch, x / patch)) out(y, x) = fill;
    }
    return out;
}

GrayImage MaeReconstructor::reconstruct(const GrayImage& canvas, const PatchMask& mask) const {
    ForwardOptions options;
    options.strict = strict_;
    return forward_reconstruct(model_, RgbImage::replicate(canvas), mask, options).average_channels();
}

ImagePlan plan_for(const ForecastSettings& settings, const Reconstructor& reconstructor) {
    return make_plan(settings.context_length, settings.horizon, settings.period, settings.r,
                     settings.c, reconstructor.grid_side(), reconstructor.patch_size());
}

Encoded encode(std::span<const double> context, const ForecastSettings& settings,
               std::size_t grid_side, std::size_t patch_size) {
    if (context.size() != settings.context_length)
        throw WindowError("context has " + std::to_string(context.size()) + " values, expected L=" +
                          std::to_string(settings.context_length));
    const ImagePlan plan = make_plan(settings.context_length, settings.horizon, settings.period,
                                     settings.r, settings.c, grid_side, patch_size);
    const Normalized norm = normalize(segment(context, plan.period), plan.r);
    Aligned aligned = align(norm.image, plan);
    return {plan, norm.stats, compose_canvas(aligned.visible, plan), std::move(aligned.mask)};
}

std::vector<double> forecast(std::span<const double> context, const ForecastSettings& settings,
                             const Reconstructor& reconstructor, ForecastTrace* trace) {
    if (context.size() != settings.context_length)
        throw WindowError("context has " + std::to_string(context.size()) + " values, expected L=" +
                          std::to_string(settings.context_length));
    const ImagePlan plan = plan_for(settings, reconstructor);
    if (plan.capacity() < plan.horizon)
        throw CapacityError("plan expresses " + std::to_string(plan.capacity()) +
                            " future values, horizon needs " + std::to_string(plan.horizon));
    Normalized norm = normalize(segment(context, plan.period), plan.r);
    Aligned aligned = align(norm.image, plan);
    GrayImage canvas = compose_canvas(aligned.visible, plan);
    GrayImage full = reconstructor.reconstruct(canvas, aligned.mask);
    auto result = reconstruct_to_forecast(full, plan, norm.stats);
    if (trace) {
        trace->plan = plan;
        trace->normalized = std::move(norm.image);
        trace->visible = std::move(aligned.visible);
        trace->canvas = std::move(canvas);
        trace->reconstructed = std::move(full);
        trace->stats = norm.stats;
    }
    return result;
}

}  // namespace visionts
