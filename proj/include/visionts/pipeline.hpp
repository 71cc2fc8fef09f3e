#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "visionts/imaging.hpp"
#include "visionts/mae.hpp"

namespace visionts {

/// Fills the masked region of a canvas. Implementations must be safe to
/// call concurrently.
class Reconstructor {
public:
    virtual ~Reconstructor() = default;
    /// `canvas` is image_side x image_side; returns an image of equal size.
    virtual GrayImage reconstruct(const GrayImage& canvas, const PatchMask& mask) const = 0;
    virtual std::string name() const = 0;
    virtual std::size_t grid_side() const { return 14; }
    virtual std::size_t patch_size() const { return 16; }
};

/// Stand-in with a closed-form answer: every masked pixel gets the mean of
/// the visible pixels in its row. Under the codec this reproduces the
/// seasonal-average forecast.
class RowMeanReconstructor final : public Reconstructor {
public:
    GrayImage reconstruct(const GrayImage& canvas, const PatchMask& mask) const override;
    std::string name() const override { return "row-mean"; }
};

/// Replicates the grey canvas to three channels, runs the MAE and averages
/// the channels of the result.
class MaeReconstructor final : public Reconstructor {
public:
    explicit MaeReconstructor(const MaeModel& model, bool strict = false)
        : model_(model), strict_(strict) {}

    GrayImage reconstruct(const GrayImage& canvas, const PatchMask& mask) const override;
    std::string name() const override { return "mae"; }
    std::size_t grid_side() const override { return model_.manifest().grid_side; }
    std::size_t patch_size() const override { return model_.manifest().patch_size; }

private:
    const MaeModel& model_;
    bool strict_;
};

struct ForecastSettings {
    std::size_t context_length = 0;  // L; the context span must have this length
    std::size_t horizon = 0;         // H
    std::size_t period = 1;          // P
    double r = 0.4;
    double c = 0.4;
};

/// Intermediate products of one forecast, for inspection dumps.
struct ForecastTrace {
    ImagePlan plan;
    Grid<float> normalized;  // P x m
    GrayImage visible;       // 224 x n*S
    GrayImage canvas;        // 224 x 224, zeros where masked
    GrayImage reconstructed; // 224 x 224
    NormStats stats;
};

/// Plan for `settings` using the reconstructor's grid geometry.
ImagePlan plan_for(const ForecastSettings& settings, const Reconstructor& reconstructor);

/// Full encode -> reconstruct -> decode pass for one univariate context.
std::vector<double> forecast(std::span<const double> context, const ForecastSettings& settings,
                             const Reconstructor& reconstructor, ForecastTrace* trace = nullptr);

struct Encoded {
    ImagePlan plan;
    NormStats stats;
    GrayImage canvas;
    PatchMask mask;
};

/// Encoding half of the pipeline (segment, normalise, align, compose).
/// Its cost depends on the image size, not on L beyond the O(L) copy.
Encoded encode(std::span<const double> context, const ForecastSettings& settings,
               std::size_t grid_side = 14, std::size_t patch_size = 16);

}  // namespace visionts
