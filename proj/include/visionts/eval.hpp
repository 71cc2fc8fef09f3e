#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "visionts/periodicity.hpp"
#include "visionts/series.hpp"

namespace visionts {

/// Mean squared / absolute error over equal-length, non-empty vectors.
/// Throws MetricError otherwise.
double mse(std::span<const double> pred, std::span<const double> truth);
double mae(std::span<const double> pred, std::span<const double> truth);

/// Repeats the last period: out[i] = context[L - P + (i mod P)].
std::vector<double> seasonal_naive_forecast(std::span<const double> context, std::size_t period,
                                            std::size_t horizon);

/// Phase-wise mean over the floor(L / P) most recent whole periods, tiled
/// to the horizon. Drops the oldest remainder like `segment` does.
std::vector<double> seasonal_avg_forecast(std::span<const double> context, std::size_t period,
                                          std::size_t horizon);

/// Geometric mean over datasets of mae / naive_mae.
/// Throws AggregationError on mismatched keys, empty input or naive <= 0.
double normalized_mae(const std::map<std::string, double>& per_dataset_mae,
                      const std::map<std::string, double>& per_dataset_naive_mae);

using Forecaster =
    std::function<std::vector<double>(std::span<const double> context, std::size_t horizon)>;

struct NamedForecaster {
    std::string method;
    Forecaster forecast;
};

enum class Baseline { SeasonalNaive, SeasonalAvg };

std::string baseline_method_name(Baseline baseline);

struct BenchmarkConfig {
    std::string dataset = "dataset";
    std::size_t context_length = 0;
    std::vector<std::size_t> horizons;
    PeriodChoice period;
    double r = 0.4;
    double c = 0.4;
    SplitSpec split = SplitRatios{};
    std::size_t stride = 1;
    /// z-score each variable by its training-split statistics before
    /// forecasting and scoring.
    bool standardize = true;
    /// Worker threads; 0 picks hardware concurrency capped by VISIONTS_THREADS.
    std::size_t threads = 0;
    /// Extra fields echoed into the report's config block.
    nlohmann::json metadata = nlohmann::json::object();
};

struct ReportRow {
    std::string dataset;
    std::size_t horizon = 0;
    std::string method;
    double mse = 0.0;
    double mae = 0.0;
    std::size_t window_count = 0;
};

struct AverageRow {
    std::string dataset;
    std::string method;
    double mse = 0.0;
    double mae = 0.0;
    std::vector<std::size_t> horizons;
};

class EvalReport {
public:
    std::vector<ReportRow> rows;
    /// dataset -> config echo
    std::map<std::string, nlohmann::json> config;

    void merge(const EvalReport& other);
    /// Mean over horizons per (dataset, method).
    std::vector<AverageRow> averages() const;
    /// Per method: geometric mean over datasets of its horizon-averaged MAE
    /// divided by the reference method's. Methods missing on any dataset
    /// are skipped; empty when the reference is absent.
    std::map<std::string, double> normalized_maes(const std::string& reference) const;

    nlohmann::json to_json() const;
    /// Stable serialisation: sorted keys, rows ordered by (dataset, horizon, method).
    std::string dump() const;
    static EvalReport from_json(const nlohmann::json& doc);
};

/// Cap from VISIONTS_THREADS (0 when unset or invalid).
std::size_t thread_cap_from_env();
std::size_t resolve_threads(std::size_t requested);

/// Zero-shot protocol: stride-`config.stride` windows per variable whose
/// target lies in the test split (context may reach into earlier rows),
/// each forecaster and baseline invoked per window, metrics averaged with
/// equal weight per (window, variable). Errors from a window are rethrown
/// with its coordinates prepended.
EvalReport run_benchmark(const SeriesFrame& frame, const BenchmarkConfig& config,
                         const std::vector<NamedForecaster>& forecasters,
                         const std::vector<Baseline>& baselines);

/// MSE over validation-split windows (standardised like run_benchmark).
double validation_loss(const SeriesFrame& frame, const SplitSpec& split, std::size_t context_length,
                       std::size_t horizon, std::size_t stride, const Forecaster& forecaster,
                       std::size_t threads = 0);

}  // namespace visionts
