#include "visionts/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <thread>

#include "visionts/errors.hpp"
#include "visionts/resample.hpp"

namespace visionts {

namespace {

void check_lengths(std::span<const double> pred, std::span<const double> truth) {
    if (pred.size() != truth.size())
        throw MetricError("length mismatch: prediction " + std::to_string(pred.size()) +
                          ", truth " + std::to_string(truth.size()));
    if (pred.empty()) throw MetricError("empty vectors");
}

void check_baseline(std::span<const double> context, std::size_t period) {
    if (period == 0) throw BaselineError("period must be >= 1");
    if (context.size() < period)
        throw BaselineError("context of " + std::to_string(context.size()) +
                            " values is shorter than period " + std::to_string(period));
}

/// Runs fn(i) for i in [0, n). The exception of the lowest failing index is
/// rethrown after all workers finish, so failures are reproducible.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t count = std::min(threads, n);
    if (count <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(count);
        for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

struct ScaledColumns {
    std::vector<std::vector<double>> columns;
    std::vector<double> mean;
    std::vector<double> std;
};

ScaledColumns standardize_by_train(const SeriesFrame& frame, std::size_t train_end, bool enabled) {
    ScaledColumns out;
    for (std::size_t v = 0; v < frame.variables(); ++v) {
        const auto col = frame.column(v);
        double mean = 0.0, sd = 1.0;
        if (enabled) {
            double sum = 0.0;
            for (std::size_t i = 0; i < train_end; ++i) sum += col[i];
            mean = sum / static_cast<double>(train_end);
            double sq = 0.0;
            for (std::size_t i = 0; i < train_end; ++i) sq += (col[i] - mean) * (col[i] - mean);
            sd = std::sqrt(sq / static_cast<double>(train_end));
            if (!(sd > 0.0)) sd = 1.0;
        }
        std::vector<double> scaled(col.size());
        for (std::size_t i = 0; i < col.size(); ++i) scaled[i] = (col[i] - mean) / sd;
        out.columns.push_back(std::move(scaled));
        out.mean.push_back(mean);
        out.std.push_back(sd);
    }
    return out;
}

struct WindowErrors {
    double squared = 0.0;
    double absolute = 0.0;
};

// Evaluates every method on every (variable, origin) job; returns the
// per-job sums in job-major order: result[job * methods + method].
std::vector<WindowErrors> evaluate_windows(const ScaledColumns& data,
                                           const std::vector<std::size_t>& origins,
                                           std::size_t context, std::size_t horizon,
                                           const std::vector<NamedForecaster>& methods,
                                           std::size_t threads, const std::string& dataset) {
    const std::size_t jobs = data.columns.size() * origins.size();
    std::vector<WindowErrors> out(jobs * methods.size());
    parallel_for(jobs, threads, [&](std::size_t job) {
        const std::size_t var = job / origins.size();
        const std::size_t origin = origins[job % origins.size()];
        const auto& col = data.columns[var];
        const std::span<const double> ctx(col.data() + origin - context, context);
        const std::span<const double> truth(col.data() + origin, horizon);
        for (std::size_t m = 0; m < methods.size(); ++m) {
            try {
                const auto pred = methods[m].forecast(ctx, horizon);
                check_lengths(pred, truth);
                WindowErrors& e = out[job * methods.size() + m];
                for (std::size_t k = 0; k < horizon; ++k) {
                    const double d = pred[k] - truth[k];
                    e.squared += d * d;
                    e.absolute += std::abs(d);
                }
            } catch (const Error& e) {
                throw_error(e.kind(), "dataset " + dataset + ", method " + methods[m].method +
                                          ", variable " + std::to_string(var) + ", origin " +
                                          std::to_string(origin) + ", horizon " +
                                          std::to_string(horizon) + ": " + e.detail());
            }
        }
    });
    return out;
}

}  // namespace

double mse(std::span<const double> pred, std::span<const double> truth) {
    check_lengths(pred, truth);
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += (pred[i] - truth[i]) * (pred[i] - truth[i]);
    return s / static_cast<double>(pred.size());
}

double mae(std::span<const double> pred, std::span<const double> truth) {
    check_lengths(pred, truth);
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - truth[i]);
    return s / static_cast<double>(pred.size());
}

std::vector<double> seasonal_naive_forecast(std::span<const double> context, std::size_t period,
                                            std::size_t horizon) {
    check_baseline(context, period);
    std::vector<double> out(horizon);
    const std::size_t base = context.size() - period;
    for (std::size_t i = 0; i < horizon; ++i) out[i] = context[base + i % period];
    return out;
}

std::vector<double> seasonal_avg_forecast(std::span<const double> context, std::size_t period,
                                          std::size_t horizon) {
    check_baseline(context, period);
    const std::size_t m = context.size() / period;
    const std::size_t skip = context.size() - m * period;
    std::vector<double> phase(period, 0.0);
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t p = 0; p < period; ++p) phase[p] += context[skip + j * period + p];
    for (double& v : phase) v /= static_cast<double>(m);
    std::vector<double> out(horizon);
    for (std::size_t i = 0; i < horizon; ++i) out[i] = phase[i % period];
    return out;
}

double normalized_mae(const std::map<std::string, double>& per_dataset_mae,
                      const std::map<std::string, double>& per_dataset_naive_mae) {
    if (per_dataset_mae.empty()) throw AggregationError("no datasets to aggregate");
    if (per_dataset_mae.size() != per_dataset_naive_mae.size())
        throw AggregationError("dataset sets differ");
    double log_sum = 0.0;
    for (const auto& [name, value] : per_dataset_mae) {
        const auto it = per_dataset_naive_mae.find(name);
        if (it == per_dataset_naive_mae.end())
            throw AggregationError("no naive MAE for dataset '" + name + "'");
        if (!(it->second > 0.0))
            throw AggregationError("naive MAE for dataset '" + name + "' is not positive");
        if (!(value >= 0.0)) throw AggregationError("MAE for dataset '" + name + "' is negative");
        log_sum += std::log(value / it->second);
    }
    return std::exp(log_sum / static_cast<double>(per_dataset_mae.size()));
}

std::string baseline_method_name(Baseline baseline) {
    return baseline == Baseline::SeasonalNaive ? "seasonal_naive" : "seasonal_avg";
}

std::size_t thread_cap_from_env() {
    const char* env = std::getenv("VISIONTS_THREADS");
    if (!env || !*env) return 0;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    return (end && *end == '\0' && v > 0) ? static_cast<std::size_t>(v) : 0;
}

std::size_t resolve_threads(std::size_t requested) {
    std::size_t n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const std::size_t cap = thread_cap_from_env()) n = std::min(n, cap);
    return std::max<std::size_t>(n, 1);
}

EvalReport run_benchmark(const SeriesFrame& frame, const BenchmarkConfig& config,
                         const std::vector<NamedForecaster>& forecasters,
                         const std::vector<Baseline>& baselines) {
    if (config.context_length == 0) throw ConfigError("context length must be >= 1");
    if (config.horizons.empty()) throw ConfigError("at least one horizon is required");
    const SplitBounds bounds = resolve_split(frame.rows(), config.split);
    if (bounds.train_end == 0) throw SplitError("training split is empty");
    const ScaledColumns data = standardize_by_train(frame, bounds.train_end, config.standardize);

    std::vector<NamedForecaster> methods = forecasters;
    const std::size_t period = config.period.period;
    for (Baseline b : baselines) {
        if (b == Baseline::SeasonalNaive)
            methods.push_back({baseline_method_name(b), [period](std::span<const double> c, std::size_t h) {
                                   return seasonal_naive_forecast(c, period, h);
                               }});
        else
            methods.push_back({baseline_method_name(b), [period](std::span<const double> c, std::size_t h) {
                                   return seasonal_avg_forecast(c, period, h);
                               }});
    }
    if (methods.empty()) throw ConfigError("no forecaster or baseline selected");

    const std::size_t threads = resolve_threads(config.threads);
    EvalReport report;
    for (std::size_t horizon : config.horizons) {
        const auto origins = window_origins(bounds.val_end, bounds.test_end, config.context_length,
                                            horizon, config.stride);
        const auto errors = evaluate_windows(data, origins, config.context_length, horizon, methods,
                                             threads, config.dataset);
        const std::size_t jobs = data.columns.size() * origins.size();
        for (std::size_t m = 0; m < methods.size(); ++m) {
            double se = 0.0, ae = 0.0;
            for (std::size_t j = 0; j < jobs; ++j) {
                se += errors[j * methods.size() + m].squared;
                ae += errors[j * methods.size() + m].absolute;
            }
            const double denom = static_cast<double>(jobs * horizon);
            report.rows.push_back({config.dataset, horizon, methods[m].method, se / denom, ae / denom, jobs});
        }
    }

    nlohmann::json echo = config.metadata;
    echo["context_length"] = config.context_length;
    echo["horizons"] = config.horizons;
    echo["period"] = period;
    echo["period_source"] = std::string(period_source_name(config.period.source));
    echo["r"] = config.r;
    echo["c"] = config.c;
    echo["stride"] = config.stride;
    echo["split"] = {{"train_end", bounds.train_end},
                     {"val_end", bounds.val_end},
                     {"test_end", bounds.test_end}};
    echo["standardize"] = config.standardize;
    echo["train_stats"] = {{"mean", data.mean}, {"std", data.std}};
    echo["variables"] = frame.variable_names();
    if (!echo.contains("resize")) echo["resize"] = kResizeConvention;
    report.config[config.dataset] = std::move(echo);
    return report;
}

double validation_loss(const SeriesFrame& frame, const SplitSpec& split, std::size_t context_length,
                       std::size_t horizon, std::size_t stride, const Forecaster& forecaster,
                       std::size_t threads) {
    const SplitBounds bounds = resolve_split(frame.rows(), split);
    if (bounds.train_end == 0) throw SplitError("training split is empty");
    const ScaledColumns data = standardize_by_train(frame, bounds.train_end, true);
    const auto origins =
        window_origins(bounds.train_end, bounds.val_end, context_length, horizon, stride);
    const auto errors = evaluate_windows(data, origins, context_length, horizon,
                                         {{"candidate", forecaster}}, resolve_threads(threads),
                                         "validation");
    double se = 0.0;
    for (const auto& e : errors) se += e.squared;
    return se / static_cast<double>(errors.size() * horizon);
}

}  // namespace visionts
