#include "visionts/visionts.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "visionts/errors.hpp"
#include "visionts/eval.hpp"
#include "visionts/fixture.hpp"
#include "visionts/periodicity.hpp"
#include "visionts/pgm.hpp"
#include "visionts/pipeline.hpp"
#include "visionts/series.hpp"

struct vts_frame {
    visionts::SeriesFrame frame;
    std::string frequency;
};

struct vts_model {
    visionts::MaeModel model;
};

namespace {

using namespace visionts;

thread_local std::string g_last_error;

vts_status status_of(ErrorKind kind) {
    return static_cast<vts_status>(VTS_ERR_INGESTION + static_cast<int>(kind));
}

vts_status fail(vts_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

template <typename Fn>
vts_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return VTS_OK;
    } catch (const Error& e) {
        return fail(status_of(e.kind()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(VTS_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(VTS_ERR_INTERNAL, e.what());
    }
}

char* copy_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

std::string format_split(const SplitSpec& spec) {
    std::ostringstream out;
    if (const auto* r = std::get_if<SplitRatios>(&spec)) {
        out << r->train << ',' << r->val << ',' << r->test;
    } else {
        const auto& b = std::get<SplitBounds>(spec);
        out << "0.." << b.train_end << ',' << b.train_end << ".." << b.val_end << ',' << b.val_end
            << ".." << b.test_end;
    }
    return out.str();
}

ForecastSettings settings_from(const vts_forecast_params& p) {
    ForecastSettings s;
    s.context_length = p.context_length;
    s.horizon = p.horizon;
    s.period = p.period;
    s.r = p.r == 0.0 ? 0.4 : p.r;
    s.c = p.c == 0.0 ? 0.4 : p.c;
    return s;
}

std::unique_ptr<Reconstructor> make_reconstructor(const vts_model* model) {
    if (model) return std::make_unique<MaeReconstructor>(model->model);
    return std::make_unique<RowMeanReconstructor>();
}

std::string label_of(const vts_benchmark_params& p) {
    return p.dataset && *p.dataset ? p.dataset : "dataset";
}

SplitSpec split_of(const vts_benchmark_params& p) {
    if (p.split && *p.split) return parse_split(p.split);
    if (const auto preset = find_dataset_preset(label_of(p))) return preset->split;
    return SplitRatios{};
}

FrequencyTag frequency_of(const vts_frame& frame, const vts_benchmark_params& p) {
    FrequencyTag freq = frame.frame.frequency();
    if (freq.unit == FrequencyUnit::OTHER)
        if (const auto preset = find_dataset_preset(label_of(p))) freq = preset->frequency;
    return freq;
}

void check_benchmark_params(const vts_benchmark_params* p) {
    if (!p) throw ConfigError("benchmark parameters are required");
    if (p->horizon_count == 0 || !p->horizons) throw ConfigError("at least one horizon is required");
    if (p->context_length == 0) throw ConfigError("context length must be >= 1");
}

Forecaster model_forecaster(const Reconstructor& rec, const vts_benchmark_params& p, std::size_t period) {
    const double r = p.r == 0.0 ? 0.4 : p.r;
    const double c = p.c == 0.0 ? 0.4 : p.c;
    return [&rec, period, r, c](std::span<const double> context, std::size_t horizon) {
        ForecastSettings s{context.size(), horizon, period, r, c};
        return forecast(context, s, rec);
    };
}

PeriodChoice choose_period(const vts_model* model, const vts_frame& frame, const vts_benchmark_params& p) {
    if (p.period != 0) return {p.period, PeriodSource::Forced};
    const auto rec = make_reconstructor(p.run_model ? model : nullptr);
    const SplitSpec split = split_of(p);
    const SplitBounds bounds = resolve_split(frame.frame.rows(), split);
    std::size_t horizon = p.horizons[0];
    for (std::size_t i = 1; i < p.horizon_count; ++i) horizon = std::min(horizon, p.horizons[i]);
    std::size_t stride = p.selection_stride;
    if (stride == 0) {
        const std::size_t first = std::max(bounds.train_end, p.context_length);
        const std::size_t span = bounds.val_end >= first + horizon ? bounds.val_end - first - horizon + 1 : 1;
        stride = std::max<std::size_t>(1, span / 32);
    }
    return select_period(candidate_periods(frequency_of(frame, p)), [&](std::size_t period) {
        return validation_loss(frame.frame, split, p.context_length, horizon, stride,
                               model_forecaster(*rec, p, period), p.threads);
    });
}

}  // namespace

extern "C" {

const char* vts_status_name(vts_status status) {
    switch (status) {
        case VTS_OK: return "OK";
        case VTS_ERR_ARGUMENT: return "ArgumentError";
        case VTS_ERR_INTERNAL: return "InternalError";
        default: break;
    }
    if (status > VTS_ERR_ARGUMENT && status < VTS_ERR_INTERNAL)
        return error_kind_name(static_cast<ErrorKind>(status - VTS_ERR_INGESTION)).data();
    return "UnknownError";
}

const char* vts_status_module(vts_status status) {
    switch (status) {
        case VTS_ERR_INGESTION:
        case VTS_ERR_SPLIT:
        case VTS_ERR_WINDOW: return "series_core";
        case VTS_ERR_SELECTION: return "periodicity";
        case VTS_ERR_SEGMENT:
        case VTS_ERR_CAPACITY:
        case VTS_ERR_SHAPE: return "imaging";
        case VTS_ERR_LOAD:
        case VTS_ERR_NUMERICS: return "mae_infer";
        case VTS_ERR_METRIC:
        case VTS_ERR_BASELINE:
        case VTS_ERR_AGGREGATION: return "eval";
        case VTS_ERR_CONFIG:
        case VTS_ERR_ARGUMENT: return "cli";
        case VTS_ERR_IO: return "io";
        default: return "core";
    }
}

const char* vts_last_error(void) { return g_last_error.c_str(); }

void vts_string_free(char* s) { std::free(s); }

vts_status vts_frame_load_csv(const char* path, const char* frequency, vts_frame** out) {
    if (!path || !out) return fail(VTS_ERR_ARGUMENT, "path and out are required");
    *out = nullptr;
    return guarded([&] {
        IngestionOptions options;
        if (frequency && *frequency) options.frequency = parse_frequency(frequency);
        SeriesFrame frame = parse_csv(path, options);
        std::string tag = format_frequency(frame.frequency());
        *out = new vts_frame{std::move(frame), std::move(tag)};
    });
}

void vts_frame_free(vts_frame* frame) { delete frame; }

size_t vts_frame_rows(const vts_frame* frame) { return frame ? frame->frame.rows() : 0; }

size_t vts_frame_variables(const vts_frame* frame) { return frame ? frame->frame.variables() : 0; }

const char* vts_frame_variable_name(const vts_frame* frame, size_t variable) {
    if (!frame || variable >= frame->frame.variables()) return nullptr;
    return frame->frame.variable_names()[variable].c_str();
}

const char* vts_frame_frequency(const vts_frame* frame) { return frame ? frame->frequency.c_str() : ""; }

vts_status vts_frame_column(const vts_frame* frame, size_t variable, const double** data) {
    if (!frame || !data) return fail(VTS_ERR_ARGUMENT, "frame and data are required");
    return guarded([&] { *data = frame->frame.column(variable).data(); });
}

vts_status vts_candidate_periods(const char* frequency, size_t* out, size_t capacity, size_t* count) {
    if (!frequency || !count) return fail(VTS_ERR_ARGUMENT, "frequency and count are required");
    return guarded([&] {
        const auto periods = candidate_periods(parse_frequency(frequency));
        *count = periods.size();
        for (std::size_t i = 0; i < periods.size() && i < capacity && out; ++i) out[i] = periods[i];
    });
}

vts_status vts_find_dataset_preset(const char* name, vts_dataset_preset* out) {
    if (!name || !out) return fail(VTS_ERR_ARGUMENT, "name and out are required");
    return guarded([&] {
        const auto preset = find_dataset_preset(name);
        if (!preset) throw ConfigError(std::string("no preset for dataset '") + name + "'");
        *out = {};
        out->period = preset->period;
        out->context_length = preset->context_length;
        out->r = preset->r;
        out->c = preset->c;
        const std::string freq = format_frequency(preset->frequency);
        const std::string split = format_split(preset->split);
        std::snprintf(out->frequency, sizeof out->frequency, "%s", freq.c_str());
        std::snprintf(out->split, sizeof out->split, "%s", split.c_str());
    });
}

vts_status vts_model_load(const char* path, vts_model** out) {
    if (!path || !out) return fail(VTS_ERR_ARGUMENT, "path and out are required");
    *out = nullptr;
    return guarded([&] { *out = new vts_model{MaeModel::load(path)}; });
}

void vts_model_free(vts_model* model) { delete model; }

vts_status vts_model_get_info(const vts_model* model, vts_model_info* out) {
    if (!model || !out) return fail(VTS_ERR_ARGUMENT, "model and out are required");
    const MaeManifest& m = model->model.manifest();
    *out = {m.encoder_dim, m.encoder_depth, m.encoder_heads, m.decoder_dim, m.decoder_depth,
            m.decoder_heads, m.patch_size, m.grid_side, model->model.parameter_count()};
    g_last_error.clear();
    return VTS_OK;
}

vts_status vts_write_fixture(const char* path, uint64_t seed) {
    if (!path) return fail(VTS_ERR_ARGUMENT, "path is required");
    return guarded([&] { write_random_fixture(path, seed); });
}

vts_status vts_forecast(const vts_model* model, const double* context, size_t context_length,
                        const vts_forecast_params* params, double* out) {
    if (!context || !params || !out) return fail(VTS_ERR_ARGUMENT, "context, params and out are required");
    return guarded([&] {
        const auto rec = make_reconstructor(model);
        const auto result = forecast({context, context_length}, settings_from(*params), *rec);
        std::copy(result.begin(), result.end(), out);
    });
}

vts_status vts_select_period(const vts_model* model, const vts_frame* frame,
                             const vts_benchmark_params* params, size_t* period, const char** source) {
    if (!frame || !period) return fail(VTS_ERR_ARGUMENT, "frame and period are required");
    return guarded([&] {
        check_benchmark_params(params);
        const PeriodChoice choice = choose_period(model, *frame, *params);
        *period = choice.period;
        if (source) *source = period_source_name(choice.source).data();
    });
}

vts_status vts_benchmark(const vts_model* model, const vts_frame* frame,
                         const vts_benchmark_params* params, char** report_json) {
    if (!frame || !report_json) return fail(VTS_ERR_ARGUMENT, "frame and report_json are required");
    *report_json = nullptr;
    return guarded([&] {
        check_benchmark_params(params);
        const vts_benchmark_params& p = *params;
        BenchmarkConfig config;
        config.dataset = label_of(p);
        config.context_length = p.context_length;
        config.horizons.assign(p.horizons, p.horizons + p.horizon_count);
        config.r = p.r == 0.0 ? 0.4 : p.r;
        config.c = p.c == 0.0 ? 0.4 : p.c;
        config.split = split_of(p);
        config.stride = p.stride == 0 ? 1 : p.stride;
        config.threads = p.threads;
        if (p.config_echo && *p.config_echo) {
            try {
                config.metadata = nlohmann::json::parse(p.config_echo);
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError(std::string("config echo is not JSON: ") + e.what());
            }
            if (!config.metadata.is_object()) throw ConfigError("config echo must be a JSON object");
        }
        config.period = choose_period(model, *frame, p);

        std::vector<NamedForecaster> forecasters;
        const auto rec = make_reconstructor(model);
        if (p.run_model) {
            forecasters.push_back({model ? "visionts" : "visionts_rowmean",
                                   model_forecaster(*rec, p, config.period.period)});
            config.metadata["reconstructor"] = rec->name();
            if (model) {
                const MaeManifest& m = model->model.manifest();
                config.metadata["pixel_targets"] = m.pixel_targets;
                config.metadata["parameter_count"] = model->model.parameter_count();
            }
        }
        std::vector<Baseline> baselines;
        if (p.baselines & VTS_BASELINE_SEASONAL_NAIVE) baselines.push_back(Baseline::SeasonalNaive);
        if (p.baselines & VTS_BASELINE_SEASONAL_AVG) baselines.push_back(Baseline::SeasonalAvg);
        const EvalReport report = run_benchmark(frame->frame, config, forecasters, baselines);
        *report_json = copy_string(report.dump());
    });
}

vts_status vts_report_merge(const char* a, const char* b, char** out) {
    if (!a || !b || !out) return fail(VTS_ERR_ARGUMENT, "a, b and out are required");
    *out = nullptr;
    return guarded([&] {
        EvalReport left, right;
        try {
            left = EvalReport::from_json(nlohmann::json::parse(a));
            right = EvalReport::from_json(nlohmann::json::parse(b));
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("report is not JSON: ") + e.what());
        }
        left.merge(right);
        *out = copy_string(left.dump());
    });
}

vts_status vts_inspect(const vts_model* model, const vts_frame* frame, size_t variable, size_t origin,
                       const vts_forecast_params* params, const char* prefix) {
    if (!frame || !params || !prefix) return fail(VTS_ERR_ARGUMENT, "frame, params and prefix are required");
    return guarded([&] {
        const ForecastSettings settings = settings_from(*params);
        const std::size_t rows = frame->frame.rows();
        if (variable >= frame->frame.variables())
            throw WindowError("variable " + std::to_string(variable) + " out of range (" +
                              std::to_string(frame->frame.variables()) + " variables)");
        if (origin < settings.context_length || origin > rows || rows - origin < settings.horizon)
            throw WindowError("window at origin " + std::to_string(origin) + " with L=" +
                              std::to_string(settings.context_length) + ", H=" +
                              std::to_string(settings.horizon) + " does not fit " +
                              std::to_string(rows) + " rows");
        const auto column = frame->frame.column(variable);
        const auto rec = make_reconstructor(model);
        ForecastTrace trace;
        forecast(column.subspan(origin - settings.context_length, settings.context_length), settings,
                 *rec, &trace);
        const std::string base = prefix;
        write_pgm(base + "input.pgm", trace.normalized);
        write_pgm(base + "visible.pgm", trace.visible);
        write_pgm(base + "mask.pgm", trace.canvas);
        write_pgm(base + "reconstructed.pgm", trace.reconstructed);
    });
}

}  // extern "C"
