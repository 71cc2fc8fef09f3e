// visionts command-line front end. Talks to the engine only through the C API.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "visionts/visionts.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitLoad = 2;
constexpr int kExitDomain = 3;

struct FrameDeleter {
    void operator()(vts_frame* f) const { vts_frame_free(f); }
};
struct ModelDeleter {
    void operator()(vts_model* m) const { vts_model_free(m); }
};
using FramePtr = std::unique_ptr<vts_frame, FrameDeleter>;
using ModelPtr = std::unique_ptr<vts_model, ModelDeleter>;

struct CliFailure {
    int code;
};

int exit_code_for(vts_status status) {
    switch (status) {
        case VTS_OK: return kExitOk;
        case VTS_ERR_ARGUMENT:
        case VTS_ERR_CONFIG: return kExitUsage;
        case VTS_ERR_LOAD:
        case VTS_ERR_INGESTION:
        case VTS_ERR_IO: return kExitLoad;
        default: return kExitDomain;
    }
}

void check(vts_status status) {
    if (status == VTS_OK) return;
    std::cerr << "visionts: " << vts_status_module(status) << ": " << vts_last_error() << "\n";
    throw CliFailure{exit_code_for(status)};
}

[[noreturn]] void usage_error(const std::string& message) {
    std::cerr << "visionts: cli: ConfigError: " << message << "\n";
    throw CliFailure{kExitUsage};
}

struct RunConfig {
    std::string weights;
    bool stub = false;
    std::vector<std::string> data;
    std::string dataset;
    std::string freq;
    std::size_t context_length = 0;
    std::vector<std::size_t> horizons;
    std::string period = "auto";
    double r = 0.4;
    double c = 0.4;
    std::string split;
    std::size_t stride = 1;
    std::size_t selection_stride = 0;
    std::string out;
    std::vector<std::string> baselines;
    std::string report;
    std::size_t threads = 0;
    std::size_t variable = 0;
    std::optional<std::size_t> origin;
    std::uint64_t seed = 0;
};

void validate(const RunConfig& cfg) {
    if (!(cfg.r > 0.0 && cfg.r <= 1.0)) usage_error("--r must lie in (0, 1]");
    if (!(cfg.c > 0.0 && cfg.c <= 1.0)) usage_error("--c must lie in (0, 1]");
    for (std::size_t h : cfg.horizons)
        if (h == 0) usage_error("horizons must be >= 1");
    if (cfg.stride == 0) usage_error("--stride must be >= 1");
}

/// 0 means AUTO.
std::size_t parse_period(const std::string& text) {
    if (text == "auto" || text == "AUTO") return 0;
    std::size_t value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size() || value == 0)
        usage_error("--period must be a positive integer or 'auto'");
    return value;
}

std::string dataset_label(const RunConfig& cfg, const std::string& path) {
    if (!cfg.dataset.empty() && cfg.data.size() == 1) return cfg.dataset;
    return std::filesystem::path(path).stem().string();
}

std::optional<vts_dataset_preset> preset_for(const std::string& name) {
    vts_dataset_preset preset{};
    if (vts_find_dataset_preset(name.c_str(), &preset) == VTS_OK) return preset;
    return std::nullopt;
}

FramePtr load_frame(const RunConfig& cfg, const std::string& path) {
    vts_frame* frame = nullptr;
    check(vts_frame_load_csv(path.c_str(), cfg.freq.empty() ? nullptr : cfg.freq.c_str(), &frame));
    return FramePtr(frame);
}

/// Loaded model, or null for the row-mean stand-in (`--stub`).
ModelPtr load_model(const RunConfig& cfg, bool required) {
    if (cfg.stub) return nullptr;
    if (cfg.weights.empty()) {
        if (required) usage_error("--weights is required (or --stub)");
        return nullptr;
    }
    vts_model* model = nullptr;
    check(vts_model_load(cfg.weights.c_str(), &model));
    return ModelPtr(model);
}

std::size_t resolve_context(const RunConfig& cfg, const std::optional<vts_dataset_preset>& preset) {
    if (cfg.context_length) return cfg.context_length;
    if (preset && preset->context_length) return preset->context_length;
    usage_error("--context-length is required for this dataset");
}

std::string format_value(double v) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ec == std::errc() ? end : buf);
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (path.empty() || path == "-") return;
        file_.open(path, std::ios::binary);
        if (!file_) {
            std::cerr << "visionts: io: IoError: cannot write '" << path << "'\n";
            throw CliFailure{kExitLoad};
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

// Period for a plain forecast: forced, else the dataset preset, else the
// first entry of the frequency table.
std::size_t forecast_period(const RunConfig& cfg, const vts_frame* frame,
                            const std::optional<vts_dataset_preset>& preset) {
    if (const std::size_t p = parse_period(cfg.period)) return p;
    if (preset) return preset->period;
    std::size_t first = 1, count = 0;
    check(vts_candidate_periods(vts_frame_frequency(frame), &first, 1, &count));
    return first;
}

int cmd_forecast(const RunConfig& cfg) {
    if (cfg.data.size() != 1) usage_error("forecast takes exactly one --data file");
    if (cfg.horizons.size() != 1) usage_error("forecast takes exactly one horizon");
    ModelPtr model = load_model(cfg, true);
    FramePtr frame = load_frame(cfg, cfg.data[0]);
    const auto preset = preset_for(dataset_label(cfg, cfg.data[0]));
    vts_forecast_params params{};
    params.context_length = resolve_context(cfg, preset);
    params.horizon = cfg.horizons[0];
    params.period = forecast_period(cfg, frame.get(), preset);
    params.r = cfg.r;
    params.c = cfg.c;

    const std::size_t rows = vts_frame_rows(frame.get());
    if (rows < params.context_length) {
        std::cerr << "visionts: series_core: WindowError: " << rows << " rows, context length "
                  << params.context_length << "\n";
        throw CliFailure{kExitDomain};
    }
    std::vector<std::string> lines;
    std::vector<double> out(params.horizon);
    for (std::size_t v = 0; v < vts_frame_variables(frame.get()); ++v) {
        const double* column = nullptr;
        check(vts_frame_column(frame.get(), v, &column));
        check(vts_forecast(model.get(), column + rows - params.context_length, params.context_length,
                           &params, out.data()));
        std::string line = vts_frame_variable_name(frame.get(), v);
        for (double x : out) line += "," + format_value(x);
        lines.push_back(std::move(line));
    }
    Output output(cfg.out);
    for (const auto& line : lines) output.stream() << line << "\n";
    return kExitOk;
}

int baseline_flags(const std::vector<std::string>& names) {
    int flags = 0;
    for (const auto& name : names) {
        if (name == "seasonal_naive") flags |= VTS_BASELINE_SEASONAL_NAIVE;
        else if (name == "seasonal_avg") flags |= VTS_BASELINE_SEASONAL_AVG;
        else if (name == "all") flags |= VTS_BASELINE_SEASONAL_NAIVE | VTS_BASELINE_SEASONAL_AVG;
        else if (name != "none") usage_error("unknown baseline '" + name + "'");
    }
    return flags;
}

int cmd_benchmark(const RunConfig& cfg, const std::string& config_echo) {
    if (cfg.data.empty()) usage_error("--data is required");
    ModelPtr model = load_model(cfg, false);
    const int baselines = baseline_flags(cfg.baselines);
    const bool run_model = cfg.stub || model;
    if (!run_model && !baselines) usage_error("nothing to evaluate: pass --weights, --stub or --baselines");
    const std::vector<std::size_t> horizons =
        cfg.horizons.empty() ? std::vector<std::size_t>{96, 192, 336, 720} : cfg.horizons;

    std::string merged;
    for (const auto& path : cfg.data) {
        FramePtr frame = load_frame(cfg, path);
        const std::string label = dataset_label(cfg, path);
        const auto preset = preset_for(label);
        vts_benchmark_params params{};
        params.dataset = label.c_str();
        params.split = cfg.split.empty() ? nullptr : cfg.split.c_str();
        params.context_length = resolve_context(cfg, preset);
        params.horizons = horizons.data();
        params.horizon_count = horizons.size();
        params.period = parse_period(cfg.period);
        params.r = cfg.r;
        params.c = cfg.c;
        params.stride = cfg.stride;
        params.selection_stride = cfg.selection_stride;
        params.baselines = baselines;
        params.run_model = run_model ? 1 : 0;
        params.threads = cfg.threads;
        params.config_echo = config_echo.c_str();
        char* json = nullptr;
        check(vts_benchmark(model.get(), frame.get(), &params, &json));
        std::string report(json);
        vts_string_free(json);
        if (merged.empty()) {
            merged = std::move(report);
        } else {
            char* combined = nullptr;
            check(vts_report_merge(merged.c_str(), report.c_str(), &combined));
            merged = combined;
            vts_string_free(combined);
        }
    }
    Output output(cfg.report.empty() ? cfg.out : cfg.report);
    output.stream() << merged;
    return kExitOk;
}

int cmd_inspect(const RunConfig& cfg) {
    if (cfg.data.size() != 1) usage_error("inspect takes exactly one --data file");
    if (cfg.horizons.size() != 1) usage_error("inspect takes exactly one horizon");
    ModelPtr model = load_model(cfg, true);
    FramePtr frame = load_frame(cfg, cfg.data[0]);
    const std::string label = dataset_label(cfg, cfg.data[0]);
    const auto preset = preset_for(label);
    vts_forecast_params params{};
    params.context_length = resolve_context(cfg, preset);
    params.horizon = cfg.horizons[0];
    params.period = forecast_period(cfg, frame.get(), preset);
    params.r = cfg.r;
    params.c = cfg.c;
    const std::size_t rows = vts_frame_rows(frame.get());
    const std::size_t origin =
        cfg.origin ? *cfg.origin : (rows >= params.horizon ? rows - params.horizon : 0);

    const std::filesystem::path dir = cfg.out.empty() ? "." : cfg.out;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const std::string prefix = (dir / (label + "_v" + std::to_string(cfg.variable) + "_t" +
                                       std::to_string(origin) + "_"))
                                   .string();
    check(vts_inspect(model.get(), frame.get(), cfg.variable, origin, &params, prefix.c_str()));
    for (const char* part : {"input", "visible", "mask", "reconstructed"})
        std::cout << prefix << part << ".pgm\n";
    return kExitOk;
}

int cmd_fixture(const RunConfig& cfg) {
    if (cfg.out.empty()) usage_error("--out is required");
    check(vts_write_fixture(cfg.out.c_str(), cfg.seed));
    return kExitOk;
}

// Flags actually used for the run, echoed into benchmark reports.
std::string echo_config(const RunConfig& cfg) {
    std::string json = "{\"cli\":{";
    auto quote = [](const std::string& s) {
        std::string out = "\"";
        for (char ch : s) {
            if (ch == '"' || ch == '\\') out += '\\';
            out += ch;
        }
        return out + "\"";
    };
    json += "\"weights\":" + quote(cfg.stub ? "stub" : cfg.weights);
    json += ",\"period\":" + quote(cfg.period);
    json += ",\"split\":" + quote(cfg.split);
    json += ",\"freq\":" + quote(cfg.freq);
    json += "}}";
    return json;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"VisionTS zero-shot forecasting"};
    app.set_config("--config", "", "key = value file; command-line flags take precedence");
    app.require_subcommand(1);

    RunConfig cfg;
    app.add_option("--weights", cfg.weights, "tensor archive with MAE weights");
    app.add_flag("--stub", cfg.stub, "use the row-mean stand-in instead of a model");
    app.add_option("--data", cfg.data, "CSV file(s)")->delimiter(',');
    app.add_option("--dataset", cfg.dataset, "dataset label (defaults to the file stem)");
    app.add_option("--freq", cfg.freq, "sampling frequency, e.g. H, 15T");
    app.add_option("--context-length", cfg.context_length, "context length L");
    app.add_option("--horizons", cfg.horizons, "horizon(s) H, comma separated")->delimiter(',');
    app.add_option("--period", cfg.period, "period P or 'auto'");
    app.add_option("--r", cfg.r, "normalisation scale r in (0,1]");
    app.add_option("--c", cfg.c, "visible fraction c in (0,1]");
    app.add_option("--split", cfg.split, "e.g. 0.7,0.1,0.2 or 8640,2880,2880");
    app.add_option("--stride", cfg.stride, "window stride");
    app.add_option("--selection-stride", cfg.selection_stride, "validation stride for period selection");
    app.add_option("--out", cfg.out, "output file or directory");
    app.add_option("--baselines", cfg.baselines, "seasonal_naive,seasonal_avg | all | none")->delimiter(',');
    app.add_option("--report", cfg.report, "benchmark report path");
    app.add_option("--threads", cfg.threads, "worker threads (0 = auto)");
    app.add_option("--variable", cfg.variable, "variable index for inspect");
    app.add_option("--origin", cfg.origin, "first target row for inspect");
    app.add_option("--seed", cfg.seed, "fixture seed");

    auto* forecast = app.add_subcommand("forecast", "forecast the rows after the data");
    auto* benchmark = app.add_subcommand("benchmark", "evaluate on the test split");
    auto* inspect = app.add_subcommand("inspect", "dump one window's images as PGM");
    auto* fixture = app.add_subcommand("fixture", "write a small random-weight archive");
    for (auto* sub : {forecast, benchmark, inspect, fixture}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        validate(cfg);
        if (*forecast) return cmd_forecast(cfg);
        if (*benchmark) return cmd_benchmark(cfg, echo_config(cfg));
        if (*inspect) return cmd_inspect(cfg);
        return cmd_fixture(cfg);
    } catch (const CliFailure& f) {
        return f.code;
    }
}
