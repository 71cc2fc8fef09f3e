#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdlib>
#include <random>

#include "oracles.hpp"
#include "visionts/errors.hpp"
#include "visionts/eval.hpp"
#include "visionts/pipeline.hpp"

using namespace visionts;
using V = std::vector<double>;

namespace {

SeriesFrame periodic_frame(std::size_t rows, std::size_t period, std::size_t variables) {
    std::vector<std::vector<double>> cols(variables, V(rows));
    std::vector<std::string> names;
    for (std::size_t v = 0; v < variables; ++v) {
        names.push_back("v" + std::to_string(v));
        for (std::size_t t = 0; t < rows; ++t)
            cols[v][t] = std::sin(6.283185307179586 * static_cast<double>(t % period) / static_cast<double>(period)) +
                         static_cast<double>(v);
    }
    return SeriesFrame(cols, names);
}

NamedForecaster naive_slot(std::size_t period) {
    return {"visionts", [period](std::span<const double> c, std::size_t h) { return seasonal_naive_forecast(c, period, h); }};
}

}  // namespace

TEST_CASE("mse and mae", "[eval]") {
    CHECK(mse(V{1, 2, 3}, V{1, 2, 3}) == 0.0);
    CHECK(mae(V{1, 2, 3}, V{1, 2, 3}) == 0.0);
    CHECK(mse(V{2, 3, 4}, V{1, 2, 3}) == 1.0);
    CHECK(mae(V{2, 3, 4}, V{1, 2, 3}) == 1.0);
    CHECK(mse(V{0, 0}, V{1, 3}) == 5.0);
    CHECK_THROWS_AS(mse(V{1}, V{1, 2}), MetricError);
    CHECK_THROWS_AS(mae(V{}, V{}), MetricError);
}

TEST_CASE("seasonal naive", "[eval][baseline]") {
    CHECK(seasonal_naive_forecast(V{1, 2, 3, 4}, 2, 3) == V{3, 4, 3});
    CHECK(seasonal_naive_forecast(V{1, 2, 3, 4}, 1, 3) == V{4, 4, 4});
    const V x{5, 1, 2, 5, 1, 2, 5, 1, 2};
    CHECK(seasonal_naive_forecast(x, 3, 6) == V{5, 1, 2, 5, 1, 2});
    CHECK_THROWS_AS(seasonal_naive_forecast(V{1, 2}, 3, 1), BaselineError);
    CHECK_THROWS_AS(seasonal_naive_forecast(V{1, 2}, 0, 1), BaselineError);
}

TEST_CASE("seasonal average", "[eval][baseline]") {
    CHECK(seasonal_avg_forecast(V{1, 2, 3, 4}, 2, 2) == V{2, 3});
    CHECK(seasonal_avg_forecast(V{1, 2, 3}, 3, 4) == seasonal_naive_forecast(V{1, 2, 3}, 3, 4));
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> d(-1, 1);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t P = 1 + rng() % 9, L = 3 * P + rng() % P;
        V x(L);
        for (double& v : x) v = d(rng);
        const auto got = seasonal_avg_forecast(x, P, 2 * P + 1);
        const auto want = oracle::phase_means(x, P, 2 * P + 1);
        for (std::size_t i = 0; i < got.size(); ++i) REQUIRE(got[i] == Catch::Approx(want[i]).margin(1e-12));
    }
    CHECK_THROWS_AS(seasonal_avg_forecast(V{1}, 2, 1), BaselineError);
}

TEST_CASE("normalized mae", "[eval]") {
    CHECK(normalized_mae({{"a", 1.0}, {"b", 2.0}}, {{"a", 1.0}, {"b", 2.0}}) == 1.0);
    CHECK(normalized_mae({{"a", 0.5}, {"b", 2.0}}, {{"a", 1.0}, {"b", 1.0}}) == Catch::Approx(1.0));
    CHECK(normalized_mae({{"a", 2.0}}, {{"a", 8.0}}) == Catch::Approx(0.25));
    CHECK_THROWS_AS(normalized_mae({}, {}), AggregationError);
    CHECK_THROWS_AS(normalized_mae({{"a", 1.0}}, {{"b", 1.0}}), AggregationError);
    CHECK_THROWS_AS(normalized_mae({{"a", 1.0}}, {{"a", 0.0}}), AggregationError);
}

TEST_CASE("periodic data gives zero error for naive forecasts", "[eval][benchmark]") {
    const auto frame = periodic_frame(600, 12, 2);
    BenchmarkConfig cfg;
    cfg.dataset = "synthetic";
    cfg.context_length = 48;
    cfg.horizons = {12, 24};
    cfg.period = {12, PeriodSource::Forced};
    const auto report = run_benchmark(frame, cfg, {naive_slot(12)},
                                      {Baseline::SeasonalNaive, Baseline::SeasonalAvg});
    REQUIRE(report.rows.size() == 2 * 3);
    for (const auto& r : report.rows) {
        CHECK(r.mse == Catch::Approx(0.0).margin(1e-20));
        CHECK(r.mae == Catch::Approx(0.0).margin(1e-10));
    }
}

TEST_CASE("window counts follow the test split and channel independence", "[eval][benchmark]") {
    BenchmarkConfig cfg;
    cfg.context_length = 20;
    cfg.horizons = {5};
    cfg.period = {4, PeriodSource::Forced};
    cfg.split = SplitRatios{0.7, 0.1, 0.2};
    const auto one = run_benchmark(periodic_frame(200, 4, 1), cfg, {}, {Baseline::SeasonalNaive});
    const auto two = run_benchmark(periodic_frame(200, 4, 2), cfg, {}, {Baseline::SeasonalNaive});
    // test split is rows [160, 200): origins 160..195
    CHECK(one.rows[0].window_count == 36);
    CHECK(two.rows[0].window_count == 2 * one.rows[0].window_count);

    cfg.stride = 4;
    const auto strided = run_benchmark(periodic_frame(200, 4, 1), cfg, {}, {Baseline::SeasonalNaive});
    CHECK(strided.rows[0].window_count == 9);
}

TEST_CASE("metrics are averaged over standardised windows", "[eval][benchmark]") {
    // hand-checkable: linear trend, naive P=1 is off by exactly h steps
    V x(100);
    for (std::size_t t = 0; t < x.size(); ++t) x[t] = 2.0 * static_cast<double>(t);
    const SeriesFrame frame({x}, {"trend"});
    BenchmarkConfig cfg;
    cfg.context_length = 10;
    cfg.horizons = {3};
    cfg.period = {1, PeriodSource::Forced};
    cfg.split = parse_split("0..60,60..80,80..100");
    const auto report = run_benchmark(frame, cfg, {}, {Baseline::SeasonalNaive});
    // train std of 2t over t<60 is 2*sqrt((60^2-1)/12)
    const double sd = 2.0 * std::sqrt((60.0 * 60.0 - 1.0) / 12.0);
    const double step = 2.0 / sd;
    CHECK(report.rows[0].mae == Catch::Approx(step * (1 + 2 + 3) / 3.0));
    CHECK(report.rows[0].mse == Catch::Approx(step * step * (1 + 4 + 9) / 3.0));
    CHECK(report.config.at("dataset").at("train_stats").at("std")[0] == Catch::Approx(sd));
}

TEST_CASE("results do not depend on the thread count", "[eval][benchmark]") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> d(0, 1);
    std::vector<std::vector<double>> cols(3, V(400));
    for (auto& c : cols)
        for (double& v : c) v = d(rng);
    const SeriesFrame frame(cols, {"a", "b", "c"});
    BenchmarkConfig cfg;
    cfg.context_length = 48;
    cfg.horizons = {24};
    cfg.period = {12, PeriodSource::Forced};
    const RowMeanReconstructor stub;
    const NamedForecaster vt{"visionts", [&](std::span<const double> c, std::size_t h) {
                                 return forecast(c, {c.size(), h, 12, 0.4, 0.4}, stub);
                             }};
    cfg.threads = 1;
    const auto serial = run_benchmark(frame, cfg, {vt}, {Baseline::SeasonalAvg}).dump();
    cfg.threads = 4;
    const auto parallel = run_benchmark(frame, cfg, {vt}, {Baseline::SeasonalAvg}).dump();
    CHECK(serial == parallel);
}

TEST_CASE("window errors carry their coordinates", "[eval][benchmark]") {
    BenchmarkConfig cfg;
    cfg.dataset = "tiny";
    cfg.context_length = 6;
    cfg.horizons = {2};
    cfg.period = {8, PeriodSource::Forced};
    try {
        run_benchmark(periodic_frame(100, 4, 1), cfg, {}, {Baseline::SeasonalNaive});
        FAIL("expected BaselineError");
    } catch (const BaselineError& e) {
        CHECK_THAT(std::string(e.what()), Catch::Matchers::ContainsSubstring("dataset tiny") &&
                                              Catch::Matchers::ContainsSubstring("origin"));
    }
    cfg.period = {2, PeriodSource::Forced};
    CHECK_THROWS_AS(run_benchmark(periodic_frame(100, 4, 1), cfg, {}, {}), ConfigError);
}

TEST_CASE("report json is stable and complete", "[eval][report]") {
    EvalReport a;
    a.rows = {{"x", 192, "seasonal_naive", 2.0, 1.0, 3}, {"x", 96, "seasonal_naive", 1.0, 0.5, 4},
              {"x", 96, "visionts", 0.5, 0.25, 4}, {"x", 192, "visionts", 1.0, 0.5, 3}};
    a.config["x"] = {{"period", 24}};
    EvalReport b;
    b.rows = {{"y", 96, "seasonal_naive", 1.0, 2.0, 1}, {"y", 96, "visionts", 1.0, 2.0, 1}};
    a.merge(b);
    const auto doc = a.to_json();
    CHECK(doc.at("rows")[0].at("horizon") == 96);
    CHECK(doc.at("rows")[0].at("method") == "seasonal_naive");
    CHECK(doc.at("rows").size() == 6);
    CHECK(doc.at("averages").size() == 4);
    // visionts: x ratio 0.375/0.75 = 0.5, y ratio 1 -> sqrt(0.5)
    CHECK(doc.at("normalized_mae").at("methods").at("visionts") == Catch::Approx(std::sqrt(0.5)));
    CHECK(doc.at("config").at("x").at("period") == 24);
    CHECK(a.dump() == EvalReport::from_json(nlohmann::json::parse(a.dump())).dump());
}

TEST_CASE("thread cap from the environment", "[eval]") {
    ::setenv("VISIONTS_THREADS", "2", 1);
    CHECK(thread_cap_from_env() == 2);
    CHECK(resolve_threads(8) == 2);
    ::setenv("VISIONTS_THREADS", "junk", 1);
    CHECK(thread_cap_from_env() == 0);
    ::unsetenv("VISIONTS_THREADS");
    CHECK(resolve_threads(3) == 3);
}

TEST_CASE("validation loss picks the true period", "[eval][periodicity]") {
    const auto frame = periodic_frame(2000, 24, 1);
    const RowMeanReconstructor stub;
    const auto choice = select_period({24, 168, 1}, [&](std::size_t p) {
        return validation_loss(frame, SplitRatios{}, 336, 24, 7, [&](std::span<const double> c, std::size_t h) {
            return forecast(c, {c.size(), h, p, 0.4, 0.4}, stub);
        });
    });
    CHECK(choice.period == 24);
}
