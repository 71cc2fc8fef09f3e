#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "visionts/errors.hpp"
#include "visionts/imaging.hpp"

using namespace visionts;
using Catch::Approx;

TEST_CASE("segment keeps the most recent whole periods", "[imaging][segment]") {
    std::vector<double> x(10);
    std::iota(x.begin(), x.end(), 1.0);
    const auto g = segment(x, 3);
    REQUIRE(g.rows() == 3);
    REQUIRE(g.cols() == 3);
    CHECK(g(0, 0) == 2.0);
    CHECK(g(2, 0) == 4.0);
    CHECK(g(0, 1) == 5.0);
    CHECK(g(2, 2) == 10.0);

    const auto one = segment(std::vector<double>{1, 2, 3, 4, 5, 6}, 1);
    CHECK(one.rows() == 1);
    CHECK(one.cols() == 6);

    const auto etth1 = segment(std::vector<double>(2880, 0.0), 24);
    CHECK(etth1.rows() == 24);
    CHECK(etth1.cols() == 120);

    CHECK_THROWS_AS(segment(std::vector<double>{1, 2}, 3), SegmentError);
    CHECK_THROWS_AS(segment(std::vector<double>{1, 2}, 0), SegmentError);
}

TEST_CASE("column-major flatten of the segment is the retained tail", "[imaging][segment][property]") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t P = 1 + rng() % 12, L = P + rng() % 60;
        std::vector<double> x(L);
        for (double& v : x) v = static_cast<double>(rng() % 1000);
        const auto g = segment(x, P);
        const std::size_t m = L / P;
        REQUIRE(g.cols() == m);
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t i = 0; i < P; ++i) REQUIRE(g(i, j) == x[L - m * P + j * P + i]);
    }
}

TEST_CASE("normalize hand example", "[imaging][normalize]") {
    const Grid<double> raw(2, 2, std::vector<double>{1, 2, 3, 4});
    const auto n = normalize(raw, 0.4);
    CHECK(n.stats.mean == 2.5);
    CHECK(n.stats.std == Approx(std::sqrt(1.25)));
    CHECK(n.image(0, 0) == Approx(-0.5367).margin(1e-4));
    CHECK(n.image(0, 1) == Approx(-0.1789).margin(1e-4));
    CHECK(n.image(1, 0) == Approx(0.1789).margin(1e-4));
    CHECK(n.image(1, 1) == Approx(0.5367).margin(1e-4));
    CHECK(denormalize(0.5367, n.stats, 0.4) == Approx(4.0).margin(1e-3));
}

TEST_CASE("constant matrix normalises to zeros", "[imaging][normalize]") {
    const auto n = normalize(Grid<double>(2, 2, 5.0), 0.4);
    CHECK(n.stats.mean == 5.0);
    CHECK(n.stats.std == 1.0);
    for (float v : n.image.values()) CHECK(v == 0.0f);
    const auto back = denormalize(Grid<float>(2, 3, 0.0f), NormStats{2.5, 1.0}, 0.4);
    for (double v : back.values()) CHECK(v == 2.5);
}

TEST_CASE("normalised statistics and inverse", "[imaging][normalize][property]") {
    std::mt19937_64 rng(8);
    std::normal_distribution<double> d(50.0, 20.0);
    for (double r : {0.4, 1.0, 0.05}) {
        Grid<double> raw(7, 11);
        for (double& v : raw.values()) v = d(rng);
        const auto n = normalize(raw, r);
        double mean = 0.0, sq = 0.0;
        for (float v : n.image.values()) mean += v;
        mean /= static_cast<double>(n.image.size());
        for (float v : n.image.values()) sq += (v - mean) * (v - mean);
        const double sd = std::sqrt(sq / static_cast<double>(n.image.size()));
        CHECK(std::abs(mean) < 1e-6);
        CHECK(sd == Approx(r).epsilon(1e-6));
        const auto back = denormalize(n.image, n.stats, r);
        for (std::size_t i = 0; i < raw.size(); ++i)
            CHECK(back.values()[i] == Approx(raw.values()[i]).epsilon(1e-6));
    }
}

TEST_CASE("visible column count", "[imaging][plan]") {
    CHECK(visible_columns(2880, 96, 0.4, 14) == 5);
    CHECK(visible_columns(104, 24, 0.4, 14) == 4);
    CHECK(visible_columns(96, 96, 1.0, 14) == 7);
    CHECK(visible_columns(1, 1000, 0.4, 14) == 1);
}

TEST_CASE("ETTh1 plan geometry", "[imaging][plan]") {
    const auto plan = make_plan(2880, 96, 24, 0.4, 0.4);
    CHECK(plan.periods == 120);
    CHECK(plan.visible_cols == 5);
    CHECK(plan.visible_width() == 80);
    CHECK(plan.output_periods() == 336);
    CHECK(plan.capacity() == 5184);
}

TEST_CASE("plan validation", "[imaging][plan]") {
    CHECK_THROWS_AS(make_plan(10, 5, 11, 0.4, 0.4), SegmentError);
    CHECK_THROWS_AS(make_plan(10, 5, 0, 0.4, 0.4), SegmentError);
    CHECK_THROWS_AS(make_plan(10, 5, 2, 0.0, 0.4), ConfigError);
    CHECK_THROWS_AS(make_plan(10, 5, 2, 0.4, 1.5), ConfigError);
    CHECK_THROWS_AS(make_plan(10, 5, 2, 0.4, 0.4, 14, 15), ShapeError);
}

TEST_CASE("align produces the visible image and mask", "[imaging][align]") {
    const auto plan = make_plan(2880, 96, 24, 0.4, 0.4);
    std::vector<double> x(2880);
    for (std::size_t t = 0; t < x.size(); ++t) x[t] = std::sin(0.3 * static_cast<double>(t));
    const auto n = normalize(segment(x, 24), 0.4);
    const auto a = align(n.image, plan);
    CHECK(a.visible.rows() == 224);
    CHECK(a.visible.cols() == 80);
    CHECK(a.mask.visible_count() == 70);
    CHECK(a.mask.masked_count() == 126);
    CHECK(a.mask.visible(3, 4));
    CHECK_FALSE(a.mask.visible(3, 5));

    const auto canvas = compose_canvas(a.visible, plan);
    CHECK(canvas.rows() == 224);
    CHECK(canvas.cols() == 224);
    CHECK(canvas(100, 79) == a.visible(100, 79));
    CHECK(canvas(100, 80) == 0.0f);
}

TEST_CASE("align is an identity when no resize is needed", "[imaging][align]") {
    // P = 224 rows and m = n*S columns
    const auto plan = make_plan(224 * 80, 224, 224, 0.4, 0.37);
    REQUIRE(plan.visible_cols == 5);
    Grid<float> img(224, 80);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<float> d(-1.0f, 1.0f);
    for (float& v : img.values()) v = d(rng);
    CHECK(align(img, plan).visible == img);

    const auto constant = align(Grid<float>(24, 120, 0.25f), make_plan(2880, 96, 24, 0.4, 0.4));
    for (float v : constant.visible.values()) CHECK(v == 0.25f);
}

TEST_CASE("patch masks", "[imaging][mask]") {
    const auto m = PatchMask::left_visible(14, 5);
    CHECK(m.visible_count() == 70);
    CHECK(m.visible_indices().front() == 0);
    CHECK(m.visible_indices()[5] == 14);
    CHECK_THROWS_AS(PatchMask::left_visible(14, 14), ShapeError);
    CHECK_THROWS_AS(PatchMask::left_visible(14, 0), ShapeError);
}

TEST_CASE("reconstruct_to_forecast reads the region after the context", "[imaging][inverse]") {
    // resize-free geometry: the forecast is the masked part read column-major
    const auto plan = make_plan(224 * 80, 224, 224, 0.4, 0.37);
    REQUIRE(plan.output_periods() == 224);
    GrayImage full(224, 224);
    for (std::size_t y = 0; y < 224; ++y)
        for (std::size_t x = 0; x < 224; ++x) full(y, x) = static_cast<float>(x) * 0.01f + static_cast<float>(y) * 1e-4f;
    const NormStats stats{1.0, 2.0};
    const auto f = reconstruct_to_forecast(full, plan, stats);
    REQUIRE(f.size() == 224);
    for (std::size_t k = 0; k < f.size(); ++k)
        CHECK(f[k] == Approx(denormalize(full(k, 80), stats, 0.4)).epsilon(1e-12));

    ImagePlan empty = plan;
    empty.horizon = 0;
    CHECK(reconstruct_to_forecast(full, empty, stats).empty());
}

TEST_CASE("capacity errors", "[imaging][inverse]") {
    // m = 1 and n = 1, so W = 14 and the masked region holds (14 - 1) * 30 values
    ImagePlan plan = make_plan(30, 1000, 30, 0.4, 1.0);
    CHECK(plan.capacity() < 1000);
    CHECK_THROWS_AS(reconstruct_to_forecast(GrayImage(224, 224), plan, NormStats{}), CapacityError);
}
