#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "oracles.hpp"

#ifndef VISIONTS_CLI_PATH
#error "VISIONTS_CLI_PATH must point at the built CLI"
#endif

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::string& args, const std::filesystem::path& dir) {
    const auto err_path = dir / "stderr.txt";
    const std::string cmd = std::string(VISIONTS_CLI_PATH) + " " + args + " 2>" + err_path.string();
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe);
    std::string out;
    char buf[4096];
    while (const std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
    const int status = ::pclose(pipe);
    std::ifstream err_in(err_path);
    std::stringstream err;
    err << err_in.rdbuf();
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out, err.str()};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_columns(const std::filesystem::path& path, std::size_t rows, std::size_t period, bool constant = false) {
    std::ofstream out(path);
    out << "x,y\n";
    for (std::size_t t = 0; t < rows; ++t) {
        const double w = 6.283185307179586 * static_cast<double>(t % period) / static_cast<double>(period);
        out << (constant ? 3.0 : std::sin(w)) << "," << (constant ? 3.0 : 2.0 * std::cos(w)) << "\n";
    }
}

}  // namespace

TEST_CASE("forecast with the fixture weights", "[cli]") {
    const auto dir = oracle::scratch_dir("cli_forecast");
    write_columns(dir / "sine.csv", 500, 24);
    REQUIRE(run("fixture --out " + (dir / "fx.vts").string() + " --seed 5", dir).code == 0);
    const std::string base = "forecast --weights " + (dir / "fx.vts").string() + " --data " +
                             (dir / "sine.csv").string() + " --context-length 240 --horizons 48 --period 24";
    const auto r = run(base, dir);
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        std::size_t commas = 0;
        for (char c : line) commas += c == ',';
        CHECK(commas == 48);
        CHECK(line.find("nan") == std::string::npos);
    }
    CHECK(rows == 2);
    CHECK(r.out.rfind("x,", 0) == 0);

    // determinism, file output
    REQUIRE(run(base + " --out " + (dir / "f.csv").string(), dir).code == 0);
    CHECK(slurp(dir / "f.csv") == r.out);
}

TEST_CASE("exit codes", "[cli]") {
    const auto dir = oracle::scratch_dir("cli_exit");
    write_columns(dir / "sine.csv", 300, 24);
    const std::string data = " --data " + (dir / "sine.csv").string();

    const auto missing = run("forecast --weights " + (dir / "none.vts").string() + data +
                                 " --context-length 96 --horizons 24 --period 24",
                             dir);
    CHECK(missing.code == 2);
    CHECK(missing.err.find("LoadError") != std::string::npos);
    CHECK(missing.err.find("mae_infer") != std::string::npos);

    CHECK(run("forecast --stub --data " + (dir / "nothing.csv").string() + " --context-length 96 --horizons 24", dir).code == 2);
    CHECK(run("frobnicate", dir).code == 1);
    CHECK(run("forecast --stub" + data + " --context-length 96 --horizons 24 --r 0", dir).code == 1);
    CHECK(run("forecast --stub" + data + " --context-length 96 --horizons 24 --period x", dir).code == 1);
    CHECK(run("forecast --stub" + data + " --context-length 96 --horizons 24 --period 200", dir).code == 3);
    CHECK(run("forecast --stub" + data + " --context-length 1000 --horizons 24 --period 24", dir).code == 3);
    CHECK(run("inspect --stub" + data + " --context-length 96 --horizons 24 --period 24 --origin 10 --out " +
                  dir.string(), dir).code == 3);
}

TEST_CASE("benchmark report", "[cli]") {
    const auto dir = oracle::scratch_dir("cli_benchmark");
    write_columns(dir / "periodic.csv", 2000, 24);
    const auto r = run("benchmark --stub --data " + (dir / "periodic.csv").string() +
                           " --context-length 96 --horizons 96,192 --period 24 --baselines seasonal_naive,seasonal_avg"
                           " --report " + (dir / "report.json").string(),
                       dir);
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(doc.at("rows").size() == 2 * 3);
    for (const auto& row : doc.at("rows"))
        if (row.at("method") == "seasonal_naive") CHECK(row.at("mse").get<double>() < 1e-20);
    CHECK(doc.at("config").at("periodic").at("period") == 24);
    CHECK(doc.at("config").at("periodic").at("resize") == "bilinear/half-pixel/clamp/no-antialias");

    // config file supplies defaults, flags win
    {
        std::ofstream cfg(dir / "run.toml");
        cfg << "context-length = 48\nhorizons = 24\nperiod = 12\nbaselines = seasonal_naive\n";
    }
    const auto again = run("benchmark --config " + (dir / "run.toml").string() + " --period 24 --data " +
                               (dir / "periodic.csv").string(),
                           dir);
    REQUIRE(again.code == 0);
    const auto d2 = nlohmann::json::parse(again.out);
    CHECK(d2.at("rows").size() == 1);
    CHECK(d2.at("config").at("periodic").at("context_length") == 48);
    CHECK(d2.at("config").at("periodic").at("period") == 24);

    CHECK(run("benchmark --data " + (dir / "periodic.csv").string() + " --context-length 48", dir).code == 1);
}

TEST_CASE("inspect dumps four greymaps", "[cli]") {
    const auto dir = oracle::scratch_dir("cli_inspect");
    write_columns(dir / "wave.csv", 600, 24);
    const auto r = run("inspect --stub --data " + (dir / "wave.csv").string() +
                           " --context-length 480 --horizons 96 --period 24 --variable 1 --origin 500 --out " +
                           (dir / "img").string(),
                       dir);
    REQUIRE(r.code == 0);
    for (const char* part : {"input", "visible", "mask", "reconstructed"}) {
        const auto bytes = slurp(dir / "img" / (std::string("wave_v1_t500_") + part + ".pgm"));
        REQUIRE(bytes.size() > 2);
        CHECK(bytes.substr(0, 2) == "P5");
    }
    // n = floor(0.4 * 14 * 480 / 576) = 4 visible columns of 16 pixels
    CHECK(slurp(dir / "img" / "wave_v1_t500_visible.pgm").rfind("P5\n64 224\n255\n", 0) == 0);

    write_columns(dir / "flat.csv", 600, 24, true);
    REQUIRE(run("inspect --stub --data " + (dir / "flat.csv").string() +
                    " --context-length 480 --horizons 96 --period 24 --out " + (dir / "img").string(),
                dir).code == 0);
    for (const char* part : {"input", "visible", "mask", "reconstructed"}) {
        const auto bytes = slurp(dir / "img" / (std::string("flat_v0_t504_") + part + ".pgm"));
        const auto body = bytes.find("255\n") + 4;
        for (std::size_t i = body; i < bytes.size(); ++i) REQUIRE(static_cast<unsigned char>(bytes[i]) == 128);
    }
}
