#pragma once

// Reference implementations written straight from the definitions, kept
// deliberately naive so they share no code with the engine.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace oracle {

/// Per-pixel half-pixel bilinear sample of a row-major h x w image.
inline double bilinear_pixel(const std::vector<double>& src, std::size_t h, std::size_t w,
                             std::size_t oh, std::size_t ow, std::size_t y, std::size_t x) {
    auto coord = [](std::size_t i, std::size_t in, std::size_t out) {
        double s = (static_cast<double>(i) + 0.5) * static_cast<double>(in) / static_cast<double>(out) - 0.5;
        return std::clamp(s, 0.0, static_cast<double>(in - 1));
    };
    const double sy = coord(y, h, oh), sx = coord(x, w, ow);
    const auto y0 = static_cast<std::size_t>(std::floor(sy));
    const auto x0 = static_cast<std::size_t>(std::floor(sx));
    const std::size_t y1 = std::min(y0 + 1, h - 1), x1 = std::min(x0 + 1, w - 1);
    const double fy = sy - static_cast<double>(y0), fx = sx - static_cast<double>(x0);
    const double top = src[y0 * w + x0] * (1 - fx) + src[y0 * w + x1] * fx;
    const double bottom = src[y1 * w + x0] * (1 - fx) + src[y1 * w + x1] * fx;
    return top * (1 - fy) + bottom * fy;
}

/// Mean over the floor(L/P) most recent periods, per phase, tiled to H.
inline std::vector<double> phase_means(const std::vector<double>& context, std::size_t period,
                                       std::size_t horizon) {
    const std::size_t m = context.size() / period;
    std::vector<double> out;
    for (std::size_t i = 0; i < horizon; ++i) {
        const std::size_t phase = i % period;
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) s += context[context.size() - (m - j) * period + phase];
        out.push_back(s / static_cast<double>(m));
    }
    return out;
}

/// Smooth random periodic signal: a few random harmonics of `period`.
inline std::vector<double> smooth_periodic(std::size_t length, std::size_t period, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> amp(-1.0, 1.0), phase(0.0, 6.283185307179586);
    const double a1 = amp(rng), a2 = 0.5 * amp(rng), p1 = phase(rng), p2 = phase(rng);
    const double level = 3.0 * amp(rng);
    std::vector<double> out(length);
    for (std::size_t t = 0; t < length; ++t) {
        const double w = 6.283185307179586 * static_cast<double>(t) / static_cast<double>(period);
        out[t] = level + a1 * std::sin(w + p1) + a2 * std::sin(2 * w + p2);
    }
    return out;
}

inline double rms(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s / static_cast<double>(v.size()));
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("visionts_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace oracle
